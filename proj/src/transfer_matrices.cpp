#include "ophydro/transfer_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ophydro/config.hpp"
#include "ophydro/errors.hpp"

namespace ophydro {

namespace {

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("p must lie strictly between 0 and 1, got " + std::to_string(p));
}

void require_size(int L, int min_size) {
  if (L < min_size)
    throw validation_error("system size must be >= " + std::to_string(min_size) +
                           ", got " + std::to_string(L));
}

}  // namespace

BandedMatrix build_transfer(double p, int L) {
  require_probability(p);
  require_size(L, 2);
  const double right = p * p;
  const double left = (1.0 - p) * (1.0 - p);
  const double stay = 2.0 * p * (1.0 - p);

  BandedMatrix m(L, true);
  std::fill(m.band(-1).begin(), m.band(-1).end(), right);
  std::fill(m.band(1).begin(), m.band(1).end(), left);
  auto& d = m.band(0);
  std::fill(d.begin(), d.end(), stay);
  d.front() = stay + left;   // blocked left move at the wall
  d.back() = stay + right;   // blocked right move at the far edge
  return m;
}

SymTridiagonal build_symmetric_transfer(double p, int L) {
  require_probability(p);
  require_size(L, 2);
  const double stay = 2.0 * p * (1.0 - p);
  SymTridiagonal t;
  t.diag.assign(L, stay);
  t.diag.front() = stay + (1.0 - p) * (1.0 - p);
  t.diag.back() = stay + p * p;
  t.off.assign(L - 1, p * (1.0 - p));
  return t;
}

DiagonalWeight build_similarity(double p, int L) {
  require_probability(p);
  require_size(L, 1);
  const double step = std::log(p) - std::log1p(-p);
  DiagonalWeight w(L);
  for (int i = 0; i < L; ++i) w.log_weights[i] = step * i;
  return w;
}

DiagonalWeight build_dissipation(double gamma, double c, int L) {
  if (!(gamma >= 0.0)) throw validation_error("gamma must be >= 0");
  if (!(c > 0.0)) throw validation_error("dissipation exponent scale c must be > 0");
  require_size(L, 1);
  DiagonalWeight w(L);
  for (int i = 0; i < L; ++i) w.log_weights[i] = -c * gamma * (i + 1);
  return w;
}

DiagonalWeight build_hard_truncation(int ell, int L) {
  require_size(L, 1);
  if (ell < 1 || ell > L)
    throw validation_error("truncation length ell must lie in [1, L]");
  DiagonalWeight w(L);
  for (int i = ell; i < L; ++i)
    w.log_weights[i] = -std::numeric_limits<double>::infinity();
  return w;
}

BandedMatrix build_truncated_block(double p, int ell, double c_prime) {
  require_probability(p);
  require_size(ell, 2);
  if (!(c_prime >= 0.0 && c_prime <= 1.0))
    throw validation_error("c_prime must lie in [0, 1]");
  const double a = (1.0 - p) * (1.0 - p);
  const double b = 2.0 * p * (1.0 - p);
  const double c = p * p;

  BandedMatrix m(ell, std::fabs(c_prime - c) <= default_tolerances().stochastic_colsum);
  std::fill(m.band(-1).begin(), m.band(-1).end(), c);
  std::fill(m.band(1).begin(), m.band(1).end(), a);
  auto& d = m.band(0);
  std::fill(d.begin(), d.end(), b);
  d.front() = a + b;
  d.back() = b + c_prime;
  return m;
}

double counterexample_eps_max(double p) {
  // all four jump probabilities must stay inside [0, 1]
  return std::min({p / 6.0, (1.0 - p / 2.0) / 3.0, 1.0 - p});
}

BandedMatrix build_counterexample(double p, double eps, int L) {
  require_probability(p);
  require_size(L, 4);
  if (!(eps >= 0.0 && eps <= counterexample_eps_max(p)))
    throw validation_error("eps outside admissible window [0, " +
                           std::to_string(counterexample_eps_max(p)) + "]");

  BandedMatrix m(L, false);
  std::fill(m.band(0).begin(), m.band(0).end(), 1.0 - p - eps);
  std::fill(m.band(-1).begin(), m.band(-1).end(), p / 2.0 + 3.0 * eps);
  std::fill(m.band(-2).begin(), m.band(-2).end(), p / 2.0 - 3.0 * eps);
  std::fill(m.band(-3).begin(), m.band(-3).end(), eps);
  return m;
}

BandedMatrix build_simplified(double eps, int L) {
  if (!(eps > 0.0 && eps < 0.5))
    throw validation_error("eps must lie strictly between 0 and 1/2");
  require_size(L, 2);
  BandedMatrix m(L, true);
  auto& d = m.band(0);
  std::fill(d.begin(), d.end(), 2.0 * eps);
  d.back() = 1.0;  // absorbing end
  std::fill(m.band(-1).begin(), m.band(-1).end(), 1.0 - 2.0 * eps);
  return m;
}

JumpMoments jump_moments(const BandedMatrix& m) {
  const int L = m.size();
  const int reach = std::max(m.lower_bandwidth(), m.upper_bandwidth());
  if (L <= 2 * reach)
    throw validation_error("jump_moments: system too small for a bulk column");

  // Middle column sees every band; moments are only meaningful if it holds a
  // probability distribution, which also covers sub-stochastic families whose
  // bulk is conservative.
  const int col = L / 2;
  if (!m.column_stochastic(col, default_tolerances().stochastic_colsum))
    throw validation_error("jump_moments: bulk column is not a probability distribution");

  JumpMoments out;
  for (int o : m.offsets()) {
    const double w = m.at(col - o, col);
    const double jump = -o;  // band offset is col - row; jump counts row - col
    out.v_b += w * jump;
    out.diffusion += w * jump * jump / 2.0;
    out.higher += w * jump * jump * jump / 6.0;
  }
  return out;
}

}  // namespace ophydro
