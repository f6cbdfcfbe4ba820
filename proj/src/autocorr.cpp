#include "ophydro/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ophydro/errors.hpp"
#include "ophydro/spectral.hpp"

namespace ophydro {

namespace {

constexpr double kPi = 3.14159265358979323846;

EndpointDensity snapshot(int t, const std::vector<double>& v) {
  EndpointDensity d;
  d.t = t;
  d.values = v;
  d.total_mass = 0.0;
  for (double x : v) d.total_mass += x;
  return d;
}

}  // namespace

EvolveResult evolve_density(const BandedMatrix& m, int start_site, int steps,
                            const std::vector<int>& checkpoint_times,
                            const DiagonalWeight* dissipation) {
  const int L = m.size();
  if (start_site < 1 || start_site > L)
    throw validation_error("evolve_density: start site outside [1, L]");
  if (steps < 0) throw validation_error("evolve_density: steps must be >= 0");
  if (dissipation && dissipation->size() != L)
    throw validation_error("evolve_density: dissipation weight size mismatch");

  std::vector<double> damp;
  if (dissipation) {
    damp.resize(L);
    for (int i = 0; i < L; ++i) {
      const double lw = dissipation->log_weights[i];
      damp[i] = lw == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(lw);
    }
  }

  std::set<int> marks(checkpoint_times.begin(), checkpoint_times.end());
  EvolveResult out;
  out.return_series.reserve(steps + 1);
  out.mass_series.reserve(steps + 1);

  std::vector<double> v(L, 0.0), next(L);
  v[start_site - 1] = 1.0;
  for (int t = 0;; ++t) {
    out.return_series.push_back(v[start_site - 1]);
    double mass = 0.0;
    for (double x : v) mass += x;
    out.mass_series.push_back(mass);
    if (marks.count(t)) out.checkpoints.push_back(snapshot(t, v));
    if (t == steps) break;
    m.apply(v.data(), next.data());
    if (dissipation)
      for (int i = 0; i < L; ++i) next[i] *= damp[i];
    v.swap(next);
  }
  return out;
}

double spectral_return_sum(double p, int L, int t, int n) {
  if (!(p > 0.5 && p < 1.0))
    throw validation_error("spectral_return_sum: need 1/2 < p < 1");
  if (L < 2 || t < 0) throw validation_error("spectral_return_sum: bad L or t");
  if (n < 1 || n > L) throw validation_error("spectral_return_sum: site outside [1, L]");
  double sum = 0.0;
  for (int m = 1; m <= L - 1; ++m) {
    const double k = kPi * m / L;
    const double lambda = 2.0 * p * (1.0 - p) * (1.0 + std::cos(k));
    const double amp = p * std::sin(k * n) - (1.0 - p) * std::sin(k * (n - 1));
    sum += std::pow(lambda, t) * amp * amp / (1.0 - lambda);
  }
  return (2.0 / L) * sum + steady_state_overlap(p, n, L);
}

double asymptotic_return(double p, int t, int L) {
  if (!(p > 0.0 && p < 1.0)) throw validation_error("asymptotic_return: bad p");
  if (t < 1) throw validation_error("asymptotic_return: t must be >= 1");
  const double log_decay = std::log(4.0) + 2.0 * std::log(p) + 1.0 -
                           0.5 * std::log(kPi) +
                           t * std::log(4.0 * p * (1.0 - p)) -
                           1.5 * std::log(2.0 + t);
  return std::exp(log_decay) + steady_state_overlap(p, 1, L);
}

double asymptotic_return_site(double p, int t, int L, int n) {
  if (n < 1 || n > L) throw validation_error("asymptotic_return_site: site outside [1, L]");
  // small-wavenumber mode amplitude at site n is k((2p-1)n + 1-p) where the
  // n = 1 closed form carries k p, so the prefactor scales by the ratio
  const double amp = ((2.0 * p - 1.0) * n + 1.0 - p) / p;
  const double decay = asymptotic_return(p, t, L) - steady_state_overlap(p, 1, L);
  return amp * amp * decay + steady_state_overlap(p, n, L);
}

PlateauReport plateau_report(double p, int n, int L) {
  if (!(p > 0.5 && p < 1.0))
    throw validation_error("plateau_report: need 1/2 < p < 1");
  PlateauReport r;
  r.plateau_value = steady_state_overlap(p, n, L);
  // log-linear intersection (4p(1-p))^t = ((1-p)/p)^(2L); both logs negative
  const double lhs_rate = std::log(4.0 * p * (1.0 - p));
  const double rhs = 2.0 * L * (std::log1p(-p) - std::log(p));
  r.t_plateau = rhs / lhs_rate;
  r.t_plateau_paper_formula =
      -2.0 * L * std::log(p * (1.0 - p)) / std::log(4.0 * p * (1.0 - p));
  r.method = "intersect (4p(1-p))^t with ((1-p)/p)^(2L)";
  return r;
}

namespace {

void require_q(int q) {
  if (q < 2) throw validation_error("local dimension q must be >= 2");
}

}  // namespace

double product_state_density(int q, long long x, long long t) {
  require_q(q);
  if (t < 0) throw validation_error("product_state_density: t must be >= 0");
  if (x < -t || x > t) return 0.0;
  const long double lq = std::log(static_cast<long double>(q));
  const long double lq2p1 = std::log(1.0L + static_cast<long double>(q) * q);
  const long double log_binom = std::lgammal(2.0L * t + 1.0L) -
                                std::lgammal(static_cast<long double>(t + x) + 1.0L) -
                                std::lgammal(static_cast<long double>(t - x) + 1.0L);
  return static_cast<double>(
      std::exp(2.0L * (t + x) * lq - 2.0L * t * lq2p1 + log_binom));
}

double product_state_mass(int q, int t) {
  require_q(q);
  if (t < 0) throw validation_error("product_state_mass: t must be >= 0");
  // term(x) = q^(2(t+x)) (1+q^2)^(-2t) C(2t, t+x), accumulated by the exact
  // integer-ratio recurrence in extended precision
  const long double q2 = static_cast<long double>(q) * q;
  long double term = std::exp(-2.0L * t * std::log(1.0L + q2));
  long double sum = term;
  for (long long x = -t; x < t; ++x) {
    term *= q2 * static_cast<long double>(t - x) / static_cast<long double>(t + x + 1);
    sum += term;
  }
  return static_cast<double>(sum);
}

double product_state_connected(int q, int t) {
  require_q(q);
  if (t < 0) throw validation_error("product_state_connected: t must be >= 0");
  const long double q2 = static_cast<long double>(q) * q;
  // rho'(x,t) q^(-2x) = q^(2t) (1+q^2)^(-2t) C(2t, t+x)
  long double term = std::exp(t * (std::log(q2) - 2.0L * std::log(1.0L + q2)));
  long double sum = term;
  for (long long x = -t; x < t; ++x) {
    term *= static_cast<long double>(t - x) / static_cast<long double>(t + x + 1);
    sum += term;
  }
  const double value = static_cast<double>(sum);

  // p = q^2/(q^2+1): the sum telescopes to (4p(1-p))^t exactly
  const double closed = static_cast<double>(
      std::exp(t * (std::log(4.0L * q2) - 2.0L * std::log(1.0L + q2))));
  if (std::fabs(value - closed) > 1e-9 * std::max(closed, 1e-300))
    throw convergence_error("product_state_connected: binomial identity violated");
  return value;
}

namespace {

// Solve the 3x3 normal equations by Gaussian elimination with partial pivoting.
void solve3(double a[3][3], double b[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const int pr = perm[col];
    if (a[pr][col] == 0.0) throw validation_error("fit_decay_rate: singular normal equations");
    for (int r = col + 1; r < 3; ++r) {
      const int rr = perm[r];
      const double f = a[rr][col] / a[pr][col];
      for (int c = col; c < 3; ++c) a[rr][c] -= f * a[pr][c];
      b[rr] -= f * b[pr];
    }
  }
  double x[3];
  for (int col = 2; col >= 0; --col) {
    const int pr = perm[col];
    double s = b[pr];
    for (int c = col + 1; c < 3; ++c) s -= a[pr][c] * x[c];
    x[col] = s / a[pr][col];
  }
  b[0] = x[0];
  b[1] = x[1];
  b[2] = x[2];
}

}  // namespace

DecayFit fit_decay_rate(const std::vector<double>& series, int t_begin, int t_end,
                        std::optional<double> fixed_power) {
  if (t_begin < 0 || t_end >= static_cast<int>(series.size()) || t_begin >= t_end)
    throw validation_error("fit_decay_rate: bad window");
  const int n = t_end - t_begin + 1;
  const int needed = fixed_power ? 3 : 4;
  if (n < needed) throw validation_error("fit_decay_rate: under-determined window");
  for (int t = t_begin; t <= t_end; ++t)
    if (!(series[t] > 0.0))
      throw validation_error("fit_decay_rate: non-positive value in window at t = " +
                             std::to_string(t));

  DecayFit fit;
  fit.window_begin = t_begin;
  fit.window_end = t_end;
  fit.power_fixed = fixed_power.has_value();

  if (fixed_power) {
    fit.power_exponent = *fixed_power;
    // y + beta ln(2+t) = c - g t: simple linear regression
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (int t = t_begin; t <= t_end; ++t) {
      const double y = std::log(series[t]) + *fixed_power * std::log(2.0 + t);
      st += t;
      sy += y;
      stt += static_cast<double>(t) * t;
      sty += t * y;
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    fit.rate = -slope;
    fit.log_prefactor = (sy - slope * st) / n;
  } else {
    // basis (1, t, ln(2+t))
    double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (int t = t_begin; t <= t_end; ++t) {
      const double phi[3] = {1.0, static_cast<double>(t), std::log(2.0 + t)};
      const double y = std::log(series[t]);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a[r][c] += phi[r] * phi[c];
        b[r] += phi[r] * y;
      }
    }
    solve3(a, b);
    fit.log_prefactor = b[0];
    fit.rate = -b[1];
    fit.power_exponent = -b[2];
  }

  double ss = 0.0;
  for (int t = t_begin; t <= t_end; ++t) {
    const double yhat = fit.log_prefactor - fit.rate * t -
                        fit.power_exponent * std::log(2.0 + t);
    const double r = std::log(series[t]) - yhat;
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

int default_fit_window_end(double p, int L) {
  return static_cast<int>(0.7 * plateau_report(p, 1, L).t_plateau);
}

}  // namespace ophydro
