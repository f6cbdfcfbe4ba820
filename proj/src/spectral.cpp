#include "ophydro/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "ophydro/config.hpp"
#include "ophydro/transfer_matrices.hpp"
#include "ophydro/errors.hpp"

namespace ophydro {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_p_open(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("p must lie strictly between 0 and 1");
}

}  // namespace

ModeIndex::ModeIndex(int m_, int L_) : m(m_), L(L_) {
  if (L < 2) throw validation_error("ModeIndex: L must be >= 2");
  if (m < 1 || m > L - 1)
    throw validation_error("ModeIndex: quantization allows m = 1..L-1, got m = " +
                           std::to_string(m));
}

double ModeIndex::k() const { return kPi * m / L; }

double analytic_eigenvalue(double p, const ModeIndex& mode) {
  require_p_open(p);
  return 2.0 * p * (1.0 - p) * (1.0 + std::cos(mode.k()));
}

Spectrum analytic_spectrum(double p, int L) {
  require_p_open(p);
  if (L < 2) throw validation_error("analytic_spectrum: L must be >= 2");
  Spectrum s;
  s.gauge = SpectralGauge::symmetric;
  s.eigenvalues.reserve(L);
  s.eigenvalues.push_back(1.0);  // stochastic steady state
  for (int m = 1; m <= L - 1; ++m)
    s.eigenvalues.push_back(analytic_eigenvalue(p, ModeIndex(m, L)));
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<double>());
  return s;
}

std::vector<double> analytic_eigenvector(double p, const ModeIndex& mode) {
  require_p_open(p);
  const int L = mode.L;
  const double k = mode.k();
  const double lambda = analytic_eigenvalue(p, mode);
  const double norm = (1.0 - p) * std::sqrt(0.5 * L * (1.0 - lambda));
  std::vector<double> psi(L);
  for (int x = 1; x <= L; ++x)
    psi[x - 1] = (p * std::sin(k * x) - (1.0 - p) * std::sin(k * (x - 1))) / norm;
  return psi;
}

double steady_state_overlap(double p, int n, int L) {
  require_p_open(p);
  if (L < 1 || n < 1 || n > L)
    throw validation_error("steady_state_overlap: need 1 <= n <= L");
  if (p == 0.5) return 1.0 / L;  // uniform limit

  // (1 - r) r^(n-1) / (1 - r^L), r = (p/(1-p))^2. Numerator and denominator
  // are both negative for p > 1/2; work with |1 - r| = |2p - 1| / (1-p)^2 and
  // keep everything in logs.
  const double log_r = 2.0 * (std::log(p) - std::log1p(-p));
  const double log_abs_1mr = std::log(std::fabs(2.0 * p - 1.0)) - 2.0 * std::log1p(-p);
  double log_abs_denom;
  if (log_r > 0.0)  // r^L - 1, same sign as r - 1
    log_abs_denom = L * log_r + std::log1p(-std::exp(-L * log_r));
  else
    log_abs_denom = std::log1p(-std::exp(L * log_r));
  return std::exp(log_abs_1mr + (n - 1) * log_r - log_abs_denom);
}

SymTridiagonal symmetrize_dissipative(const SymTridiagonal& t, const DiagonalWeight& w) {
  const int L = t.size();
  if (w.size() != L)
    throw validation_error("symmetrize_dissipative: weight size mismatch");
  if (!w.strictly_positive())
    throw validation_error(
        "symmetrize_dissipative: weights must be strictly positive; "
        "hard truncation goes through build_truncated_block");
  SymTridiagonal s;
  s.diag.resize(L);
  s.off.resize(L - 1);
  for (int i = 0; i < L; ++i)
    s.diag[i] = std::exp(w.log_weights[i]) * t.diag[i];
  for (int i = 0; i + 1 < L; ++i)
    s.off[i] = std::exp(0.5 * (w.log_weights[i] + w.log_weights[i + 1])) * t.off[i];
  return s;
}

GaugedOperator make_transfer_operator(double p, int L) {
  GaugedOperator op;
  op.sym = build_symmetric_transfer(p, L);
  op.log_gauge = build_similarity(p, L).log_weights;
  return op;
}

GaugedOperator make_dissipative_operator(double p, double gamma, double c, int L) {
  const DiagonalWeight w = build_dissipation(gamma, c, L);
  GaugedOperator op;
  op.sym = symmetrize_dissipative(build_symmetric_transfer(p, L), w);
  op.log_gauge = build_similarity(p, L).log_weights;
  for (int i = 0; i < L; ++i) op.log_gauge[i] += 0.5 * w.log_weights[i];
  return op;
}

GaugedOperator make_truncated_operator(double p, int ell, double c_prime) {
  const BandedMatrix block = build_truncated_block(p, ell, c_prime);
  GaugedOperator op;
  op.sym.diag = *block.find_band(0);
  // uniform sub/super bands c = p^2, a = (1-p)^2 symmetrize to sqrt(a c)
  op.sym.off.assign(ell - 1, p * (1.0 - p));
  const double step = std::log(p) - std::log1p(-p);  // log sqrt(c/a)
  op.log_gauge.resize(ell);
  for (int i = 0; i < ell; ++i) op.log_gauge[i] = step * i;
  return op;
}

namespace {

// Map a symmetric-gauge eigenvector to the probability gauge through the log
// weights, normalize to unit sum and clip the tolerated negative dust.
std::vector<double> gauge_to_density(const std::vector<double>& u,
                                     const std::vector<double>& log_gauge) {
  const std::size_t n = u.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // Components below the eigensolver's resolution are exact zeros as far as
  // the vector is determined; the gauge grows exponentially across the chain
  // and would amplify that dust above the genuine peak.
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, std::fabs(x));
  const double floor = default_tolerances().gauge_noise_floor * umax;
  std::vector<double> logs(n);
  double top = neg_inf;
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = std::fabs(u[i]) <= floor
                  ? neg_inf
                  : log_gauge[i] + std::log(std::fabs(u[i]));
    top = std::max(top, logs[i]);
  }
  if (top == neg_inf)
    throw convergence_error("gauge map produced an identically zero vector");

  std::vector<double> v(n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (logs[i] == neg_inf) continue;
    v[i] = std::copysign(std::exp(logs[i] - top), u[i]);
    sum += v[i];
  }
  if (sum == 0.0) throw convergence_error("gauge map produced a zero-sum vector");
  double lowest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] /= sum;
    lowest = std::min(lowest, v[i]);
  }
  if (lowest < -default_tolerances().leading_negativity)
    throw convergence_error("leading eigenvector positivity violated: min component " +
                            std::to_string(lowest));
  double clipped_sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    clipped_sum += x;
  }
  for (double& x : v) x /= clipped_sum;
  return v;
}

// Defined below, after the band LU machinery.
std::vector<double> banded_eigvec_at(const BandedMatrix& m, const DiagonalWeight* w,
                                     double lambda);

}  // namespace

LeadingPair leading_pair(const GaugedOperator& op, double tol) {
  const int n = op.sym.size();
  if (n != static_cast<int>(op.log_gauge.size()))
    throw validation_error("leading_pair: gauge length mismatch");
  LeadingPair out;
  out.eigenvalue = largest_sym_tridiag_eigenvalue(op.sym, tol);
  if (n == 1) {
    out.vector = {1.0};
    return out;
  }
  // The symmetric-gauge eigenvector is not usable here: past its own peak it
  // decays steeply while the gauge grows ~log(p/(1-p)) per site, so the
  // density peak corresponds to symmetric-gauge components far below double
  // resolution once the gauge spans more than ~16 decades. Inverse-iterate on
  // the original-gauge tridiagonal instead; conjugation by the gauge keeps
  // the diagonal and splits each off-diagonal pair into off*e^{+dg} (sub)
  // and off*e^{-dg} (super), all of bounded size.
  BandedMatrix orig(n);
  orig.band(0) = op.sym.diag;
  auto& sub = orig.band(-1);
  auto& sup = orig.band(1);
  for (int i = 0; i + 1 < n; ++i) {
    const double dg = op.log_gauge[i + 1] - op.log_gauge[i];
    sub[i] = op.sym.off[i] * std::exp(dg);
    sup[i] = op.sym.off[i] * std::exp(-dg);
  }
  out.vector = banded_eigvec_at(orig, nullptr, out.eigenvalue);
  return out;
}

namespace {

// Row-weighted banded apply: y = W M x (weights in linear domain).
void weighted_apply(const BandedMatrix& m, const DiagonalWeight* w,
                    const std::vector<double>& x, std::vector<double>& y) {
  m.apply(x.data(), y.data());
  if (w)
    for (int i = 0; i < m.size(); ++i) {
      double lw = w->log_weights[i];
      y[i] = lw == -std::numeric_limits<double>::infinity() ? 0.0 : y[i] * std::exp(lw);
    }
}

// Pivoted LU of a general band matrix (W M - shift I), LAPACK band layout.
class BandLU {
 public:
  BandLU(const BandedMatrix& m, const DiagonalWeight* w, double shift)
      : n_(m.size()), kl_(m.lower_bandwidth()), ku_(m.upper_bandwidth()) {
    kv_ = kl_ + ku_;
    ldab_ = kv_ + kl_ + 1;
    ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
    piv_.assign(n_, 0);
    for (int o : m.offsets()) {
      const auto& band = *m.find_band(o);
      for (int k = 0; k < static_cast<int>(band.size()); ++k) {
        int i = k + std::max(-o, 0);
        int j = k + std::max(o, 0);
        double val = band[k];
        if (w) {
          double lw = w->log_weights[i];
          val = lw == -std::numeric_limits<double>::infinity() ? 0.0 : val * std::exp(lw);
        }
        at(i, j) = val;
      }
    }
    for (int i = 0; i < n_; ++i) at(i, i) -= shift;
    factor();
  }

  void solve(std::vector<double>& b) const {
    for (int j = 0; j + 1 < n_; ++j) {
      if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
      const int km = std::min(kl_, n_ - 1 - j);
      for (int k = 1; k <= km; ++k) b[j + k] -= ab_[idx(kv_ + k, j)] * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      b[j] /= ab_[idx(kv_, j)];
      const int top = std::max(0, j - kv_);
      for (int i = top; i < j; ++i) b[i] -= ab_[idx(kv_ + i - j, j)] * b[j];
    }
  }

 private:
  std::size_t idx(int r, int j) const {
    return static_cast<std::size_t>(j) * ldab_ + r;
  }
  double& at(int i, int j) { return ab_[idx(kv_ + i - j, j)]; }

  void factor() {
    const double tiny = std::numeric_limits<double>::min() * 1e4;
    for (int j = 0; j < n_; ++j) {
      const int km = std::min(kl_, n_ - 1 - j);
      int jp = 0;
      for (int k = 1; k <= km; ++k)
        if (std::fabs(ab_[idx(kv_ + k, j)]) > std::fabs(ab_[idx(kv_ + jp, j)])) jp = k;
      piv_[j] = j + jp;
      if (std::fabs(ab_[idx(kv_ + jp, j)]) < tiny)
        ab_[idx(kv_ + jp, j)] = std::copysign(tiny, ab_[idx(kv_ + jp, j)] >= 0 ? 1.0 : -1.0);
      if (jp != 0) {
        const int last = std::min(n_ - 1, j + kv_);
        for (int jj = j; jj <= last; ++jj)
          std::swap(ab_[idx(kv_ + j - jj, jj)], ab_[idx(kv_ + j + jp - jj, jj)]);
      }
      const double d = ab_[idx(kv_, j)];
      for (int k = 1; k <= km; ++k) ab_[idx(kv_ + k, j)] /= d;
      const int last = std::min(n_ - 1, j + kv_);
      for (int jj = j + 1; jj <= last; ++jj) {
        const double f = ab_[idx(kv_ + j - jj, jj)];
        if (f == 0.0) continue;
        for (int k = 1; k <= km; ++k)
          ab_[idx(kv_ + j + k - jj, jj)] -= ab_[idx(kv_ + k, j)] * f;
      }
    }
  }

  int n_, kl_, ku_, kv_, ldab_;
  std::vector<double> ab_;
  std::vector<int> piv_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Inverse iteration at a known eigenvalue; returns the unit-sum nonnegative
// density. The shift gets a tiny alternating offset so the factorization
// stays clear of exact singularity.
std::vector<double> banded_eigvec_at(const BandedMatrix& m, const DiagonalWeight* w,
                                     double lambda) {
  const int n = m.size();
  double anorm = 0.0;
  {
    std::vector<double> ones(n, 1.0), row(n);
    weighted_apply(m, w, ones, row);
    for (double v : row) anorm = std::max(anorm, std::fabs(v));
  }
  const double accept =
      default_tolerances().eigvec_residual * std::max({anorm, std::fabs(lambda), 1.0});
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double residual = std::numeric_limits<double>::max();
  for (int round = 0; round < 6 && residual > accept; ++round) {
    const double off = std::max(std::fabs(lambda), 1.0) * 1e-11 * (round + 1);
    const double shift = lambda + (round % 2 == 0 ? off : -off);
    BandLU lu(m, w, shift);
    for (int it = 0; it < 4; ++it) {
      lu.solve(v);
      double nn = 0.0;
      for (double x : v) nn = std::max(nn, std::fabs(x));
      if (!(nn > 0.0) || !std::isfinite(nn))
        throw convergence_error("inverse iteration diverged on banded operator");
      for (double& x : v) x /= nn;
    }
    weighted_apply(m, w, v, y);
    residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - lambda * v[i];
      residual += r * r;
    }
    residual = std::sqrt(residual) / nrm2(v);
  }
  if (residual > accept)
    throw convergence_error(
        "eigenvector iteration at fixed eigenvalue stalled: residual " +
        std::to_string(residual));
  return gauge_to_density(v, std::vector<double>(n, 0.0));
}

}  // namespace

LeadingPair leading_pair(const BandedMatrix& m, const DiagonalWeight* w, double tol) {
  const int n = m.size();
  if (w && w->size() != n)
    throw validation_error("leading_pair: weight size mismatch");

  double anorm = 0.0;
  {
    std::vector<double> ones(n, 1.0), row(n);
    // crude scale estimate: |A| applied to ones bounds the infinity norm for
    // nonnegative operators, which is all this path is used for
    weighted_apply(m, w, ones, row);
    for (double v : row) anorm = std::max(anorm, std::fabs(v));
    anorm = std::max(anorm, 1.0);
  }

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double lam = 0.0, lam_prev = std::numeric_limits<double>::max();
  int steady = 0;
  for (long iter = 0; iter < 200000; ++iter) {
    weighted_apply(m, w, v, y);
    lam = dot(v, y);
    const double nn = nrm2(y);
    if (nn == 0.0)
      throw convergence_error("power iteration collapsed to the zero vector");
    for (int i = 0; i < n; ++i) v[i] = y[i] / nn;
    if (std::fabs(lam - lam_prev) <= 1e-9 * std::max(1.0, std::fabs(lam))) {
      if (++steady >= 4) break;
    } else {
      steady = 0;
    }
    lam_prev = lam;
  }

  // Shifted inverse iteration sharpens both the value and the vector.
  const double accept = tol * anorm;
  double residual = std::numeric_limits<double>::max();
  for (int round = 0; round < 8; ++round) {
    const double shift = lam + std::max(std::fabs(lam), 1.0) * 1e-9;
    BandLU lu(m, w, shift);
    for (int it = 0; it < 4; ++it) {
      lu.solve(v);
      const double nn = nrm2(v);
      if (!(nn > 0.0) || !std::isfinite(nn))
        throw convergence_error("inverse iteration diverged on banded operator");
      for (int i = 0; i < n; ++i) v[i] /= nn;
    }
    weighted_apply(m, w, v, y);
    lam = dot(v, y);
    residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - lam * v[i];
      residual += r * r;
    }
    residual = std::sqrt(residual);
    if (residual <= accept) break;
  }
  if (residual > accept)
    throw convergence_error("leading_pair (banded) stalled: residual " +
                            std::to_string(residual) + " > " + std::to_string(accept));

  LeadingPair out;
  out.eigenvalue = lam;
  // Already in the probability gauge; reuse the log-domain normalizer with a
  // trivial gauge for the sign, unit-sum and positivity handling.
  out.vector = gauge_to_density(v, std::vector<double>(n, 0.0));
  return out;
}

double peak_estimate(double lambda, double gamma) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw validation_error("peak_estimate: need 0 < lambda < 1");
  if (!(gamma > 0.0)) throw validation_error("peak_estimate: need gamma > 0");
  return -std::log(lambda) / gamma;
}

double gtilde(double p, int ell, double eps) {
  require_p_open(p);
  if (ell < 3) throw validation_error("gtilde: ell must be >= 3");
  const double a = (1.0 - p) * (1.0 - p);
  const double b = 2.0 * p * (1.0 - p);
  if (!(eps > 0.0 && eps < 2.0 * b))
    throw validation_error("gtilde: need 0 < eps < 2b (complex-root regime)");

  const double r = p / (1.0 - p);  // sqrt(c/a)
  const double s = std::sqrt((2.0 * b - eps) * eps);
  // hypot(s, b - eps) = b identically, so theta comes out exact
  const double theta = std::atan2(s, b - eps);
  const double sin_t = s / b;
  const double cos_t = (b - eps) / b;
  const double alpha_im = (a * r * cos_t + a - b + eps) / (2.0 * a * r * sin_t);
  const double phi = std::atan2(alpha_im, 0.5);
  return (b - eps) * r * std::cos((ell - 1) * theta + phi) -
         std::cos((ell - 2) * theta + phi);
}

std::vector<double> gtilde_roots(double p, int ell, double psi_max, int max_roots) {
  require_p_open(p);
  if (ell < 3) throw validation_error("gtilde_roots: ell must be >= 3");
  if (!(psi_max > 0.0)) throw validation_error("gtilde_roots: psi_max must be > 0");
  const double ell2 = static_cast<double>(ell) * ell;

  std::vector<double> roots;
  const double psi_step = 0.02;
  double psi_lo = psi_step;
  double g_lo = gtilde(p, ell, psi_lo / ell2);
  for (double psi = 2.0 * psi_step; psi <= psi_max && static_cast<int>(roots.size()) < max_roots;
       psi += psi_step) {
    const double g_hi = gtilde(p, ell, psi / ell2);
    if (g_lo == 0.0 || g_lo * g_hi < 0.0) {
      double lo = psi_lo, hi = psi;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = gtilde(p, ell, mid / ell2);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (gm * g_lo < 0.0)
          hi = mid;
        else
          lo = mid;
      }
      roots.push_back(0.5 * (lo + hi) / ell2);
    }
    psi_lo = psi;
    g_lo = g_hi;
  }
  return roots;
}

std::vector<TruncationRoot> truncated_root_scan(double p, const std::vector<int>& ells,
                                                double c_prime) {
  if (!(p > 0.5 && p < 1.0))
    throw validation_error("truncated_root_scan: need 1/2 < p < 1");
  const double edge = 4.0 * p * (1.0 - p);
  std::vector<TruncationRoot> out;
  out.reserve(ells.size());
  for (int ell : ells) {
    if (ell < 8) throw validation_error("truncated_root_scan: each ell must be >= 8");
    const GaugedOperator op = make_truncated_operator(p, ell, c_prime);
    const double lam = largest_sym_tridiag_eigenvalue(op.sym);
    const double eps = edge - lam;
    out.push_back({ell, eps, eps * static_cast<double>(ell) * ell});
  }
  return out;
}

std::vector<double> simplified_eigvec(double epsilon, double gamma, int L) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw validation_error("simplified_eigvec: need 0 < epsilon < 1/2");
  if (!(gamma > 0.0)) throw validation_error("simplified_eigvec: need gamma > 0");
  if (L < 2) throw validation_error("simplified_eigvec: L must be >= 2");

  // Telescoped ratio rho(x)/rho(x-1) = e^{-gamma (x-1)} (1-2eps)/(2eps)
  //                                    / (1 - e^{-gamma (x-1)}),
  // accumulated in log domain and normalized to unit sum.
  const double log_gain = std::log1p(-2.0 * epsilon) - std::log(2.0 * epsilon);
  std::vector<double> logs(L);
  logs[0] = 0.0;
  for (int x = 2; x <= L; ++x) {
    const double u = gamma * (x - 1);
    logs[x - 1] = logs[x - 2] + log_gain - u - std::log(-std::expm1(-u));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> v(L);
  double sum = 0.0;
  for (int i = 0; i < L; ++i) {
    v[i] = std::exp(logs[i] - top);
    sum += v[i];
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace ophydro
