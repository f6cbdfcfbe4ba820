#include "ophydro/tridiag_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ophydro/errors.hpp"
#include "ophydro/rng.hpp"

namespace ophydro {

namespace {

double infinity_norm(const SymTridiagonal& m) {
  const int n = m.size();
  double a = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::fabs(m.diag[i]);
    if (i > 0) row += std::fabs(m.off[i - 1]);
    if (i + 1 < n) row += std::fabs(m.off[i]);
    a = std::max(a, row);
  }
  return a;
}

double pivot_floor(const SymTridiagonal& m) {
  double e2max = 1.0;
  for (double e : m.off) e2max = std::max(e2max, e * e);
  return std::numeric_limits<double>::min() /
         std::numeric_limits<double>::epsilon() * e2max;
}

struct GershgorinBounds {
  double lo, hi;
};

GershgorinBounds gershgorin(const SymTridiagonal& m) {
  const int n = m.size();
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(m.off[i - 1]);
    if (i + 1 < n) r += std::fabs(m.off[i]);
    lo = std::min(lo, m.diag[i] - r);
    hi = std::max(hi, m.diag[i] + r);
  }
  double pad = std::numeric_limits<double>::epsilon() *
                   std::max(std::fabs(lo), std::fabs(hi)) +
               2.0 * std::numeric_limits<double>::min();
  return {lo - pad, hi + pad};
}

int count_below(const SymTridiagonal& m, double x, double pivmin) {
  const int n = m.size();
  int count = 0;
  double q = m.diag[0] - x;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    q = m.diag[i] - x - m.off[i - 1] * m.off[i - 1] / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// Eigenvalue with ascending index j (0-based), bisected to abs_tol.
double bisect_eigenvalue(const SymTridiagonal& m, int j, double abs_tol,
                         const GershgorinBounds& g, double pivmin) {
  double lo = g.lo, hi = g.hi;
  const double rel = std::numeric_limits<double>::epsilon() *
                     std::max(std::fabs(g.lo), std::fabs(g.hi));
  const double width = std::max(abs_tol, 2.0 * rel);
  for (int iter = 0; iter < 4000 && hi - lo > width; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at rounding resolution
    if (count_below(m, mid, pivmin) >= j + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Pivoted LU of (m - sigma I), LAPACK dgttrf style, for inverse iteration.
struct ShiftedTridiagFactor {
  int n;
  std::vector<double> dl, d, du, du2;
  std::vector<char> swapped;

  ShiftedTridiagFactor(const SymTridiagonal& m, double sigma, double pivmin) {
    n = m.size();
    d.resize(n);
    for (int i = 0; i < n; ++i) d[i] = m.diag[i] - sigma;
    dl.assign(m.off.begin(), m.off.end());
    du.assign(m.off.begin(), m.off.end());
    du2.assign(std::max(n - 2, 0), 0.0);
    swapped.assign(std::max(n - 1, 0), 0);

    for (int i = 0; i + 1 < n; ++i) {
      if (std::fabs(d[i]) >= std::fabs(dl[i])) {
        if (std::fabs(d[i]) < pivmin) d[i] = std::copysign(pivmin, d[i] == 0.0 ? 1.0 : d[i]);
        double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
        if (i + 2 < n) du2[i] = 0.0;
      } else {
        double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        double tmp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = tmp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && std::fabs(d[n - 1]) < pivmin)
      d[n - 1] = std::copysign(pivmin, d[n - 1] == 0.0 ? 1.0 : d[n - 1]);
  }

  void solve(std::vector<double>& b) const {
    for (int i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
  double n = norm2(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

void orthogonalize(std::vector<double>& v,
                   const std::vector<const std::vector<double>*>& basis) {
  for (const auto* u : basis) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * (*u)[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * (*u)[i];
  }
}

void fix_sign(std::vector<double>& v) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (double& x : v) x = -x;
}

std::vector<double> inverse_iteration(const SymTridiagonal& m, double lambda,
                                      const std::vector<const std::vector<double>*>& ortho,
                                      double residual_tol, std::uint64_t stream) {
  const int n = m.size();
  if (n == 1) return {1.0};
  const double anorm = infinity_norm(m);
  const double pivmin = pivot_floor(m);
  ShiftedTridiagFactor lu(m, lambda, pivmin);

  CounterRng rng(0x6F70687964726FULL, stream);
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_unit() - 0.5;
  orthogonalize(v, ortho);
  normalize(v);

  const double accept = residual_tol * std::max(1.0, anorm);
  double residual = std::numeric_limits<double>::max();
  for (int iter = 0; iter < 12; ++iter) {
    lu.solve(v);
    orthogonalize(v, ortho);
    normalize(v);
    std::vector<double> av = m.apply(v);
    residual = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = av[i] - lambda * v[i];
      residual += r * r;
    }
    residual = std::sqrt(residual);
    if (residual <= accept) {
      fix_sign(v);
      return v;
    }
  }
  throw convergence_error(
      "inverse iteration stalled: eigenvalue " + std::to_string(lambda) +
      ", residual " + std::to_string(residual) + " > " + std::to_string(accept));
}

}  // namespace

int sturm_count_below(const SymTridiagonal& m, double x) {
  if (m.size() == 0) throw validation_error("sturm_count_below: empty matrix");
  return count_below(m, x, pivot_floor(m));
}

double largest_sym_tridiag_eigenvalue(const SymTridiagonal& m, double abs_tol) {
  if (m.size() == 0) throw validation_error("empty matrix");
  return bisect_eigenvalue(m, m.size() - 1, abs_tol, gershgorin(m), pivot_floor(m));
}

std::vector<double> sym_tridiag_eigenvector(const SymTridiagonal& m, double lambda,
                                            double residual_tol) {
  return inverse_iteration(m, lambda, {}, residual_tol, 1);
}

Spectrum eig_sym_tridiag(const SymTridiagonal& m, const EigenOptions& opts) {
  const int n = m.size();
  if (n == 0) throw validation_error("eig_sym_tridiag: empty matrix");
  int k = opts.top_k < 0 ? n : std::min(opts.top_k, n);

  Spectrum out;
  out.eigenvalues.reserve(k);
  const auto g = gershgorin(m);
  const double pivmin = pivot_floor(m);
  for (int i = 0; i < k; ++i)
    out.eigenvalues.push_back(bisect_eigenvalue(m, n - 1 - i, opts.abs_tol, g, pivmin));

  if (!opts.want_eigenvectors) return out;

  // Vectors computed in descending eigenvalue order; near-degenerate runs are
  // orthogonalized against each other with slightly separated shifts.
  const double anorm = infinity_norm(m);
  const double cluster_gap = std::max(1e-8 * std::max(1.0, anorm), 100.0 * opts.abs_tol);
  out.eigenvectors.resize(k);
  std::size_t cluster_begin = 0;
  for (int i = 0; i < k; ++i) {
    if (i > 0 && out.eigenvalues[i - 1] - out.eigenvalues[i] > cluster_gap)
      cluster_begin = i;
    std::vector<const std::vector<double>*> ortho;
    for (std::size_t j = cluster_begin; j < static_cast<std::size_t>(i); ++j)
      ortho.push_back(&out.eigenvectors[j]);
    double shift = out.eigenvalues[i];
    if (!ortho.empty())
      shift += static_cast<double>(ortho.size()) *
               std::numeric_limits<double>::epsilon() * std::max(1.0, anorm);
    out.eigenvectors[i] =
        inverse_iteration(m, shift, ortho, opts.residual_tol, static_cast<std::uint64_t>(i) + 1);
  }
  return out;
}

}  // namespace ophydro
