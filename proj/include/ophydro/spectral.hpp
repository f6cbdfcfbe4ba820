#pragma once

#include <vector>

#include "ophydro/banded_matrix.hpp"
#include "ophydro/diagonal_weight.hpp"
#include "ophydro/sym_tridiagonal.hpp"
#include "ophydro/tridiag_eigen.hpp"

namespace ophydro {

// Standing-wave mode of the reflecting chain; quantization allows m = 1..L-1.
struct ModeIndex {
  int m;
  int L;
  ModeIndex(int m, int L);
  double k() const;
};

// lambda_k = 2p(1-p)(1 + cos k).
double analytic_eigenvalue(double p, const ModeIndex& mode);

// {1} together with the L-1 standing-wave eigenvalues, descending.
Spectrum analytic_spectrum(double p, int L);

// Symmetric-gauge eigenvector psi_x ∝ p sin(kx) - (1-p) sin(k(x-1)),
// normalized by the closed-form norm (L/2)(1-p)^2 (1 - lambda_k). Note this
// convention is not unit 2-norm; it is the normalization the closed-form
// return sum is written against.
std::vector<double> analytic_eigenvector(double p, const ModeIndex& mode);

// Squared overlap of site n with the normalized steady state,
// (1 - r) r^(n-1) / (1 - r^L) with r = (p/(1-p))^2, evaluated in log domain.
// p = 1/2 returns the uniform limit 1/L.
double steady_state_overlap(double p, int n, int L);

// W^(1/2) T~ W^(1/2): symmetric tridiagonal with the same spectrum as the
// weighted product W T (diagonal similarity chain). Weights must be strictly
// positive; hard truncation is handled by build_truncated_block instead.
SymTridiagonal symmetrize_dissipative(const SymTridiagonal& t, const DiagonalWeight& w);

// Symmetric core plus the log-domain diagonal gauge that maps symmetric-gauge
// eigenvectors back to the probability (original) gauge.
struct GaugedOperator {
  SymTridiagonal sym;
  std::vector<double> log_gauge;
};

GaugedOperator make_transfer_operator(double p, int L);                        // T(p)
GaugedOperator make_dissipative_operator(double p, double gamma, double c, int L);  // P(gamma) T(p)
GaugedOperator make_truncated_operator(double p, int ell, double c_prime);     // kept block of P(ell) T(p)

struct LeadingPair {
  double eigenvalue = 0.0;
  std::vector<double> vector;  // original gauge, unit sum, nonnegative
};

// Leading eigenvalue and eigenvector. The symmetric path uses Sturm bisection
// plus inverse iteration and maps the vector through the gauge in log domain.
LeadingPair leading_pair(const GaugedOperator& op, double tol = 1e-13);

// General banded path (used for triangular operators with no symmetric form):
// power iteration for a leading estimate, then shifted inverse iteration on a
// pivoted band factorization. Optional diagonal weight w multiplies from the
// left (rows), in linear domain.
LeadingPair leading_pair(const BandedMatrix& m, const DiagonalWeight* w = nullptr,
                         double tol = 1e-10);

// Balance point of growth against dissipation: x* = -ln(lambda) / gamma.
double peak_estimate(double lambda, double gamma);

// Truncated-chain characteristic function in the complex-root regime
// 0 < eps < 2b, eps = 4p(1-p) - lambda:
//   gtilde = (b-eps) r cos((l-1)theta + phi) - cos((l-2)theta + phi)
// with r = sqrt(c/a), theta = atan2(sqrt((2b-eps) eps), b-eps) and phi the
// phase of alpha = 1/2 + i (a r cos(theta) + a - b + eps) / (2 a r sin(theta)).
// Exact angles, not the small-eps expansion.
double gtilde(double p, int ell, double eps);

// eps roots of gtilde with psi = eps * ell^2 up to psi_max, smallest first.
std::vector<double> gtilde_roots(double p, int ell, double psi_max, int max_roots);

struct TruncationRoot {
  int ell;
  double epsilon;  // 4p(1-p) - lambda_max
  double psi;      // epsilon * ell^2
};

// Leading-eigenvalue offsets of the truncated block across ell; psi converges
// to p(1-p) pi^2 for c_prime = 0.
std::vector<TruncationRoot> truncated_root_scan(double p, const std::vector<int>& ells,
                                                double c_prime);

// Closed-form leading eigenvector of P(gamma) T^(1) (simplified model), unit
// sum over x = 1..L, evaluated in log domain. Peaks within one site of
// -ln(2 eps)/gamma.
std::vector<double> simplified_eigvec(double epsilon, double gamma, int L);

}  // namespace ophydro
