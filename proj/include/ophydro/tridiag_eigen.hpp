#pragma once

#include <vector>

#include "ophydro/sym_tridiagonal.hpp"

namespace ophydro {

// Gauge tag for eigenvector components: `original` means probability gauge
// (components of the non-symmetric transfer operator), `symmetric` the
// similarity-transformed gauge, `symmetrized_dissipative` the gauge of
// W^(1/2) T~ W^(1/2).
enum class SpectralGauge { original, symmetric, symmetrized_dissipative };

struct Spectrum {
  std::vector<double> eigenvalues;  // descending
  // eigenvectors[i] pairs with eigenvalues[i]; unit 2-norm; empty unless
  // requested.
  std::vector<std::vector<double>> eigenvectors;
  SpectralGauge gauge = SpectralGauge::symmetric;
};

struct EigenOptions {
  double abs_tol = 1e-13;      // bisection interval width
  double residual_tol = 1e-9;  // inverse-iteration acceptance
  bool want_eigenvectors = false;
  int top_k = -1;              // leading eigenvalues to compute; -1 = all
};

// Number of eigenvalues of m strictly below x (Sturm sequence count).
int sturm_count_below(const SymTridiagonal& m, double x);

// Bisection eigensolver. Eigenvalues are found independently to abs_tol;
// eigenvectors by inverse iteration on the shifted pivoted factorization,
// reorthogonalized within near-degenerate clusters. Throws convergence_error
// if a vector fails to reach residual_tol within the iteration budget.
Spectrum eig_sym_tridiag(const SymTridiagonal& m, const EigenOptions& opts = {});

double largest_sym_tridiag_eigenvalue(const SymTridiagonal& m, double abs_tol = 1e-13);

// Unit eigenvector for a precomputed eigenvalue (accurate to the bisection
// tolerance). Sign fixed so the largest-magnitude component is positive.
std::vector<double> sym_tridiag_eigenvector(const SymTridiagonal& m, double lambda,
                                            double residual_tol = 1e-9);

}  // namespace ophydro
