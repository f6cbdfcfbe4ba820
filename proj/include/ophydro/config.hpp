#pragma once

namespace ophydro {

inline constexpr const char* kToolVersion = "0.1.0";

// Numerical thresholds used throughout the library, kept in one record so a
// run manifest can log exactly what it was computed with.
struct Tolerances {
  double eigenvalue_abs = 1e-13;     // bisection interval width for eigenvalues
  double eigvec_residual = 1e-9;     // ||A v - lambda v||_2 acceptance per unit vector
  double stochastic_colsum = 1e-12;  // allowed column-sum deviation from 1
  double unit_sum = 1e-12;           // allowed deviation for normalized densities
  double leading_negativity = 1e-10; // tolerated undershoot in leading eigenvectors
  double gauge_noise_floor = 1e-10;  // relative eigenvector floor before gauge mapping
};

const Tolerances& default_tolerances();

}  // namespace ophydro
