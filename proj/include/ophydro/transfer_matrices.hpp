#pragma once

#include "ophydro/banded_matrix.hpp"
#include "ophydro/diagonal_weight.hpp"
#include "ophydro/sym_tridiagonal.hpp"

namespace ophydro {

// Builders for the endpoint-density transfer matrices of operator spreading.
// All matrices act on column vectors of site occupations, sites 1..L, and are
// column-stochastic unless stated otherwise. The bulk move distribution is
// right with probability p^2, left with (1-p)^2, stay with 2p(1-p); p is the
// single-bond growth probability (p = q^2 / (q^2 + 1) for local dimension q).

// Reflecting column-stochastic transfer matrix T(p). Corner columns absorb the
// blocked move into the diagonal: (1,1) = 1 - p^2, (L,L) = 1 - (1-p)^2.
BandedMatrix build_transfer(double p, int L);

// Symmetric similarity transform of T(p): same spectrum, symmetric tridiagonal
// with off-diagonal p(1-p) and bulk diagonal 2p(1-p).
SymTridiagonal build_symmetric_transfer(double p, int L);

// Diagonal similarity R with R_nn = (p/(1-p))^(n-1), stored as logs; grows past
// double range for moderate L, so only the log form is provided.
DiagonalWeight build_similarity(double p, int L);

// Smooth dissipator P(gamma)_xx = exp(-c * gamma * x).
DiagonalWeight build_dissipation(double gamma, double c, int L);

// Hard truncation projector: keeps sites x <= ell, zeroes the rest.
DiagonalWeight build_hard_truncation(int ell, int L);

// The ell x ell block of T(p) kept by hard truncation, with the upper-left
// corner reflecting as in T(p) and a configurable lower-right return weight
// c_prime: (ell, ell) = 2p(1-p) + c_prime. c_prime = p^2 recovers T(p) on ell
// sites; c_prime = 0 is the open (leaky) block. Column-stochastic only in the
// former case.
BandedMatrix build_truncated_block(double p, int ell, double c_prime);

// Lower-triangular counterexample family with jumps m in {0,1,2,3} of
// probability (1-p-eps, p/2+3*eps, p/2-3*eps, eps). Enhanced diffusion and
// third moment at fixed v_b = 3p/2. The last three columns lose forward
// channels to the wall and are sub-stochastic, so the stochastic flag is
// false; bulk columns still sum to 1.
BandedMatrix build_counterexample(double p, double eps, int L);

// Largest admissible eps for build_counterexample at this p.
double counterexample_eps_max(double p);

// Simplified spreading model: advance by one site with probability 1 - 2*eps,
// stay with 2*eps, and an absorbing last site.
BandedMatrix build_simplified(double eps, int L);

// First jump moments of a banded transfer matrix, read off a bulk column
// (jump m = row - col). v_b = E[m], diffusion = E[m^2]/2, higher = E[m^3]/6.
struct JumpMoments {
  double v_b = 0.0;
  double diffusion = 0.0;
  double higher = 0.0;
};

JumpMoments jump_moments(const BandedMatrix& m);

}  // namespace ophydro
