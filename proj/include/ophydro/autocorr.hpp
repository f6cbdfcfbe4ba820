#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ophydro/banded_matrix.hpp"
#include "ophydro/diagonal_weight.hpp"

namespace ophydro {

struct EndpointDensity {
  int t = 0;
  std::vector<double> values;  // sites 1..L
  double total_mass = 0.0;
};

struct EvolveResult {
  // return_series[t] = <n| M^t |n>, t = 0..steps
  std::vector<double> return_series;
  std::vector<double> mass_series;
  std::vector<EndpointDensity> checkpoints;
};

// Iterated banded multiply from a delta at start_site, O(L) per step. With a
// dissipation weight the step is v -> W (M v). Full densities are stored only
// at the requested checkpoint times.
EvolveResult evolve_density(const BandedMatrix& m, int start_site, int steps,
                            const std::vector<int>& checkpoint_times = {},
                            const DiagonalWeight* dissipation = nullptr);

// Closed-form return probability <n|T(p)^t|n>: standing-wave sum
// (2/L) sum_k lambda_k^t (p sin kn - (1-p) sin k(n-1))^2 / (1 - lambda_k)
// plus the steady-state plateau term. Exact for all t (validated against
// evolve_density; the measured correction constant is 1).
double spectral_return_sum(double p, int L, int t, int n = 1);

// Saddle-point asymptote (4 p^2 e / sqrt(pi)) (4p(1-p))^t / (2+t)^(3/2) plus
// the plateau term, powers in log domain. Start site 1.
double asymptotic_return(double p, int t, int L);

// Same asymptote started from site n: the decay prefactor picks up the
// small-wavenumber amplitude ratio ((2p-1)n + 1-p)^2 / p^2 and the plateau
// moves to the site-n steady-state overlap.
double asymptotic_return_site(double p, int t, int L, int n);

struct PlateauReport {
  double plateau_value = 0.0;
  double t_plateau = 0.0;
  // The printed closed form -2L log(p(1-p)) / log(4p(1-p)), reported verbatim
  // for comparison; negative for p > 1/2.
  double t_plateau_paper_formula = 0.0;
  std::string method;
};

// Plateau value and onset time; t_plateau from the log-linear intersection
// (4p(1-p))^t = ((1-p)/p)^(2L).
PlateauReport plateau_report(double p, int n, int L);

// Product-state (free right endpoint) closed forms, local dimension q.
// rho'(x,t) = q^(2(t+x)) / (1+q^2)^(2t) * C(2t, t+x); zero for |x| > t.
double product_state_density(int q, long long x, long long t);

// sum_x rho'(x,t); identically 1 (binomial identity), summed term by term in
// extended precision.
double product_state_mass(int q, int t);

// sum_x rho'(x,t) q^(-2x) = (4p(1-p))^t with p = q^2/(q^2+1); evaluated as the
// sum and cross-checked internally against the closed form.
double product_state_connected(int q, int t);

struct DecayFit {
  double rate = 0.0;            // g-bar, per step
  double power_exponent = 0.0;  // of the (2+t)^-beta correction
  double log_prefactor = 0.0;
  int window_begin = 0;
  int window_end = 0;  // inclusive
  double residual_rms = 0.0;
  bool power_fixed = false;
};

// Ordinary least squares on ln rho(t) = log_prefactor - rate * t
// - power_exponent * ln(2+t), with the power exponent free or pinned
// (3/2 for endpoint-pinned walks, 1/2 for free endpoints).
DecayFit fit_decay_rate(const std::vector<double>& series, int t_begin, int t_end,
                        std::optional<double> fixed_power = std::nullopt);

// Default fit window end: 0.7 * t_plateau, rounded down.
int default_fit_window_end(double p, int L);

}  // namespace ophydro
