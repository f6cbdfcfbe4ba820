#pragma once

#include <cstdint>
#include <vector>

#include "ophydro/autocorr.hpp"

namespace ophydro {

// Ensemble of independent endpoint walkers on sites 1..L. Dissipation enters
// as per-walker importance weights, not killing. Walker trajectories are pure
// functions of (rng_seed, walker index), so results do not depend on how the
// stepping is partitioned across threads.
struct WalkEnsemble {
  std::uint64_t rng_seed = 0;
  int L = 0;
  int t = 0;
  int start_site = 1;
  std::vector<std::int32_t> positions;
  std::vector<double> log_weights;

  std::size_t n_walkers() const { return positions.size(); }
};

WalkEnsemble make_walk_ensemble(std::size_t n_walkers, int start_site, int L,
                                std::uint64_t seed);

// One synchronous step: +1 w.p. p^2, -1 w.p. (1-p)^2, stay otherwise, with the
// boundary columns of T(p) reproduced exactly (x=1: stay w.p. 1-p^2; x=L: stay
// w.p. 1-(1-p)^2). Then log_weight -= gamma * x at the post-move position.
void step_ensemble(WalkEnsemble& e, double p, double gamma, int n_threads = 0);

struct DensityWithErrors {
  EndpointDensity density;        // weight-summed histogram / n_walkers
  std::vector<double> std_error;  // per-bin standard error of the mean
};

DensityWithErrors ensemble_density(const WalkEnsemble& e);

double ensemble_mean_weight(const WalkEnsemble& e);
double ensemble_mean_position(const WalkEnsemble& e);  // unweighted

struct Chi2Report {
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int bins_used = 0;
};

// Pearson chi-squared of the unweighted position counts against expected site
// probabilities; adjacent bins pooled until each expected count reaches
// min_expected. Requires an unweighted ensemble (gamma = 0 throughout).
Chi2Report chi2_compare(const WalkEnsemble& e, const std::vector<double>& expected,
                        double min_expected = 5.0);

}  // namespace ophydro
