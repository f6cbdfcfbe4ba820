#include "ophydro/walk_mc.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "ophydro/errors.hpp"
#include "ophydro/rng.hpp"
#include "ophydro/threading.hpp"

namespace ophydro {

namespace {

std::uint64_t walker_key(std::uint64_t seed, std::uint64_t walker) {
  return mix64(seed ^ mix64(walker ^ 0x5851F42D4C957F2DULL));
}

// Draw `index` of the walker stream; identical to CounterRng's sequence.
double unit_at(std::uint64_t key, std::uint64_t index) {
  return static_cast<double>(
             mix64(key + (index + 1) * 0x9E3779B97F4A7C15ULL) >> 11) *
         0x1.0p-53;
}

}  // namespace

WalkEnsemble make_walk_ensemble(std::size_t n_walkers, int start_site, int L,
                                std::uint64_t seed) {
  if (n_walkers == 0) throw validation_error("make_walk_ensemble: need walkers");
  if (L < 2) throw validation_error("make_walk_ensemble: L must be >= 2");
  if (start_site < 1 || start_site > L)
    throw validation_error("make_walk_ensemble: start site outside [1, L]");
  WalkEnsemble e;
  e.rng_seed = seed;
  e.L = L;
  e.start_site = start_site;
  e.positions.assign(n_walkers, static_cast<std::int32_t>(start_site));
  e.log_weights.assign(n_walkers, 0.0);
  return e;
}

void step_ensemble(WalkEnsemble& e, double p, double gamma, int n_threads) {
  if (!(p > 0.0 && p < 1.0)) throw validation_error("step_ensemble: bad p");
  if (!(gamma >= 0.0)) throw validation_error("step_ensemble: gamma must be >= 0");
  const double pr = p * p;
  const double pl = (1.0 - p) * (1.0 - p);
  const int L = e.L;
  const std::uint64_t t_index = static_cast<std::uint64_t>(e.t);

  parallel_for(e.n_walkers(), n_threads,
               [&](std::size_t begin, std::size_t end, int) {
                 for (std::size_t w = begin; w < end; ++w) {
                   const double u = unit_at(walker_key(e.rng_seed, w), t_index);
                   std::int32_t x = e.positions[w];
                   if (x == 1) {
                     if (u < pr) x = 2;
                   } else if (x == L) {
                     if (u < pl) x = L - 1;
                   } else {
                     if (u < pr)
                       ++x;
                     else if (u < pr + pl)
                       --x;
                   }
                   e.positions[w] = x;
                   if (gamma != 0.0) e.log_weights[w] -= gamma * x;
                 }
               });
  ++e.t;
}

DensityWithErrors ensemble_density(const WalkEnsemble& e) {
  const std::size_t n = e.n_walkers();
  DensityWithErrors out;
  out.density.t = e.t;
  out.density.values.assign(e.L, 0.0);
  out.std_error.assign(e.L, 0.0);
  std::vector<double> second(e.L, 0.0);
  // single pass in walker order keeps the result independent of the stepping
  // partition
  for (std::size_t w = 0; w < n; ++w) {
    const double weight = std::exp(e.log_weights[w]);
    const int i = e.positions[w] - 1;
    out.density.values[i] += weight;
    second[i] += weight * weight;
  }
  const double dn = static_cast<double>(n);
  double mass = 0.0;
  for (int i = 0; i < e.L; ++i) {
    const double mean = out.density.values[i] / dn;
    const double var = std::max(0.0, second[i] / dn - mean * mean);
    out.density.values[i] = mean;
    out.std_error[i] = std::sqrt(var / dn);
    mass += mean;
  }
  out.density.total_mass = mass;
  return out;
}

double ensemble_mean_weight(const WalkEnsemble& e) {
  double s = 0.0;
  for (double lw : e.log_weights) s += std::exp(lw);
  return s / static_cast<double>(e.n_walkers());
}

double ensemble_mean_position(const WalkEnsemble& e) {
  double s = 0.0;
  for (std::int32_t x : e.positions) s += x;
  return s / static_cast<double>(e.n_walkers());
}

Chi2Report chi2_compare(const WalkEnsemble& e, const std::vector<double>& expected,
                        double min_expected) {
  if (static_cast<int>(expected.size()) != e.L)
    throw validation_error("chi2_compare: expected distribution size mismatch");
  for (double lw : e.log_weights)
    if (lw != 0.0)
      throw validation_error("chi2_compare: requires an unweighted (gamma = 0) ensemble");

  double total_expected = 0.0;
  for (double q : expected) {
    if (q < 0.0) throw validation_error("chi2_compare: negative expected probability");
    total_expected += q;
  }
  if (!(total_expected > 0.0))
    throw validation_error("chi2_compare: expected distribution is empty");

  std::vector<std::size_t> counts(e.L, 0);
  for (std::int32_t x : e.positions) ++counts[x - 1];
  const double n = static_cast<double>(e.n_walkers());

  // pool adjacent sites until each bin carries at least min_expected events
  std::vector<double> obs_bins, exp_bins;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (int i = 0; i < e.L; ++i) {
    obs_acc += static_cast<double>(counts[i]);
    exp_acc += n * expected[i] / total_expected;
    if (exp_acc >= min_expected) {
      obs_bins.push_back(obs_acc);
      exp_bins.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(obs_acc);
      exp_bins.push_back(exp_acc);
    } else {
      obs_bins.back() += obs_acc;
      exp_bins.back() += exp_acc;
    }
  }
  if (obs_bins.size() < 2)
    throw validation_error("chi2_compare: fewer than two usable bins");

  Chi2Report r;
  r.bins_used = static_cast<int>(obs_bins.size());
  for (std::size_t i = 0; i < obs_bins.size(); ++i) {
    const double d = obs_bins[i] - exp_bins[i];
    r.chi2 += d * d / exp_bins[i];
  }
  r.dof = r.bins_used - 1;
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.chi2);
  return r;
}

}  // namespace ophydro
