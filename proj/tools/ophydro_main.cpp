#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "ophydro/cli_commands.hpp"
#include "ophydro/config.hpp"
#include "ophydro/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"operator-spreading hydrodynamics toolkit"};
  app.set_version_flag("--version", std::string(ophydro::kToolVersion));
  app.require_subcommand(1);

  ophydro::SpectrumArgs spectrum_args;
  double gamma_val = 0.0;
  int ell_val = 0;
  auto* spectrum =
      app.add_subcommand("spectrum", "spectra of the transfer operators");
  spectrum->add_option("--p", spectrum_args.p, "bias parameter")->required();
  spectrum->add_option("--L", spectrum_args.L, "chain length")->required();
  auto* gamma_opt = spectrum->add_option("--gamma", gamma_val, "dissipation rate");
  auto* ell_opt = spectrum->add_option("--ell", ell_val, "hard truncation size");
  spectrum->add_option("--cprime", spectrum_args.cprime,
                       "truncation corner: zero|stochastic|<number>");
  spectrum->add_option("--out", spectrum_args.out_dir, "output directory");
  spectrum->add_flag("--svg", spectrum_args.svg, "also write an SVG plot");
  spectrum->callback([&] {
    if (gamma_opt->count()) spectrum_args.gamma = gamma_val;
    if (ell_opt->count()) spectrum_args.ell = ell_val;
    ophydro::cmd_spectrum(spectrum_args);
  });

  ophydro::AutocorrArgs autocorr_args;
  auto* autocorr =
      app.add_subcommand("autocorr", "endpoint return series and asymptote");
  autocorr->add_option("--p", autocorr_args.p, "bias parameter")->required();
  autocorr->add_option("--L", autocorr_args.L, "chain length")->required();
  autocorr->add_option("--n", autocorr_args.n, "start site");
  autocorr->add_option("--steps", autocorr_args.steps, "time steps")->required();
  autocorr->add_option("--out", autocorr_args.out_dir, "output directory");
  autocorr->add_flag("--svg", autocorr_args.svg, "also write an SVG overlay");
  autocorr->callback([&] { ophydro::cmd_autocorr(autocorr_args); });

  ophydro::ScanGammaArgs scan_args;
  auto* scan = app.add_subcommand("scan-gamma", "leading eigenvalue vs dissipation");
  scan->add_option("--p", scan_args.p, "bias parameter")->required();
  scan->add_option("--L-list", scan_args.L_list, "chain lengths")
      ->required()
      ->delimiter(',');
  scan->add_option("--gamma-grid", scan_args.gamma_grid,
                   "lo:hi:n log grid or comma list");
  scan->add_option("--out", scan_args.out_dir, "output directory");
  scan->add_flag("--svg", scan_args.svg, "also write an SVG plot");
  scan->callback([&] { ophydro::cmd_scan_gamma(scan_args); });

  ophydro::CounterexampleArgs cex_args;
  auto* cex = app.add_subcommand(
      "counterexample", "matched-moment family with distinct decay rates");
  cex->add_option("--p", cex_args.p, "bias parameter")->required();
  cex->add_option("--epsilon-list", cex_args.epsilon_list, "epsilon values")
      ->required()
      ->delimiter(',');
  cex->add_option("--gamma", cex_args.gamma, "dissipation rate for the eigenvalue column");
  cex->add_option("--L", cex_args.L, "chain length");
  cex->add_option("--out", cex_args.out_dir, "output directory");
  cex->callback([&] { ophydro::cmd_counterexample(cex_args); });

  ophydro::RucCompareArgs ruc_args;
  auto* ruc = app.add_subcommand("ruc-compare",
                                 "brute-force circuit profiles vs the endpoint walk");
  ruc->add_option("--qubits", ruc_args.qubits, "chain width (<= 12)")->required();
  ruc->add_option("--depth", ruc_args.depth, "brickwork layers")->required();
  ruc->add_option("--realizations", ruc_args.realizations, "circuit samples")
      ->required();
  ruc->add_option("--seed", ruc_args.seed, "master seed");
  ruc->add_option("--offset", ruc_args.offset, "qubit-to-cell alignment (0 or 1)");
  ruc->add_option("--out", ruc_args.out_dir, "output directory");
  ruc->callback([&] { ophydro::cmd_ruc_compare(ruc_args); });

  ophydro::WalkArgs walk_args;
  auto* walk = app.add_subcommand("walk", "Monte Carlo endpoint walk histogram");
  walk->add_option("--p", walk_args.p, "bias parameter")->required();
  walk->add_option("--L", walk_args.L, "chain length")->required();
  walk->add_option("--steps", walk_args.steps, "time steps")->required();
  walk->add_option("--walkers", walk_args.walkers, "ensemble size");
  walk->add_option("--gamma", walk_args.gamma, "dissipation rate");
  walk->add_option("--seed", walk_args.seed, "master seed");
  walk->add_option("--out", walk_args.out_dir, "output directory");
  walk->callback([&] { ophydro::cmd_walk(walk_args); });

  ophydro::ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("--manifest", replay_args.manifest_path, "path to manifest.json")
      ->required();
  replay->add_option("--out", replay_args.out_dir, "output directory");
  replay->callback([&] { ophydro::cmd_replay(replay_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ophydro::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ophydro::convergence_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
