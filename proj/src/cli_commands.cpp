#include "ophydro/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "ophydro/autocorr.hpp"
#include "ophydro/config.hpp"
#include "ophydro/csv.hpp"
#include "ophydro/errors.hpp"
#include "ophydro/manifest.hpp"
#include "ophydro/ruc.hpp"
#include "ophydro/spectral.hpp"
#include "ophydro/svg.hpp"
#include "ophydro/threading.hpp"
#include "ophydro/transfer_matrices.hpp"
#include "ophydro/tridiag_eigen.hpp"
#include "ophydro/walk_mc.hpp"

namespace ophydro {

namespace {

nlohmann::json tolerances_json() {
  const Tolerances t = default_tolerances();
  return {{"eigenvalue_abs", t.eigenvalue_abs},
          {"eigvec_residual", t.eigvec_residual},
          {"stochastic_colsum", t.stochastic_colsum},
          {"unit_sum", t.unit_sum},
          {"leading_negativity", t.leading_negativity}};
}

RunManifest base_manifest(const std::string& command, nlohmann::json parameters) {
  RunManifest m;
  m.command = command;
  m.parameters = std::move(parameters);
  m.tool_version = kToolVersion;
  m.timestamp = utc_timestamp_now();
  m.threads = default_thread_count();
  m.tolerances = tolerances_json();
  return m;
}

void emit(const std::string& dir, const std::string& name, const std::string& text,
          RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  write_text_file((std::filesystem::path(dir) / name).string(), text);
  manifest.outputs.push_back(name);
}

double parse_cprime(const std::string& spec, double p) {
  if (spec == "zero") return 0.0;
  if (spec == "stochastic") return p * p;
  try {
    std::size_t used = 0;
    const double v = std::stod(spec, &used);
    if (used != spec.size()) throw std::invalid_argument(spec);
    return v;
  } catch (const std::exception&) {
    throw validation_error("--cprime must be 'zero', 'stochastic' or a number");
  }
}

}  // namespace

std::vector<double> parse_gamma_grid(const std::string& spec) {
  if (spec.empty()) throw validation_error("empty gamma grid");
  std::vector<double> out;
  const auto parse_num = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw validation_error("bad number in gamma grid: '" + s + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw validation_error("gamma grid must be lo:hi:n or a comma list");
    const double lo = parse_num(spec.substr(0, c1));
    const double hi = parse_num(spec.substr(c1 + 1, c2 - c1 - 1));
    const int n = static_cast<int>(parse_num(spec.substr(c2 + 1)));
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
      throw validation_error("gamma grid needs 0 < lo < hi and n >= 2");
    const double step = (std::log(hi) - std::log(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + i * step));
    return out;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string tok =
        spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty()) throw validation_error("empty entry in gamma grid");
    out.push_back(parse_num(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw validation_error("empty gamma grid");
  return out;
}

void cmd_spectrum(const SpectrumArgs& args) {
  if (args.gamma && args.ell)
    throw validation_error("--gamma and --ell are mutually exclusive");

  nlohmann::json params = {{"p", args.p}, {"L", args.L}, {"svg", args.svg},
                           {"out", args.out_dir}};
  if (args.gamma) params["gamma"] = *args.gamma;
  if (args.ell) {
    params["ell"] = *args.ell;
    params["cprime"] = args.cprime;
  }
  RunManifest manifest = base_manifest("spectrum", params);

  CsvTable spec_csv;
  std::string summary;
  SvgChart chart;
  chart.x_label = "eigenvalue index";
  chart.y_label = "eigenvalue";

  if (!args.gamma && !args.ell) {
    const Spectrum numeric = eig_sym_tridiag(build_symmetric_transfer(args.p, args.L));
    const Spectrum analytic = analytic_spectrum(args.p, args.L);
    spec_csv.columns = {"index", "analytic", "numeric", "abs_error"};
    SvgSeries sn{"numeric", {}, {}, "", false, true}, sa{"analytic", {}, {}, "", false, false};
    for (int i = 0; i < args.L; ++i) {
      const double a = analytic.eigenvalues[i], v = numeric.eigenvalues[i];
      spec_csv.add_row({std::to_string(i), format_double(a), format_double(v),
                        format_double(std::abs(a - v))});
      sn.x.push_back(i);
      sn.y.push_back(v);
      sa.x.push_back(i);
      sa.y.push_back(a);
    }
    chart.title = "transfer spectrum, analytic vs numeric";
    chart.series = {sa, sn};
    summary = "lambda_max = " + format_double(numeric.eigenvalues[0]);
  } else {
    GaugedOperator op = args.gamma
                            ? make_dissipative_operator(args.p, *args.gamma, 1.0, args.L)
                            : make_truncated_operator(args.p, *args.ell,
                                                      parse_cprime(args.cprime, args.p));
    const Spectrum numeric = eig_sym_tridiag(op.sym);
    spec_csv.columns = {"index", "eigenvalue"};
    SvgSeries sn{"numeric", {}, {}, "", false, true};
    for (std::size_t i = 0; i < numeric.eigenvalues.size(); ++i) {
      spec_csv.add_row({std::to_string(i), format_double(numeric.eigenvalues[i])});
      sn.x.push_back(static_cast<double>(i));
      sn.y.push_back(numeric.eigenvalues[i]);
    }
    chart.title = args.gamma ? "dissipative spectrum" : "truncated spectrum";
    chart.series = {sn};

    const LeadingPair lead = leading_pair(op);
    CsvTable lead_csv;
    lead_csv.columns = {"site", "density"};
    for (std::size_t i = 0; i < lead.vector.size(); ++i)
      lead_csv.add_row({std::to_string(i + 1), format_double(lead.vector[i])});
    emit(args.out_dir, "leading.csv", render_csv(lead_csv), manifest);
    summary = "lambda_max = " + format_double(lead.eigenvalue);
    if (args.gamma) {
      const double est = peak_estimate(lead.eigenvalue, *args.gamma);
      const auto peak =
          std::max_element(lead.vector.begin(), lead.vector.end()) - lead.vector.begin() + 1;
      summary += ", eigenvector peak at x = " + std::to_string(peak) +
                 " (estimate " + format_double(est) + ")";
    }
  }

  emit(args.out_dir, "spectrum.csv", render_csv(spec_csv), manifest);
  if (args.svg) emit(args.out_dir, "spectrum.svg", render_svg(chart), manifest);
  write_manifest(args.out_dir, manifest);
  std::printf("spectrum: %s -> %s\n", summary.c_str(), args.out_dir.c_str());
}

void cmd_autocorr(const AutocorrArgs& args) {
  if (args.n > args.L) throw validation_error("--n must not exceed --L");
  if (args.steps < 0) throw validation_error("--steps must be >= 0");

  RunManifest manifest = base_manifest(
      "autocorr", {{"p", args.p},
                   {"L", args.L},
                   {"n", args.n},
                   {"steps", args.steps},
                   {"svg", args.svg},
                   {"out", args.out_dir}});

  const EvolveResult evolved =
      evolve_density(build_transfer(args.p, args.L), args.n, args.steps);

  CsvTable series;
  series.columns = {"t", "exact", "mode_sum", "asymptote"};
  SvgSeries exact_pts{"exact", {}, {}, "#1f77b4", false, true};
  SvgSeries asym_line{"asymptote", {}, {}, "#d62728", false, false};
  for (int t = 0; t <= args.steps; ++t) {
    const double exact = evolved.return_series[t];
    const double mode_sum = spectral_return_sum(args.p, args.L, t, args.n);
    std::string asym_cell;
    if (t >= 1) {
      const double asym = asymptotic_return_site(args.p, t, args.L, args.n);
      asym_cell = format_double(asym);
      asym_line.x.push_back(t);
      asym_line.y.push_back(asym);
    }
    series.add_row({std::to_string(t), format_double(exact), format_double(mode_sum),
                    asym_cell});
    exact_pts.x.push_back(t);
    exact_pts.y.push_back(exact);
  }
  emit(args.out_dir, "series.csv", render_csv(series), manifest);

  const PlateauReport plateau = plateau_report(args.p, args.n, args.L);
  const double gbar_formula = -std::log(4.0 * args.p * (1.0 - args.p));
  const int fit_begin = 10;
  const int fit_end = std::min(args.steps, default_fit_window_end(args.p, args.L));
  std::string fit_rate, fit_power, fit_rms;
  if (fit_end >= fit_begin + 3) {
    std::vector<double> decaying(evolved.return_series.begin(),
                                 evolved.return_series.end());
    for (double& v : decaying) v -= plateau.plateau_value;
    const DecayFit fit = fit_decay_rate(decaying, fit_begin, fit_end);
    fit_rate = format_double(fit.rate);
    fit_power = format_double(fit.power_exponent);
    fit_rms = format_double(fit.residual_rms);
  }
  CsvTable summary;
  summary.columns = {"plateau_value", "t_plateau",     "t_plateau_closed_form",
                     "gbar_fit",      "gbar_formula",  "fit_window_begin",
                     "fit_window_end", "fit_power",    "fit_residual_rms"};
  summary.add_row({format_double(plateau.plateau_value), format_double(plateau.t_plateau),
                   format_double(plateau.t_plateau_paper_formula), fit_rate,
                   format_double(gbar_formula), std::to_string(fit_begin),
                   std::to_string(fit_end), fit_power, fit_rms});
  emit(args.out_dir, "summary.csv", render_csv(summary), manifest);

  if (args.svg) {
    SvgChart chart;
    chart.title = "endpoint return probability";
    chart.x_label = "t";
    chart.y_label = "autocorrelation";
    chart.log_y = true;
    chart.series = {exact_pts, asym_line};
    emit(args.out_dir, "autocorr.svg", render_svg(chart), manifest);
  }
  write_manifest(args.out_dir, manifest);
  std::printf("autocorr: plateau = %s, gbar_fit = %s -> %s\n",
              format_double(plateau.plateau_value).c_str(),
              fit_rate.empty() ? "n/a" : fit_rate.c_str(), args.out_dir.c_str());
}

void cmd_scan_gamma(const ScanGammaArgs& args) {
  if (args.L_list.empty()) throw validation_error("--L-list must not be empty");
  const std::vector<double> grid = parse_gamma_grid(args.gamma_grid);
  for (double g : grid)
    if (g < 0.0) throw validation_error("gamma must be >= 0");

  RunManifest manifest = base_manifest(
      "scan-gamma", {{"p", args.p},
                     {"L_list", args.L_list},
                     {"gamma_grid", args.gamma_grid},
                     {"svg", args.svg},
                     {"out", args.out_dir}});

  CsvTable scan;
  scan.columns = {"gamma", "L", "lambda_max"};
  SvgChart chart;
  chart.title = "leading dissipative eigenvalue";
  chart.x_label = "gamma";
  chart.y_label = "lambda_max";
  chart.log_x = true;
  for (int L : args.L_list) {
    SvgSeries curve{"L = " + std::to_string(L), {}, {}, "", false, false};
    for (double gamma : grid) {
      // gamma = 0 keeps the matrix stochastic: leading eigenvalue exactly 1
      const double lambda =
          gamma == 0.0
              ? 1.0
              : largest_sym_tridiag_eigenvalue(
                    make_dissipative_operator(args.p, gamma, 1.0, L).sym);
      scan.add_row({format_double(gamma), std::to_string(L), format_double(lambda)});
      if (gamma > 0.0) {
        curve.x.push_back(gamma);
        curve.y.push_back(lambda);
      }
    }
    chart.series.push_back(std::move(curve));
  }
  const double reference = 4.0 * args.p * (1.0 - args.p);
  double gmin = grid[0], gmax = grid[0];
  for (double g : grid)
    if (g > 0.0) {
      gmin = std::min(gmin == 0.0 ? g : gmin, g);
      gmax = std::max(gmax, g);
    }
  chart.series.push_back(
      {"4p(1-p)", {gmin, gmax}, {reference, reference}, "#333333", true, false});

  emit(args.out_dir, "scan.csv", render_csv(scan), manifest);
  if (args.svg) emit(args.out_dir, "scan.svg", render_svg(chart), manifest);
  write_manifest(args.out_dir, manifest);
  std::printf("scan-gamma: %zu gammas x %zu sizes, reference 4p(1-p) = %s -> %s\n",
              grid.size(), args.L_list.size(), format_double(reference).c_str(),
              args.out_dir.c_str());
}

void cmd_counterexample(const CounterexampleArgs& args) {
  if (args.epsilon_list.empty()) throw validation_error("--epsilon-list must not be empty");
  if (!(args.gamma > 0.0)) throw validation_error("--gamma must be > 0");
  // the triangular spectrum is diagonal; L must push the right-edge mode
  // e^(-gamma L) below the bulk-entry value
  if (args.L < 4) throw validation_error("--L too small");

  RunManifest manifest = base_manifest(
      "counterexample", {{"p", args.p},
                         {"epsilon_list", args.epsilon_list},
                         {"gamma", args.gamma},
                         {"L", args.L},
                         {"out", args.out_dir}});

  const DiagonalWeight dissipation = build_dissipation(args.gamma, 1.0, args.L);
  CsvTable table;
  table.columns = {"epsilon",       "v_b",         "diffusion",
                   "third_moment",  "lambda_gamma", "lambda_limit"};
  double v_b0 = 0.0, d0 = 0.0;
  bool first = true;
  for (double eps : args.epsilon_list) {
    const BandedMatrix m = build_counterexample(args.p, eps, args.L);
    const JumpMoments mom = jump_moments(m);
    const LeadingPair lead = leading_pair(m, &dissipation);
    const double limit = 1.0 - args.p - eps;
    table.add_row({format_double(eps), format_double(mom.v_b),
                   format_double(mom.diffusion), format_double(mom.higher),
                   format_double(lead.eigenvalue), format_double(limit)});
    if (first) {
      v_b0 = mom.v_b;
      d0 = mom.diffusion;
      first = false;
    } else if (std::abs(mom.v_b - v_b0) > 1e-14 || std::abs(mom.diffusion - d0) > 1e-14) {
      throw convergence_error("counterexample: v_B or D drifted across epsilon");
    }
  }
  emit(args.out_dir, "table.csv", render_csv(table), manifest);
  write_manifest(args.out_dir, manifest);
  std::printf("counterexample: v_B = %s, D = %s constant over %zu epsilons -> %s\n",
              format_double(v_b0).c_str(), format_double(d0).c_str(),
              args.epsilon_list.size(), args.out_dir.c_str());
}

void cmd_ruc_compare(const RucCompareArgs& args) {
  RunManifest manifest = base_manifest(
      "ruc-compare", {{"qubits", args.qubits},
                      {"depth", args.depth},
                      {"realizations", args.realizations},
                      {"seed", args.seed},
                      {"offset", args.offset},
                      {"out", args.out_dir}});
  manifest.seeds = {args.seed};

  const RucEnsembleResult run =
      run_ruc_ensemble(args.qubits, args.depth, args.realizations, args.seed);

  CsvTable profiles;
  profiles.columns = {"t", "x", "mean", "stderr", "realizations"};
  for (int t = 0; t <= run.depth; ++t)
    for (int x = 1; x <= run.n_qubits; ++x)
      profiles.add_row({std::to_string(t), std::to_string(x),
                        format_double(run.mean[t].weights[x - 1]),
                        format_double(run.std_error[t][x - 1]),
                        std::to_string(run.realizations)});
  emit(args.out_dir, "profiles.csv", render_csv(profiles), manifest);

  std::string note;
  if (args.realizations >= 50 && args.depth >= 2) {
    const HydroComparison cmp = compare_to_hydro(run, args.offset);
    CsvTable hydro;
    hydro.columns = {"tau",          "mean_cell_circuit", "mean_cell_hydro",
                     "width_circuit", "width_hydro",      "tv_distance"};
    for (int tau = 0; tau <= cmp.hydro_steps; ++tau)
      hydro.add_row({std::to_string(tau), format_double(cmp.mean_cell_circuit[tau]),
                     format_double(cmp.mean_cell_hydro[tau]),
                     format_double(cmp.width_circuit[tau]),
                     format_double(cmp.width_hydro[tau]),
                     format_double(cmp.tv_distance[tau])});
    emit(args.out_dir, "hydro.csv", render_csv(hydro), manifest);

    CsvTable summary;
    summary.columns = {"front_velocity", "hydro_velocity", "n_cells",
                       "alignment_offset"};
    summary.add_row({format_double(cmp.front_velocity), format_double(cmp.hydro_velocity),
                     std::to_string(cmp.n_cells), std::to_string(cmp.alignment_offset)});
    emit(args.out_dir, "summary.csv", render_csv(summary), manifest);
    note = "front velocity " + format_double(cmp.front_velocity) + " vs hydro " +
           format_double(cmp.hydro_velocity);
  } else {
    note = "hydro comparison skipped (needs >= 50 realizations and depth >= 2)";
  }
  write_manifest(args.out_dir, manifest);
  std::printf("ruc-compare: %s -> %s\n", note.c_str(), args.out_dir.c_str());
}

void cmd_walk(const WalkArgs& args) {
  if (args.walkers < 1) throw validation_error("--walkers must be >= 1");
  if (args.steps < 0) throw validation_error("--steps must be >= 0");

  RunManifest manifest = base_manifest(
      "walk", {{"p", args.p},
               {"L", args.L},
               {"steps", args.steps},
               {"walkers", args.walkers},
               {"gamma", args.gamma},
               {"seed", args.seed},
               {"out", args.out_dir}});
  manifest.seeds = {args.seed};

  WalkEnsemble e =
      make_walk_ensemble(static_cast<std::size_t>(args.walkers), 1, args.L, args.seed);
  for (int t = 0; t < args.steps; ++t) step_ensemble(e, args.p, args.gamma);
  const DensityWithErrors mc = ensemble_density(e);

  const DiagonalWeight dissipation = build_dissipation(args.gamma, 1.0, args.L);
  const EvolveResult exact =
      evolve_density(build_transfer(args.p, args.L), 1, args.steps, {args.steps},
                     args.gamma > 0.0 ? &dissipation : nullptr);

  CsvTable hist;
  hist.columns = {"x", "weight", "stderr", "exact"};
  for (int x = 1; x <= args.L; ++x)
    hist.add_row({std::to_string(x), format_double(mc.density.values[x - 1]),
                  format_double(mc.std_error[x - 1]),
                  format_double(exact.checkpoints[0].values[x - 1])});
  emit(args.out_dir, "histogram.csv", render_csv(hist), manifest);

  std::string note = "mass = " + format_double(mc.density.total_mass);
  if (args.gamma == 0.0 && args.steps > 0) {
    const Chi2Report chi2 = chi2_compare(e, exact.checkpoints[0].values);
    CsvTable summary;
    summary.columns = {"chi2", "dof", "p_value", "bins"};
    summary.add_row({format_double(chi2.chi2), std::to_string(chi2.dof),
                     format_double(chi2.p_value), std::to_string(chi2.bins_used)});
    emit(args.out_dir, "summary.csv", render_csv(summary), manifest);
    note += ", chi2 p-value = " + format_double(chi2.p_value);
  }
  write_manifest(args.out_dir, manifest);
  std::printf("walk: %s -> %s\n", note.c_str(), args.out_dir.c_str());
}

void cmd_replay(const ReplayArgs& args) {
  const RunManifest m = read_manifest(args.manifest_path);
  std::string out = args.out_dir;
  if (out.empty()) {
    const auto dir = std::filesystem::path(args.manifest_path).parent_path();
    out = (dir.empty() ? std::filesystem::path(".") : dir).string() + "-replay";
  }
  const nlohmann::json& p = m.parameters;
  try {
    if (m.command == "spectrum") {
      SpectrumArgs a;
      a.p = p.at("p").get<double>();
      a.L = p.at("L").get<int>();
      if (p.contains("gamma")) a.gamma = p.at("gamma").get<double>();
      if (p.contains("ell")) {
        a.ell = p.at("ell").get<int>();
        a.cprime = p.at("cprime").get<std::string>();
      }
      a.svg = p.at("svg").get<bool>();
      a.out_dir = out;
      cmd_spectrum(a);
    } else if (m.command == "autocorr") {
      AutocorrArgs a;
      a.p = p.at("p").get<double>();
      a.L = p.at("L").get<int>();
      a.n = p.at("n").get<int>();
      a.steps = p.at("steps").get<int>();
      a.svg = p.at("svg").get<bool>();
      a.out_dir = out;
      cmd_autocorr(a);
    } else if (m.command == "scan-gamma") {
      ScanGammaArgs a;
      a.p = p.at("p").get<double>();
      a.L_list = p.at("L_list").get<std::vector<int>>();
      a.gamma_grid = p.at("gamma_grid").get<std::string>();
      a.svg = p.at("svg").get<bool>();
      a.out_dir = out;
      cmd_scan_gamma(a);
    } else if (m.command == "counterexample") {
      CounterexampleArgs a;
      a.p = p.at("p").get<double>();
      a.epsilon_list = p.at("epsilon_list").get<std::vector<double>>();
      a.gamma = p.at("gamma").get<double>();
      a.L = p.at("L").get<int>();
      a.out_dir = out;
      cmd_counterexample(a);
    } else if (m.command == "ruc-compare") {
      RucCompareArgs a;
      a.qubits = p.at("qubits").get<int>();
      a.depth = p.at("depth").get<int>();
      a.realizations = p.at("realizations").get<int>();
      a.seed = p.at("seed").get<std::uint64_t>();
      a.offset = p.at("offset").get<int>();
      a.out_dir = out;
      cmd_ruc_compare(a);
    } else if (m.command == "walk") {
      WalkArgs a;
      a.p = p.at("p").get<double>();
      a.L = p.at("L").get<int>();
      a.steps = p.at("steps").get<int>();
      a.walkers = p.at("walkers").get<long>();
      a.gamma = p.at("gamma").get<double>();
      a.seed = p.at("seed").get<std::uint64_t>();
      a.out_dir = out;
      cmd_walk(a);
    } else {
      throw validation_error("replay: unknown command '" + m.command + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("replay: manifest parameters invalid: ") +
                           e.what());
  }
}

}  // namespace ophydro
