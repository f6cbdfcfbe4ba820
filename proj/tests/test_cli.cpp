#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ophydro/autocorr.hpp"
#include "ophydro/cli_commands.hpp"
#include "ophydro/config.hpp"
#include "ophydro/errors.hpp"
#include "ophydro/manifest.hpp"
#include "ophydro/spectral.hpp"

#include "test_helpers.hpp"

using namespace ophydro;
using ophydro_test::CsvFile;
using ophydro_test::load_csv;
using ophydro_test::rel_diff;
using ophydro_test::slurp;
using ophydro_test::temp_run_dir;

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OPHYDRO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("spectrum command, plain transfer matrix") {
  const std::string dir = temp_run_dir("cli_spectrum_plain");
  SpectrumArgs args;
  args.p = 0.8;
  args.L = 64;
  args.out_dir = dir;
  cmd_spectrum(args);

  const CsvFile spec = load_csv(path_in(dir, "spectrum.csv"));
  REQUIRE(spec.rows.size() == 64);
  double max_err = 0.0;
  for (std::size_t r = 0; r < spec.rows.size(); ++r)
    max_err = std::max(max_err, spec.number(r, "abs_error"));
  CHECK(max_err < 1e-10);
  CHECK(spec.number(0, "analytic") == 1.0);

  const RunManifest m = read_manifest(path_in(dir, "manifest.json"));
  CHECK(m.command == "spectrum");
  CHECK(m.parameters.at("p").get<double>() == 0.8);
  CHECK(std::find(m.outputs.begin(), m.outputs.end(), "spectrum.csv") != m.outputs.end());
  CHECK(m.tolerances.contains("eigenvalue_abs"));
  CHECK(m.threads >= 1);
}

TEST_CASE("spectrum command, dissipative mode") {
  const std::string dir = temp_run_dir("cli_spectrum_gamma");
  SpectrumArgs args;
  args.p = 0.8;
  args.L = 500;
  args.gamma = 0.006;
  args.out_dir = dir;
  cmd_spectrum(args);

  const CsvFile spec = load_csv(path_in(dir, "spectrum.csv"));
  REQUIRE(spec.rows.size() == 500);
  CHECK(std::fabs(spec.number(0, "eigenvalue") - 0.6107116265989236) < 1e-10);

  const CsvFile lead = load_csv(path_in(dir, "leading.csv"));
  REQUIRE(lead.rows.size() == 500);
  std::size_t argmax = 0;
  double total = 0.0;
  for (std::size_t r = 0; r < lead.rows.size(); ++r) {
    const double d = lead.number(r, "density");
    total += d;
    if (d > lead.number(argmax, "density")) argmax = r;
  }
  CHECK(lead.number(argmax, "site") == 82.0);
  CHECK(rel_diff(lead.number(82 - 1, "density"), 0.0398723557249307) < 1e-9);
  CHECK(std::fabs(total - 1.0) < 1e-9);
}

TEST_CASE("spectrum command, truncated mode") {
  const std::string dir = temp_run_dir("cli_spectrum_ell");
  SpectrumArgs args;
  args.p = 0.8;
  args.L = 500;  // ignored by the truncated operator, still validated
  args.ell = 100;
  args.cprime = "stochastic";
  args.out_dir = dir;
  cmd_spectrum(args);

  const CsvFile spec = load_csv(path_in(dir, "spectrum.csv"));
  REQUIRE(spec.rows.size() == 100);
  CHECK(std::fabs(spec.number(0, "eigenvalue") - 1.0) < 1e-11);

  SpectrumArgs open = args;
  open.out_dir = temp_run_dir("cli_spectrum_ell_open");
  open.cprime = "zero";
  cmd_spectrum(open);
  const CsvFile open_spec = load_csv(path_in(open.out_dir, "spectrum.csv"));
  CHECK(open_spec.number(0, "eigenvalue") < 0.64);

  SpectrumArgs conflict = args;
  conflict.gamma = 0.01;
  CHECK_THROWS_AS(cmd_spectrum(conflict), validation_error);

  SpectrumArgs bad_cprime = args;
  bad_cprime.cprime = "abc";
  CHECK_THROWS_AS(cmd_spectrum(bad_cprime), validation_error);
}

TEST_CASE("autocorr command writes the series and the summary") {
  const std::string dir = temp_run_dir("cli_autocorr");
  AutocorrArgs args;
  args.p = 0.75;
  args.L = 28;
  args.n = 1;
  args.steps = 400;
  args.out_dir = dir;
  cmd_autocorr(args);

  const CsvFile series = load_csv(path_in(dir, "series.csv"));
  REQUIRE(series.rows.size() == 401);
  CHECK(series.number(0, "exact") == 1.0);
  CHECK(std::fabs(series.number(0, "mode_sum") - 1.0) < 1e-9);
  CHECK(series.rows[0][series.column("asymptote")].empty());
  CHECK(rel_diff(series.number(50, "exact"), series.number(50, "mode_sum")) < 1e-9);
  // the asymptote column is the bulk formula; at L = 28 it only tracks the
  // exact series loosely, so pin the column to the library value instead
  CHECK(rel_diff(series.number(50, "asymptote"), asymptotic_return(0.75, 50, 28)) <
        1e-12);
  CHECK(rel_diff(series.number(10, "exact"), series.number(10, "asymptote")) < 0.3);

  const CsvFile summary = load_csv(path_in(dir, "summary.csv"));
  REQUIRE(summary.rows.size() == 1);
  CHECK(rel_diff(summary.number(0, "plateau_value"),
                 steady_state_overlap(0.75, 1, 28)) < 1e-12);
  CHECK(std::fabs(summary.number(0, "t_plateau") - 213.8551340411594) < 1e-9);
  CHECK(std::fabs(summary.number(0, "t_plateau_closed_form") - (-325.8551340411595)) <
        1e-9);
  const double formula = summary.number(0, "gbar_formula");
  CHECK(rel_diff(formula, -std::log(0.75)) < 1e-12);
  CHECK(rel_diff(summary.number(0, "gbar_fit"), formula) < 0.01);
  CHECK(summary.number(0, "fit_window_begin") == 10.0);
  CHECK(summary.number(0, "fit_window_end") == 149.0);
  const double power = summary.number(0, "fit_power");
  CHECK(power > 0.5);
  CHECK(power < 2.5);

  AutocorrArgs bad = args;
  bad.n = 29;
  CHECK_THROWS_AS(cmd_autocorr(bad), validation_error);
}

TEST_CASE("autocorr command with a window too short to fit") {
  const std::string dir = temp_run_dir("cli_autocorr_short");
  AutocorrArgs args;
  args.p = 0.75;
  args.L = 28;
  args.steps = 0;
  args.out_dir = dir;
  cmd_autocorr(args);

  const CsvFile series = load_csv(path_in(dir, "series.csv"));
  REQUIRE(series.rows.size() == 1);
  CHECK(series.number(0, "exact") == 1.0);
  const CsvFile summary = load_csv(path_in(dir, "summary.csv"));
  CHECK(summary.rows[0][summary.column("gbar_fit")].empty());
  CHECK(summary.rows[0][summary.column("fit_power")].empty());
}

TEST_CASE("gamma grid parsing") {
  const std::vector<double> log_grid = parse_gamma_grid("1e-3:1e-1:5");
  REQUIRE(log_grid.size() == 5);
  CHECK(rel_diff(log_grid.front(), 1e-3) < 1e-12);
  CHECK(rel_diff(log_grid.back(), 1e-1) < 1e-12);
  for (int i = 0; i + 2 < 5; ++i)
    CHECK(rel_diff(log_grid[i + 1] / log_grid[i], log_grid[i + 2] / log_grid[i + 1]) <
          1e-10);

  const std::vector<double> list = parse_gamma_grid("0.01,0.02");
  REQUIRE(list.size() == 2);
  CHECK(list[0] == 0.01);
  CHECK(list[1] == 0.02);

  CHECK_THROWS_AS(parse_gamma_grid(""), validation_error);
  CHECK_THROWS_AS(parse_gamma_grid("x"), validation_error);
  CHECK_THROWS_AS(parse_gamma_grid("1:2"), validation_error);
  CHECK_THROWS_AS(parse_gamma_grid("0:1:5"), validation_error);
  CHECK_THROWS_AS(parse_gamma_grid("1e-2:1e-3:4"), validation_error);
  CHECK_THROWS_AS(parse_gamma_grid("0.1,,0.2"), validation_error);
}

TEST_CASE("scan-gamma command") {
  const std::string dir = temp_run_dir("cli_scan");
  ScanGammaArgs args;
  args.p = 0.8;
  args.L_list = {100, 300};
  args.gamma_grid = "1e-3:1e-1:5";
  args.out_dir = dir;
  cmd_scan_gamma(args);

  const CsvFile scan = load_csv(path_in(dir, "scan.csv"));
  REQUIRE(scan.rows.size() == 10);
  for (int block = 0; block < 2; ++block) {
    double prev = 2.0;
    for (int i = 0; i < 5; ++i) {
      const std::size_t r = block * 5 + i;
      const double lam = scan.number(r, "lambda_max");
      CHECK(lam > 0.0);
      CHECK(lam <= 1.0);
      CHECK(lam < prev);  // releasing more dissipation only lowers the eigenvalue
      prev = lam;
      CHECK(scan.number(r, "L") == (block == 0 ? 100.0 : 300.0));
    }
  }

  ScanGammaArgs bad = args;
  bad.L_list = {};
  CHECK_THROWS_AS(cmd_scan_gamma(bad), validation_error);
}

TEST_CASE("counterexample command holds transport moments fixed") {
  const std::string dir = temp_run_dir("cli_counterexample");
  CounterexampleArgs args;
  args.p = 0.6;
  args.epsilon_list = {0.0, 0.02, 0.05};
  args.gamma = 0.01;
  args.L = 400;
  args.out_dir = dir;
  cmd_counterexample(args);

  const CsvFile table = load_csv(path_in(dir, "table.csv"));
  REQUIRE(table.rows.size() == 3);
  const double third_expected[3] = {0.45, 0.47, 0.50};
  const double limit_expected[3] = {0.40, 0.38, 0.35};
  for (int r = 0; r < 3; ++r) {
    CHECK(std::fabs(table.number(r, "v_b") - 0.9) < 1e-14);
    CHECK(std::fabs(table.number(r, "diffusion") - 0.75) < 1e-14);
    CHECK(std::fabs(table.number(r, "third_moment") - third_expected[r]) < 1e-12);
    CHECK(std::fabs(table.number(r, "lambda_limit") - limit_expected[r]) < 1e-12);
    // triangular spectrum: the dissipative eigenvalue is exactly e^-gamma times
    // the zero-jump weight
    CHECK(rel_diff(table.number(r, "lambda_gamma"),
                   std::exp(-0.01) * limit_expected[r]) < 1e-9);
  }

  CounterexampleArgs bad = args;
  bad.epsilon_list = {0.2};  // outside the admissible window at p = 0.6
  CHECK_THROWS_AS(cmd_counterexample(bad), validation_error);
}

TEST_CASE("ruc-compare command") {
  const std::string dir = temp_run_dir("cli_ruc");
  RucCompareArgs args;
  args.qubits = 8;
  args.depth = 6;
  args.realizations = 60;
  args.seed = 3;
  args.out_dir = dir;
  cmd_ruc_compare(args);

  const CsvFile profiles = load_csv(path_in(dir, "profiles.csv"));
  REQUIRE(profiles.rows.size() == 7 * 8);
  // layer 0 is the seed delta
  CHECK(profiles.number(0, "mean") == 1.0);
  for (int x = 2; x <= 8; ++x) CHECK(profiles.number(x - 1, "mean") == 0.0);

  const CsvFile hydro = load_csv(path_in(dir, "hydro.csv"));
  REQUIRE(hydro.rows.size() == 4);  // tau = 0..3
  CHECK(hydro.number(0, "tv_distance") == 0.0);

  const CsvFile summary = load_csv(path_in(dir, "summary.csv"));
  CHECK(std::fabs(summary.number(0, "front_velocity") - 0.6) < 0.15);
  CHECK(summary.number(0, "hydro_velocity") == doctest::Approx(0.6).epsilon(1e-14));

  // a rerun with the same seed reproduces the profiles byte for byte
  RucCompareArgs again = args;
  again.out_dir = temp_run_dir("cli_ruc_again");
  cmd_ruc_compare(again);
  CHECK(slurp(path_in(dir, "profiles.csv")) ==
        slurp(path_in(again.out_dir, "profiles.csv")));
}

TEST_CASE("walk command") {
  const std::string dir = temp_run_dir("cli_walk");
  WalkArgs args;
  args.p = 0.8;
  args.L = 120;
  args.steps = 60;
  args.walkers = 50000;
  args.gamma = 0.0;
  args.seed = 1;
  args.out_dir = dir;
  cmd_walk(args);

  const CsvFile hist = load_csv(path_in(dir, "histogram.csv"));
  REQUIRE(hist.rows.size() == 120);
  double mass = 0.0, exact_mass = 0.0;
  for (std::size_t r = 0; r < hist.rows.size(); ++r) {
    mass += hist.number(r, "weight");
    exact_mass += hist.number(r, "exact");
  }
  CHECK(std::fabs(mass - 1.0) < 1e-9);
  CHECK(std::fabs(exact_mass - 1.0) < 1e-9);

  const CsvFile summary = load_csv(path_in(dir, "summary.csv"));
  CHECK(summary.number(0, "p_value") > 1e-3);
  CHECK(summary.number(0, "dof") >= 5.0);

  // dissipative run: no chi-squared summary, reduced mass
  WalkArgs damped = args;
  damped.gamma = 0.02;
  damped.L = 60;
  damped.steps = 40;
  damped.walkers = 20000;
  damped.out_dir = temp_run_dir("cli_walk_damped");
  cmd_walk(damped);
  CHECK(!std::filesystem::exists(path_in(damped.out_dir, "summary.csv")));
  const CsvFile damped_hist = load_csv(path_in(damped.out_dir, "histogram.csv"));
  double damped_mass = 0.0;
  for (std::size_t r = 0; r < damped_hist.rows.size(); ++r)
    damped_mass += damped_hist.number(r, "weight");
  CHECK(damped_mass < 0.9);
}

TEST_CASE("replay reproduces a recorded run byte for byte") {
  const std::string dir = temp_run_dir("cli_replay_src");
  AutocorrArgs args;
  args.p = 0.75;
  args.L = 28;
  args.n = 1;
  args.steps = 120;
  args.out_dir = dir;
  cmd_autocorr(args);

  const std::string out = temp_run_dir("cli_replay_out");
  cmd_replay({path_in(dir, "manifest.json"), out});
  CHECK(slurp(path_in(dir, "series.csv")) == slurp(path_in(out, "series.csv")));
  CHECK(slurp(path_in(dir, "summary.csv")) == slurp(path_in(out, "summary.csv")));

  const std::string wdir = temp_run_dir("cli_replay_walk_src");
  WalkArgs wargs;
  wargs.p = 0.8;
  wargs.L = 40;
  wargs.steps = 30;
  wargs.walkers = 10000;
  wargs.seed = 9;
  wargs.out_dir = wdir;
  cmd_walk(wargs);
  const std::string wout = temp_run_dir("cli_replay_walk_out");
  cmd_replay({path_in(wdir, "manifest.json"), wout});
  CHECK(slurp(path_in(wdir, "histogram.csv")) == slurp(path_in(wout, "histogram.csv")));
  CHECK(slurp(path_in(wdir, "summary.csv")) == slurp(path_in(wout, "summary.csv")));

  // a manifest naming an unknown command is rejected
  const std::string bogus_dir = temp_run_dir("cli_replay_bogus");
  RunManifest bogus;
  bogus.command = "frobnicate";
  bogus.tool_version = kToolVersion;
  write_manifest(bogus_dir, bogus);
  CHECK_THROWS_AS(cmd_replay({path_in(bogus_dir, "manifest.json"), ""}),
                  validation_error);
}

TEST_CASE("executable exit codes") {
  const std::string ok_dir = temp_run_dir("cli_exit_ok");
  CHECK(run_cli("spectrum --p 0.8 --L 16 --out " + ok_dir) == 0);
  CHECK(std::filesystem::exists(path_in(ok_dir, "manifest.json")));

  const std::string bad_dir = temp_run_dir("cli_exit_bad");
  CHECK(run_cli("spectrum --p 1.5 --L 16 --out " + bad_dir) == 2);
  CHECK(run_cli("spectrum --p 0.8") == 2);       // missing required flag
  CHECK(run_cli("no-such-subcommand") == 2);     // parse error
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("walk --p 0.8 --L 10 --steps 5 --walkers 200 --seed 2 --out " +
                temp_run_dir("cli_exit_walk")) == 0);
}
