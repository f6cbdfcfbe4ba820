#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ophydro {

// Each command writes its outputs plus manifest.json into out_dir and prints
// a one-line summary; validation failures throw validation_error (exit 2),
// numerical failures convergence_error (exit 3).

struct SpectrumArgs {
  double p = 0.8;
  int L = 100;
  std::optional<double> gamma;
  std::optional<int> ell;
  std::string cprime = "zero";  // zero | stochastic | <number>
  std::string out_dir = "run-spectrum";
  bool svg = false;
};
void cmd_spectrum(const SpectrumArgs& args);

struct AutocorrArgs {
  double p = 0.75;
  int L = 28;
  int n = 1;
  int steps = 400;
  std::string out_dir = "run-autocorr";
  bool svg = false;
};
void cmd_autocorr(const AutocorrArgs& args);

struct ScanGammaArgs {
  double p = 0.8;
  std::vector<int> L_list;
  std::string gamma_grid = "1e-3:1e-1:13";
  std::string out_dir = "run-scan-gamma";
  bool svg = false;
};
void cmd_scan_gamma(const ScanGammaArgs& args);

struct CounterexampleArgs {
  double p = 0.6;
  std::vector<double> epsilon_list;
  double gamma = 0.01;
  int L = 400;
  std::string out_dir = "run-counterexample";
};
void cmd_counterexample(const CounterexampleArgs& args);

struct RucCompareArgs {
  int qubits = 12;
  int depth = 8;
  int realizations = 200;
  std::uint64_t seed = 7;
  int offset = 0;  // qubit-to-cell alignment
  std::string out_dir = "run-ruc-compare";
};
void cmd_ruc_compare(const RucCompareArgs& args);

struct WalkArgs {
  double p = 0.8;
  int L = 200;
  int steps = 100;
  long walkers = 100000;
  double gamma = 0.0;
  std::uint64_t seed = 1;
  std::string out_dir = "run-walk";
};
void cmd_walk(const WalkArgs& args);

struct ReplayArgs {
  std::string manifest_path;
  std::string out_dir;  // empty -> "<manifest dir>-replay"
};
void cmd_replay(const ReplayArgs& args);

// "lo:hi:n" -> n log-spaced values inclusive, or a comma-separated list
std::vector<double> parse_gamma_grid(const std::string& spec);

}  // namespace ophydro
