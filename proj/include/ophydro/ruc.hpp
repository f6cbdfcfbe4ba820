#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ophydro {

// Heisenberg-evolved operator on an n-qubit chain, stored as the dense block
// on the leading `active` qubits; the operator is exactly the identity on
// qubits > active. Qubit 1 is the most significant index bit of the block.
// Normalization convention: tr(O O^dag)/2^n = 1 for the seed.
struct OperatorState {
  int n_qubits = 0;
  int active = 0;
  Eigen::MatrixXcd op;

  // tr(O O^dag)/2^n, invariant under unitary conjugation
  double norm_sq() const;
};

// Pauli-Z on qubit 1 (tensored with identity), active region of one qubit.
OperatorState make_seed_operator(int n_qubits);

// Haar-distributed 4x4 unitary: QR of a complex Gaussian matrix with the
// R-diagonal phase fix.
Eigen::Matrix4cd haar_unitary(std::mt19937_64& gen);

// Conjugate the state by a gate on qubits (a, a+1): op <- U^dag op U.
// A gate with a == active extends the active region by one qubit first;
// a gate entirely beyond the active region is an exact no-op.
void apply_two_site_gate(OperatorState& s, const Eigen::Matrix4cd& u, int a);

// One brickwork layer of independent Haar gates. Odd layer_index places
// gates at (1,2),(3,4),...; even at (2,3),(4,5),.... Gates entirely outside
// the active region are skipped without consuming randomness.
void apply_brickwork_layer(OperatorState& s, int layer_index,
                           std::mt19937_64& gen);

// Full trajectory: states after layers 0..depth. Memory is depth+1 dense
// blocks; prefer run_ruc_ensemble for sweeps.
std::vector<OperatorState> evolve_realization(int n_qubits, int depth,
                                              std::uint64_t seed);

// Right-endpoint weight profile: weights[x-1] is the total squared Pauli
// coefficient on strings whose rightmost nontrivial qubit is x.
struct PauliWeightProfile {
  int t = 0;
  std::vector<double> weights;
  double identity_weight = 0.0;
  int realizations = 1;

  double total() const;
};

// Weights via the partial-trace purity chain W(x) = tr(O_x O_x^dag)/2^x,
// rho_R(x) = W(x) - W(x-1).
PauliWeightProfile endpoint_profile(const OperatorState& s, int t);

struct RucEnsembleResult {
  int n_qubits = 0;
  int depth = 0;
  int realizations = 0;
  std::uint64_t seed = 0;
  // index [layer][x-1]; layer runs 0..depth
  std::vector<PauliWeightProfile> mean;
  std::vector<std::vector<double>> std_error;
};

// Ensemble-averaged profiles, one state in memory at a time. Realizations
// are independent streams of the master seed; the average is accumulated in
// realization order so the result is independent of the thread count.
RucEnsembleResult run_ruc_ensemble(int n_qubits, int depth, int realizations,
                                   std::uint64_t seed, int n_threads = 0);

struct MeanWithError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Average weight transferred from Z_1 to right endpoint 2 by one Haar gate
// on a two-qubit chain; Haar expectation is (q^4-q^2)/(q^4-1) = 0.8 at q=2.
MeanWithError single_gate_spreading(int n_samples, std::uint64_t seed);

// Comparison of the averaged circuit profiles against the endpoint random
// walk, after merging qubits into two-qubit unit cells. alignment_offset
// shifts the cell boundaries: cell(x) = (x + offset + 1) / 2.
struct HydroComparison {
  int alignment_offset = 0;
  int n_cells = 0;
  int hydro_steps = 0;
  double front_velocity = 0.0;  // OLS slope of mean cell position per step
  double hydro_velocity = 0.0;  // v_B = p^2 - (1-p)^2 at p = 0.8
  std::vector<double> mean_cell_circuit;  // per hydro step tau = 0..steps
  std::vector<double> mean_cell_hydro;
  std::vector<double> width_circuit;  // endpoint standard deviation, cells
  std::vector<double> width_hydro;
  std::vector<double> tv_distance;  // total variation per step
};

HydroComparison compare_to_hydro(const RucEnsembleResult& run,
                                 int alignment_offset = 0,
                                 int min_realizations = 50);

}  // namespace ophydro
