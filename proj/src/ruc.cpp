#include "ophydro/ruc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ophydro/autocorr.hpp"
#include "ophydro/errors.hpp"
#include "ophydro/rng.hpp"
#include "ophydro/threading.hpp"
#include "ophydro/transfer_matrices.hpp"

namespace ophydro {

namespace {

constexpr int kMaxQubits = 12;  // 4^n complex entries; 12 -> 256 MiB

std::uint64_t realization_key(std::uint64_t seed, std::uint64_t r) {
  return mix64(seed ^ mix64(r ^ 0x52554355ULL));
}

// widen the active block by one identity qubit (new least significant bit)
void extend_active(OperatorState& s) {
  const long n = s.op.rows();
  Eigen::MatrixXcd bigger = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) {
      bigger(2 * i, 2 * j) = s.op(i, j);
      bigger(2 * i + 1, 2 * j + 1) = s.op(i, j);
    }
  s.op.swap(bigger);
  ++s.active;
}

}  // namespace

double OperatorState::norm_sq() const { return op.squaredNorm() / std::pow(2.0, active); }

OperatorState make_seed_operator(int n_qubits) {
  if (n_qubits < 2 || n_qubits > kMaxQubits)
    throw validation_error("make_seed_operator: n_qubits outside [2, 12]");
  OperatorState s;
  s.n_qubits = n_qubits;
  s.active = 1;
  s.op = Eigen::MatrixXcd::Zero(2, 2);
  s.op(0, 0) = 1.0;
  s.op(1, 1) = -1.0;
  return s;
}

Eigen::Matrix4cd haar_unitary(std::mt19937_64& gen) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix4cd g;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) g(i, j) = std::complex<double>(gauss(gen), gauss(gen));
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(g);
  Eigen::Matrix4cd q = qr.householderQ();
  const Eigen::Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 4; ++j) {
    const std::complex<double> d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

void apply_two_site_gate(OperatorState& s, const Eigen::Matrix4cd& u, int a) {
  if (a < 1 || a + 1 > s.n_qubits)
    throw validation_error("apply_two_site_gate: gate off the chain");
  if (a > s.active) return;  // conjugating the identity
  if (a == s.active) extend_active(s);

  const long n = s.op.rows();
  const long S = 1L << (s.active - a - 1);  // stride of the low gate bit
  const long H = n / (4 * S);
  const Eigen::Matrix4cd udag = u.adjoint();

  // rows: O <- U^dag O
  Eigen::RowVectorXcd r0(n), r1(n), r2(n), r3(n);
  for (long hi = 0; hi < H; ++hi)
    for (long lo = 0; lo < S; ++lo) {
      const long i0 = hi * 4 * S + lo;
      r0 = s.op.row(i0);
      r1 = s.op.row(i0 + S);
      r2 = s.op.row(i0 + 2 * S);
      r3 = s.op.row(i0 + 3 * S);
      for (int gp = 0; gp < 4; ++gp)
        s.op.row(i0 + gp * S) =
            udag(gp, 0) * r0 + udag(gp, 1) * r1 + udag(gp, 2) * r2 + udag(gp, 3) * r3;
    }

  // columns: O <- O U
  Eigen::VectorXcd c0(n), c1(n), c2(n), c3(n);
  for (long hi = 0; hi < H; ++hi)
    for (long lo = 0; lo < S; ++lo) {
      const long j0 = hi * 4 * S + lo;
      c0 = s.op.col(j0);
      c1 = s.op.col(j0 + S);
      c2 = s.op.col(j0 + 2 * S);
      c3 = s.op.col(j0 + 3 * S);
      for (int gp = 0; gp < 4; ++gp)
        s.op.col(j0 + gp * S) =
            u(0, gp) * c0 + u(1, gp) * c1 + u(2, gp) * c2 + u(3, gp) * c3;
    }
}

void apply_brickwork_layer(OperatorState& s, int layer_index, std::mt19937_64& gen) {
  const int start = (layer_index % 2 == 1) ? 1 : 2;
  for (int a = start; a + 1 <= s.n_qubits; a += 2) {
    if (a > s.active) break;  // everything further right is identity
    apply_two_site_gate(s, haar_unitary(gen), a);
  }
}

std::vector<OperatorState> evolve_realization(int n_qubits, int depth,
                                              std::uint64_t seed) {
  if (depth < 0) throw validation_error("evolve_realization: negative depth");
  std::mt19937_64 gen(seed);
  std::vector<OperatorState> series;
  series.reserve(depth + 1);
  series.push_back(make_seed_operator(n_qubits));
  for (int layer = 1; layer <= depth; ++layer) {
    OperatorState next = series.back();
    apply_brickwork_layer(next, layer, gen);
    series.push_back(std::move(next));
  }
  return series;
}

double PauliWeightProfile::total() const {
  double s = identity_weight;
  for (double w : weights) s += w;
  return s;
}

PauliWeightProfile endpoint_profile(const OperatorState& s, int t) {
  PauliWeightProfile prof;
  prof.t = t;
  prof.weights.assign(s.n_qubits, 0.0);

  // cumulative weights W(x) for x = 0..n_qubits; constant beyond the active
  // block because the operator is identity there
  std::vector<double> cum(s.n_qubits + 1, 0.0);
  Eigen::MatrixXcd a = s.op;
  for (int x = s.active; x >= 1; --x) {
    cum[x] = a.squaredNorm() / std::pow(2.0, x);
    const long half = a.rows() / 2;
    Eigen::MatrixXcd reduced(half, half);
    for (long j = 0; j < half; ++j)
      for (long i = 0; i < half; ++i)
        reduced(i, j) = 0.5 * (a(2 * i, 2 * j) + a(2 * i + 1, 2 * j + 1));
    a.swap(reduced);
  }
  cum[0] = std::norm(a(0, 0));
  for (int x = s.active + 1; x <= s.n_qubits; ++x) cum[x] = cum[s.active];

  prof.identity_weight = cum[0];
  for (int x = 1; x <= s.n_qubits; ++x) prof.weights[x - 1] = cum[x] - cum[x - 1];
  return prof;
}

RucEnsembleResult run_ruc_ensemble(int n_qubits, int depth, int realizations,
                                   std::uint64_t seed, int n_threads) {
  if (realizations < 1) throw validation_error("run_ruc_ensemble: need realizations");
  if (depth < 0) throw validation_error("run_ruc_ensemble: negative depth");
  if (n_qubits < 2 || n_qubits > kMaxQubits)
    throw validation_error("run_ruc_ensemble: n_qubits outside [2, 12]");

  const int n_layers = depth + 1;
  // slot[r][layer * n_qubits + (x-1)]
  std::vector<std::vector<double>> slots(
      realizations, std::vector<double>(n_layers * n_qubits, 0.0));

  parallel_for(static_cast<std::size_t>(realizations), n_threads,
               [&](std::size_t begin, std::size_t end, int) {
                 for (std::size_t r = begin; r < end; ++r) {
                   std::mt19937_64 gen(realization_key(seed, r));
                   OperatorState state = make_seed_operator(n_qubits);
                   for (int layer = 0; layer <= depth; ++layer) {
                     if (layer > 0) apply_brickwork_layer(state, layer, gen);
                     PauliWeightProfile p = endpoint_profile(state, layer);
                     for (int x = 0; x < n_qubits; ++x)
                       slots[r][layer * n_qubits + x] = p.weights[x];
                   }
                 }
               });

  RucEnsembleResult out;
  out.n_qubits = n_qubits;
  out.depth = depth;
  out.realizations = realizations;
  out.seed = seed;
  out.mean.resize(n_layers);
  out.std_error.assign(n_layers, std::vector<double>(n_qubits, 0.0));
  const double dn = static_cast<double>(realizations);
  for (int layer = 0; layer <= depth; ++layer) {
    PauliWeightProfile& m = out.mean[layer];
    m.t = layer;
    m.realizations = realizations;
    m.weights.assign(n_qubits, 0.0);
    std::vector<double> second(n_qubits, 0.0);
    for (int r = 0; r < realizations; ++r)
      for (int x = 0; x < n_qubits; ++x) {
        const double w = slots[r][layer * n_qubits + x];
        m.weights[x] += w;
        second[x] += w * w;
      }
    for (int x = 0; x < n_qubits; ++x) {
      const double mean = m.weights[x] / dn;
      m.weights[x] = mean;
      const double var = std::max(0.0, second[x] / dn - mean * mean);
      out.std_error[layer][x] = std::sqrt(var / dn);
    }
  }
  return out;
}

MeanWithError single_gate_spreading(int n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw validation_error("single_gate_spreading: need samples");
  std::mt19937_64 gen(seed);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    OperatorState s = make_seed_operator(2);
    apply_two_site_gate(s, haar_unitary(gen), 1);
    const double w = endpoint_profile(s, 1).weights[1];
    sum += w;
    sum2 += w * w;
  }
  MeanWithError out;
  const double dn = static_cast<double>(n_samples);
  out.mean = sum / dn;
  const double var = std::max(0.0, sum2 / dn - out.mean * out.mean);
  out.std_error = std::sqrt(var / dn);
  return out;
}

HydroComparison compare_to_hydro(const RucEnsembleResult& run, int alignment_offset,
                                 int min_realizations) {
  if (alignment_offset != 0 && alignment_offset != 1)
    throw validation_error("compare_to_hydro: alignment offset must be 0 or 1");
  if (run.realizations < min_realizations)
    throw validation_error("compare_to_hydro: insufficient realizations");

  const auto cell = [alignment_offset](int x) { return (x + alignment_offset + 1) / 2; };
  const double p = 4.0 / 5.0;  // q^2/(q^2+1) at q = 2

  HydroComparison cmp;
  cmp.alignment_offset = alignment_offset;
  cmp.n_cells = cell(run.n_qubits);
  cmp.hydro_steps = run.depth / 2;
  cmp.hydro_velocity = p * p - (1.0 - p) * (1.0 - p);

  const BandedMatrix t_hydro = build_transfer(p, cmp.n_cells);
  std::vector<int> checkpoints(cmp.hydro_steps + 1);
  for (int tau = 0; tau <= cmp.hydro_steps; ++tau) checkpoints[tau] = tau;
  const EvolveResult hydro = evolve_density(t_hydro, cell(1), cmp.hydro_steps, checkpoints);

  for (int tau = 0; tau <= cmp.hydro_steps; ++tau) {
    // circuit profile at layer 2*tau, merged into unit cells
    std::vector<double> circuit(cmp.n_cells, 0.0);
    const PauliWeightProfile& prof = run.mean[2 * tau];
    for (int x = 1; x <= run.n_qubits; ++x) circuit[cell(x) - 1] += prof.weights[x - 1];
    const std::vector<double>& pred = hydro.checkpoints[tau].values;

    double m1c = 0.0, m2c = 0.0, m1h = 0.0, m2h = 0.0, tv = 0.0;
    double mass_c = 0.0;
    for (int c = 0; c < cmp.n_cells; ++c) {
      const double site = c + 1;
      m1c += circuit[c] * site;
      m2c += circuit[c] * site * site;
      m1h += pred[c] * site;
      m2h += pred[c] * site * site;
      tv += std::abs(circuit[c] - pred[c]);
      mass_c += circuit[c];
    }
    m1c /= mass_c;
    m2c /= mass_c;
    cmp.mean_cell_circuit.push_back(m1c);
    cmp.mean_cell_hydro.push_back(m1h);
    cmp.width_circuit.push_back(std::sqrt(std::max(0.0, m2c - m1c * m1c)));
    cmp.width_hydro.push_back(std::sqrt(std::max(0.0, m2h - m1h * m1h)));
    cmp.tv_distance.push_back(0.5 * tv);
  }

  // least-squares slope of the circuit mean position over hydro time
  const int n_pts = static_cast<int>(cmp.mean_cell_circuit.size());
  if (n_pts >= 2) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (int tau = 0; tau < n_pts; ++tau) {
      st += tau;
      sy += cmp.mean_cell_circuit[tau];
      stt += static_cast<double>(tau) * tau;
      sty += tau * cmp.mean_cell_circuit[tau];
    }
    cmp.front_velocity = (n_pts * sty - st * sy) / (n_pts * stt - st * st);
  }
  return cmp;
}

}  // namespace ophydro
