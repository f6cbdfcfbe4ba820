#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ophydro/errors.hpp"
#include "ophydro/spectral.hpp"
#include "ophydro/transfer_matrices.hpp"
#include "ophydro/tridiag_eigen.hpp"

#include "test_helpers.hpp"

using namespace ophydro;
using ophydro_test::dense_from_banded;
using ophydro_test::dense_from_tridiag;
using ophydro_test::rel_diff;

TEST_CASE("mode quantization") {
  const ModeIndex m(3, 12);
  CHECK(m.k() == doctest::Approx(3.0 * M_PI / 12.0));
  CHECK_THROWS_AS(ModeIndex(0, 12), validation_error);
  CHECK_THROWS_AS(ModeIndex(12, 12), validation_error);
}

TEST_CASE("standing-wave spectrum values") {
  const Spectrum s = analytic_spectrum(0.8, 4);
  REQUIRE(s.eigenvalues.size() == 4);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.546274).epsilon(1e-5));
  CHECK(s.eigenvalues[2] == doctest::Approx(0.32).epsilon(1e-12));
  CHECK(s.eigenvalues[3] == doctest::Approx(0.093726).epsilon(1e-5));
  CHECK(std::is_sorted(s.eigenvalues.rbegin(), s.eigenvalues.rend()));
  for (double v : s.eigenvalues) CHECK(v <= 1.0 + 1e-12);
}

TEST_CASE("analytic eigenvectors satisfy the eigenvalue equation") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> up(0.55, 0.95);
  for (int trial = 0; trial < 12; ++trial) {
    const double p = up(gen);
    const int L = 20 + static_cast<int>(up(gen) * 280);
    const int mode = 1 + static_cast<int>(up(gen) * (L - 2));
    const ModeIndex m(mode, L);
    const double lam = analytic_eigenvalue(p, m);
    const std::vector<double> psi = analytic_eigenvector(p, m);
    const std::vector<double> tpsi = build_symmetric_transfer(p, L).apply(psi);
    double res = 0.0, nrm = 0.0;
    for (int i = 0; i < L; ++i) {
      const double r = tpsi[i] - lam * psi[i];
      res += r * r;
      nrm += psi[i] * psi[i];
    }
    CHECK(std::sqrt(res) < 1e-9);
    // the closed-form normalization leaves 2-norm 1/(1-p), not 1
    CHECK(std::sqrt(nrm) == doctest::Approx(1.0 / (1.0 - p)).epsilon(1e-10));
    CHECK(psi[0] * (1.0 - p) * std::sqrt(0.5 * L * (1.0 - lam)) ==
          doctest::Approx(p * std::sin(m.k())).epsilon(1e-10));
  }
}

TEST_CASE("steady-state overlap against direct extended-precision evaluation") {
  // r^L stays within long double range here, so the formula can be evaluated
  // head-on as an independent route to the log-domain implementation
  for (double p : {0.6, 0.75, 0.9}) {
    for (int L : {12, 28, 40}) {
      const long double r = static_cast<long double>(p) / (1.0L - p) *
                            (static_cast<long double>(p) / (1.0L - p));
      long double sum = 0.0L;
      for (int n = 1; n <= L; ++n) {
        const long double direct =
            (r - 1.0L) * std::pow(r, static_cast<long double>(n - 1)) /
            (std::pow(r, static_cast<long double>(L)) - 1.0L);
        const double got = steady_state_overlap(p, n, L);
        CHECK(rel_diff(got, static_cast<double>(direct)) < 1e-12);
        sum += direct;
        CHECK(got > 0.0);
      }
      CHECK(static_cast<double>(sum) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  CHECK(steady_state_overlap(0.75, 1, 28) == doctest::Approx(1.528e-26).epsilon(1e-3));
  CHECK(steady_state_overlap(0.5, 3, 10) == doctest::Approx(0.1).epsilon(1e-14));
  double total = 0.0;
  for (int n = 1; n <= 28; ++n) total += steady_state_overlap(0.75, n, 28);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dissipative symmetrization agrees with the dense similarity product") {
  const double p = 0.8, gamma = 0.05;
  const int L = 12;
  const SymTridiagonal t = build_symmetric_transfer(p, L);
  const DiagonalWeight w = build_dissipation(gamma, 1.0, L);
  const SymTridiagonal s = symmetrize_dissipative(t, w);

  Eigen::MatrixXd wh = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i < L; ++i) wh(i, i) = std::exp(0.5 * w.log_weights[i]);
  const Eigen::MatrixXd want = wh * dense_from_tridiag(t) * wh;
  CHECK((dense_from_tridiag(s) - want).cwiseAbs().maxCoeff() < 1e-14);

  // same spectrum as the weighted product in the original gauge
  const Eigen::MatrixXd pt = wh * wh * dense_from_banded(build_transfer(p, L));
  Eigen::EigenSolver<Eigen::MatrixXd> es(pt);
  std::vector<double> nonsym;
  for (int i = 0; i < L; ++i) {
    CHECK(std::fabs(es.eigenvalues()(i).imag()) < 1e-10);
    nonsym.push_back(es.eigenvalues()(i).real());
  }
  std::sort(nonsym.rbegin(), nonsym.rend());
  const Spectrum sym_spec = eig_sym_tridiag(s);
  for (int i = 0; i < L; ++i)
    CHECK(std::fabs(sym_spec.eigenvalues[i] - nonsym[i]) < 1e-9);
}

TEST_CASE("zero dissipation leaves the symmetric transfer unchanged") {
  const SymTridiagonal t = build_symmetric_transfer(0.7, 9);
  const SymTridiagonal s = symmetrize_dissipative(t, build_dissipation(0.0, 1.0, 9));
  for (int i = 0; i < 9; ++i) CHECK(s.diag[i] == t.diag[i]);
  for (int i = 0; i + 1 < 9; ++i) CHECK(s.off[i] == t.off[i]);

  CHECK_THROWS_AS(symmetrize_dissipative(t, build_hard_truncation(5, 9)),
                  validation_error);
  CHECK_THROWS_AS(symmetrize_dissipative(t, build_dissipation(0.1, 1.0, 4)),
                  validation_error);
}

TEST_CASE("dissipative operator assembles weight and gauge consistently") {
  const double p = 0.8, gamma = 0.01;
  const int L = 30;
  const GaugedOperator op = make_dissipative_operator(p, gamma, 1.0, L);
  const SymTridiagonal direct = symmetrize_dissipative(
      build_symmetric_transfer(p, L), build_dissipation(gamma, 1.0, L));
  for (int i = 0; i < L; ++i) CHECK(op.sym.diag[i] == direct.diag[i]);
  const DiagonalWeight r = build_similarity(p, L);
  for (int i = 0; i < L; ++i)
    CHECK(op.log_gauge[i] ==
          doctest::Approx(r.log_weights[i] - 0.5 * gamma * (i + 1)).epsilon(1e-14));
}

TEST_CASE("pure transfer leading pair is the stationary distribution") {
  const double p = 0.8;
  const int L = 50;
  const LeadingPair lead = leading_pair(make_transfer_operator(p, L));
  CHECK(std::fabs(lead.eigenvalue - 1.0) < 1e-12);

  double sum = 0.0;
  for (double v : lead.vector) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // geometric stationary profile, checked where it is resolvable in doubles
  for (int n = 45; n <= 50; ++n)
    CHECK(rel_diff(lead.vector[n - 1], steady_state_overlap(p, n, L)) < 1e-6);
  // stationarity in the original gauge
  const std::vector<double> tv = build_transfer(p, L).apply(lead.vector);
  for (int i = 0; i < L; ++i) CHECK(std::fabs(tv[i] - lead.vector[i]) < 1e-9);
}

// Reference values for the dissipative leading pair below were produced by
// tools/oracles/dissipative_leading_pair.py (60-digit backward-sweep shooting
// on the exact three-term recurrence, bisected on the wall-row residual).

TEST_CASE("dissipative leading pair at p=0.8, L=500, gamma=0.006") {
  const double gamma = 0.006;
  const LeadingPair lead = leading_pair(make_dissipative_operator(0.8, gamma, 1.0, 500));

  CHECK(std::fabs(lead.eigenvalue - 0.6107116265989236) < 5e-13);

  double sum = 0.0;
  int argmax = 0;
  for (int i = 0; i < 500; ++i) {
    CHECK(lead.vector[i] >= 0.0);
    sum += lead.vector[i];
    if (lead.vector[i] > lead.vector[argmax]) argmax = i;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(argmax + 1 == 82);

  // growth/dissipation balance puts the peak at -ln(lambda)/gamma
  CHECK(std::fabs(peak_estimate(lead.eigenvalue, gamma) - (argmax + 1)) <= 2.0);

  CHECK(rel_diff(lead.vector[81 - 1], 0.0398236669534231) < 1e-9);
  CHECK(rel_diff(lead.vector[82 - 1], 0.0398723557249307) < 1e-9);
  CHECK(rel_diff(lead.vector[83 - 1], 0.0395252191399256) < 1e-9);
  CHECK(rel_diff(lead.vector[40 - 1], 3.02180104011442e-6) < 1e-6);
  CHECK(rel_diff(lead.vector[122 - 1], 1.8770115668108e-5) < 1e-6);
  // oracle values 3.19e-21 and 3.89e-286: below the eigenvector's double
  // resolution, reported as exact zeros
  CHECK(lead.vector[1 - 1] == 0.0);
  CHECK(lead.vector[500 - 1] == 0.0);
}

TEST_CASE("symmetric and general banded routes agree on the dissipative leading pair") {
  const double p = 0.8, gamma = 0.05;
  const int L = 80;
  const LeadingPair sym_route = leading_pair(make_dissipative_operator(p, gamma, 1.0, L));

  const BandedMatrix t = build_transfer(p, L);
  const DiagonalWeight w = build_dissipation(gamma, 1.0, L);
  const LeadingPair banded_route = leading_pair(t, &w);

  CHECK(std::fabs(sym_route.eigenvalue - banded_route.eigenvalue) < 1e-11);
  CHECK(std::fabs(sym_route.eigenvalue - 0.53017922528556438) < 5e-13);
  for (int i = 0; i < L; ++i)
    CHECK(std::fabs(sym_route.vector[i] - banded_route.vector[i]) < 1e-9);

  int argmax = 0;
  for (int i = 0; i < L; ++i)
    if (sym_route.vector[i] > sym_route.vector[argmax]) argmax = i;
  CHECK(argmax + 1 == 12);
  CHECK(rel_diff(sym_route.vector[1 - 1], 0.000101496965918717) < 1e-8);
  CHECK(rel_diff(sym_route.vector[11 - 1], 0.109355049962745) < 1e-9);
  CHECK(rel_diff(sym_route.vector[12 - 1], 0.115253334710014) < 1e-9);
  CHECK(rel_diff(sym_route.vector[13 - 1], 0.111803280041406) < 1e-9);
  CHECK(sym_route.vector[52 - 1] == 0.0);  // oracle 9.4e-24, below resolution
  CHECK(sym_route.vector[80 - 1] == 0.0);  // oracle 1.4e-61
}

TEST_CASE("subleading dissipative eigenvectors oscillate, the leading one does not") {
  const GaugedOperator op = make_dissipative_operator(0.8, 0.05, 1.0, 80);
  EigenOptions opts;
  opts.want_eigenvectors = true;
  opts.top_k = 5;
  const Spectrum s = eig_sym_tridiag(op.sym, opts);
  for (int i = 0; i < 5; ++i) {
    double vmax = 0.0;
    for (double x : s.eigenvectors[i]) vmax = std::max(vmax, std::fabs(x));
    int changes = 0;
    double prev = 0.0;
    for (double x : s.eigenvectors[i]) {
      if (std::fabs(x) < 1e-6 * vmax) continue;  // skip unresolved tail
      if (prev != 0.0 && x * prev < 0.0) ++changes;
      prev = x;
    }
    if (i == 0)
      CHECK(changes == 0);
    else
      CHECK(changes >= 1);
  }
}

TEST_CASE("leading dissipative eigenvalue grows as dissipation is released") {
  const double p = 0.8;
  const int L = 500;
  const double edge = 4.0 * p * (1.0 - p);
  const std::vector<double> gammas = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  // backward shooting oracle values, same order
  const std::vector<double> want = {0.475155753, 0.559425880, 0.599432725,
                                    0.621264466, 0.630843720};
  double prev = 0.0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double lam =
        largest_sym_tridiag_eigenvalue(make_dissipative_operator(p, gammas[i], 1.0, L).sym);
    CHECK(std::fabs(lam - want[i]) < 2e-9);
    CHECK(lam > prev);
    CHECK(lam <= std::exp(-gammas[i]) * edge + 10.0 / (static_cast<double>(L) * L));
    prev = lam;
  }
  // bulk values are already L-converged at L=500
  const double lam2000 =
      largest_sym_tridiag_eigenvalue(make_dissipative_operator(p, 1e-3, 1.0, 2000).sym);
  CHECK(std::fabs(lam2000 - 0.630843720) < 2e-9);
}

TEST_CASE("weak dissipation on a short chain promotes the wall state") {
  // gamma L = 0.2: the stationary-state remnant at the far wall dominates with
  // lambda close to exp(-gamma L), far above the bulk bound exp(-gamma) 4p(1-p)
  const double gamma = 1e-3;
  const int L = 200;
  const double lam =
      largest_sym_tridiag_eigenvalue(make_dissipative_operator(0.8, gamma, 1.0, L).sym);
  CHECK(std::fabs(lam - std::exp(-gamma * L)) < 5e-4);
  CHECK(lam > std::exp(-gamma) * 0.64 + 10.0 / (static_cast<double>(L) * L));
}

TEST_CASE("peak estimate") {
  CHECK(peak_estimate(std::exp(-0.02), 0.02) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(peak_estimate(std::exp(-0.006) * 0.64, 0.006) ==
        doctest::Approx(75.3811).epsilon(1e-5));
  CHECK_THROWS_AS(peak_estimate(1.0, 0.01), validation_error);
  CHECK_THROWS_AS(peak_estimate(0.0, 0.01), validation_error);
  CHECK_THROWS_AS(peak_estimate(0.5, 0.0), validation_error);
}

TEST_CASE("truncated-block characteristic roots") {
  const double p = 0.8;
  const double psi1 = p * (1.0 - p) * M_PI * M_PI;

  // finite blocks carry an O(1/ell) correction to the scaled roots
  const int ell = 200;
  const std::vector<double> roots = gtilde_roots(p, ell, 10.0, 2);
  REQUIRE(roots.size() == 2);
  CHECK(rel_diff(roots[0] * ell * ell, psi1) < 0.05);
  CHECK(rel_diff(roots[1] * ell * ell, 4.0 * psi1) < 0.05);

  // the first root reproduces the numerically computed leading eigenvalue
  const int big = 500;
  const std::vector<double> r500 = gtilde_roots(p, big, 6.0, 1);
  REQUIRE(r500.size() == 1);
  const double lam_root = 4.0 * p * (1.0 - p) - r500[0];
  const double lam_num =
      largest_sym_tridiag_eigenvalue(make_truncated_operator(p, big, 0.0).sym);
  CHECK(rel_diff(lam_root, lam_num) < 1e-6);

  CHECK_THROWS_AS(gtilde(p, 200, 0.0), validation_error);
  CHECK_THROWS_AS(gtilde(p, 200, 2.0 * 2.0 * p * (1.0 - p)), validation_error);
  CHECK_THROWS_AS(gtilde(p, 2, 0.01), validation_error);
}

TEST_CASE("truncation scan converges to the continuum root") {
  const double p = 0.8;
  const double psi_limit = p * (1.0 - p) * M_PI * M_PI;
  const std::vector<TruncationRoot> scan =
      truncated_root_scan(p, {50, 100, 200, 400}, 0.0);
  REQUIRE(scan.size() == 4);
  for (const TruncationRoot& r : scan) {
    CHECK(r.epsilon > 0.0);  // no eigenvalue beyond the band edge
  }
  CHECK(rel_diff(scan.back().psi, psi_limit) < 0.02);
  CHECK(std::fabs(scan.back().psi - psi_limit) < std::fabs(scan.front().psi - psi_limit));

  // stochastic corner keeps the exact unit eigenvalue at any size
  for (int ell : {20, 100})
    CHECK(std::fabs(largest_sym_tridiag_eigenvalue(
              make_truncated_operator(p, ell, p * p).sym) -
          1.0) < 1e-12);

  CHECK_THROWS_AS(truncated_root_scan(0.4, {50}, 0.0), validation_error);
  CHECK_THROWS_AS(truncated_root_scan(0.8, {4}, 0.0), validation_error);
}

TEST_CASE("simplified-model eigenvector closed form") {
  const double eps = 0.1, gamma = 0.05;
  const int L = 90;
  const std::vector<double> v = simplified_eigvec(eps, gamma, L);

  double sum = 0.0, vmax = 0.0;
  int argmax = 0;
  for (int i = 0; i < L; ++i) {
    sum += v[i];
    if (v[i] > v[argmax]) argmax = i;
    vmax = std::max(vmax, v[i]);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs((argmax + 1) - (-std::log(2.0 * eps) / gamma)) <= 1.0);

  // exact eigenvalue equation for the damped advance-or-stay chain,
  // lambda = exp(-gamma) 2 eps; only the absorbing far corner deviates and its
  // residual is buried many orders below the peak
  const double lam = std::exp(-gamma) * 2.0 * eps;
  for (int x = 1; x <= L; ++x) {
    const double flow = (x == L ? v[x - 1] : 2.0 * eps * v[x - 1]) +
                        (x > 1 ? (1.0 - 2.0 * eps) * v[x - 2] : 0.0);
    CHECK(std::fabs(std::exp(-gamma * x) * flow - lam * v[x - 1]) < 1e-12 * vmax);
  }

  // dual route: direct leading pair of the weighted banded operator
  const BandedMatrix m = build_simplified(eps, L);
  const DiagonalWeight w = build_dissipation(gamma, 1.0, L);
  const LeadingPair lead = leading_pair(m, &w);
  CHECK(rel_diff(lead.eigenvalue, lam) < 1e-10);
  for (int i = 0; i < L; ++i)
    if (v[i] > 1e-8 * vmax && lead.vector[i] > 0.0)
      CHECK(rel_diff(v[i], lead.vector[i]) < 1e-6);

  CHECK_THROWS_AS(simplified_eigvec(0.0, 0.05, 50), validation_error);
  CHECK_THROWS_AS(simplified_eigvec(0.1, 0.0, 50), validation_error);
}

TEST_CASE("gauged leading pair input validation") {
  GaugedOperator op;
  op.sym.diag = {1.0, 1.0};
  op.sym.off = {0.1};
  op.log_gauge = {0.0};  // length mismatch
  CHECK_THROWS_AS(leading_pair(op), validation_error);

  GaugedOperator single;
  single.sym.diag = {0.7};
  single.log_gauge = {0.0};
  const LeadingPair lead = leading_pair(single);
  CHECK(lead.eigenvalue == doctest::Approx(0.7));
  REQUIRE(lead.vector.size() == 1);
  CHECK(lead.vector[0] == 1.0);
}
