#include "qproc/channels.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace qproc;
using Catch::Approx;

namespace {

RMat symmetric_damping(Rng& rng, int d) {
  RMat m = RMat::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("choi encoding and application", "[channels]") {
  // Identity map: Choi = sum_ij E_ij (x) E_ij.
  const CpMap id = CpMap::from_action(2, 2, [](const Mat& x) { return x; });
  Mat expected = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      expected += kron(matrix_unit(2, i, j), matrix_unit(2, i, j));
  CHECK((id.choi() - expected).norm() == Approx(0.0).margin(1e-14));

  Rng rng(5);
  const Mat x = rng.ginibre(2, 2);
  CHECK((id.apply(x) - x).norm() == Approx(0.0).margin(1e-13));

  // apply() reproduces an arbitrary linear action used to encode the map.
  const Mat k = rng.ginibre(2, 3);
  const CpMap conj = CpMap::from_action(
      3, 2, [&](const Mat& m) { return Mat(k * m * k.adjoint()); });
  const Mat y = rng.ginibre(3, 3);
  CHECK((conj.apply(y) - k * y * k.adjoint()).norm() ==
        Approx(0.0).margin(1e-12));
  CHECK(cp_properties(conj).cp);

  CHECK_THROWS_AS(CpMap(2, 2, Mat::Zero(3, 3)), shape_error);
  Mat nh = Mat::Zero(4, 4);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(CpMap(2, 2, nh), domain_error);
  CHECK_THROWS_AS(conj.apply(Mat::Zero(2, 2)), shape_error);
}

TEST_CASE("adjoint respects the trace pairing", "[channels]") {
  Rng rng(6);
  const Mat k1 = rng.ginibre(2, 3), k2 = rng.ginibre(2, 3);
  const CpMap m = CpMap::from_action(3, 2, [&](const Mat& x) {
    return Mat(k1 * x * k1.adjoint() + k2 * x * k2.adjoint());
  });
  const CpMap adj = m.adjoint();
  CHECK(adj.d_in() == 2);
  CHECK(adj.d_out() == 3);

  for (int trial = 0; trial < 8; ++trial) {
    const Mat x = rng.ginibre(2, 2);
    const Mat y = rng.ginibre(3, 3);
    const cplx lhs = (x.adjoint() * m.apply(y)).trace();
    const cplx rhs = (adj.apply(x).adjoint() * y).trace();
    CHECK(std::abs(lhs - rhs) == Approx(0.0).margin(1e-11));
  }

  CHECK((adj.adjoint().choi() - m.choi()).norm() == Approx(0.0).margin(1e-13));

  // A unital map has a trace-preserving adjoint and vice versa.
  const CpProperties heis = cp_properties(m);
  const CpProperties schr = cp_properties(adj);
  CHECK(schr.trace_preserving_residual ==
        Approx(heis.unital_residual).margin(1e-11));
}

TEST_CASE("covariance residual", "[channels]") {
  Rng rng(7);
  const auto pairs = su2_sample_pairs(4, 2, 6, rng.stream("pairs"));

  // The covariant family commutes with simultaneous rotations.
  const CpMap lambda = su2_lambda(Su2Params(-1.5, 0.25, 0.0), 3);
  CHECK(covariance_residual(lambda, pairs) == Approx(0.0).margin(1e-10));

  // A generic CP map does not.
  const Mat k = rng.ginibre(2, 4);
  const CpMap generic = CpMap::from_action(
      4, 2, [&](const Mat& x) { return Mat(k * x * k.adjoint()); });
  CHECK(covariance_residual(generic, pairs) > 1e-3);

  CHECK_THROWS_AS(su2_sample_pairs(3, 2, 1, rng), shape_error);
  CHECK_THROWS_AS(
      covariance_residual(lambda, {{Mat::Identity(3, 3), Mat::Identity(2, 2)}}),
      shape_error);
}

TEST_CASE("davies map structure", "[channels]") {
  const DaviesQubit q = davies_qubit(0.8, 0.6, 0.15);
  const CpMap map = davies_build(q.t, q.d);

  // Diagonal observables evolve by the transition matrix; coherences damp.
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 1.0;
  const Mat out = map.apply(diag);
  CHECK(out(0, 0).real() == Approx(0.2));
  CHECK(out(1, 1).real() == Approx(0.6));
  CHECK(std::abs(out(0, 1)) == Approx(0.0).margin(1e-15));
  const Mat coh = map.apply(matrix_unit(2, 0, 1));
  CHECK(coh(0, 1).real() == Approx(0.15));
  CHECK(std::abs(coh(0, 0)) + std::abs(coh(1, 1)) == Approx(0.0).margin(1e-15));

  const CpProperties props = cp_properties(map);
  CHECK(props.cp);
  CHECK(props.unital_residual == Approx(0.0).margin(1e-12));

  RMat bad_d(2, 2);
  bad_d << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(davies_build(q.t, bad_d), shape_error);
  CHECK_THROWS_AS(davies_build(q.t, RMat::Identity(3, 3)), shape_error);
}

TEST_CASE("davies validation report", "[channels]") {
  const DaviesQubit q = davies_qubit(0.8, 0.6, 0.15);
  const DaviesReport rep = davies_validate(q.t, q.d);
  CHECK(rep.detailed_balance_residual == Approx(0.0).margin(1e-15));
  CHECK(rep.triangle_residual == Approx(0.0).margin(1e-15));
  CHECK(rep.cp);
  CHECK(rep.choi_psd);
  CHECK(rep.cp_tests_agree);
  CHECK(rep.unital_residual == Approx(0.0).margin(1e-12));
  // T has unequal column sums, so the observable-picture map cannot also be
  // trace preserving.
  CHECK(rep.trace_preserving_residual > 0.1);
  CHECK(rep.mu(0) == Approx(3.0 / 7.0).epsilon(1e-13));
  CHECK(rep.mu(1) == Approx(4.0 / 7.0).epsilon(1e-13));

  // Detailed balance always holds for 2 states; a 3-state chain with a
  // cyclic bias violates it and the triangle condition together.
  RMat cyc(3, 3);
  cyc << 0.2, 0.6, 0.2, 0.2, 0.2, 0.6, 0.6, 0.2, 0.2;
  const DaviesReport crep =
      davies_validate(StochasticMatrix(cyc), RMat::Identity(3, 3));
  CHECK(crep.detailed_balance_residual > 1e-3);
  CHECK(crep.triangle_residual > 1e-3);

  // A supplied non-stationary measure is rejected.
  RVec skew(2);
  skew << 0.5, 0.5;
  CHECK_THROWS_AS(davies_validate(q.t, q.d, ProbVector(skew)), domain_error);
}

TEST_CASE("mixed-matrix and choi CP tests agree", "[channels]") {
  Rng rng(8);
  int non_cp_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = (trial % 2 == 0) ? 2 : 3;
    const StochasticMatrix t = testutil::random_stochastic(rng, d);
    const RMat damp = symmetric_damping(rng, d);
    const DaviesReport rep = davies_validate(t, damp);
    CHECK(rep.cp_tests_agree);
    CHECK(rep.cp == (rep.cp_matrix_min_eig >= -tol_psd));
    if (!rep.cp) ++non_cp_seen;
  }
  CHECK(non_cp_seen > 0);  // the draw box straddles the boundary
}

TEST_CASE("qubit process-generation condition", "[channels]") {
  // Boundary d^2 = (1-a)(1-b)/2 at a = 0.8, b = 0.6 sits at d = 0.2; the
  // test is an exact inequality, so probe strictly on each side.
  CHECK(davies_process_condition(0.8, 0.6, 0.2 - 1e-6));
  CHECK_FALSE(davies_process_condition(0.8, 0.6, 0.2 + 1e-6));
  CHECK(davies_process_condition(0.8, 0.6, -0.15));

  // A damping level can be admissible for the map yet too strong for the
  // process: between sqrt((1-a)(1-b)/2) and sqrt((1-a)(1-b)) the map stays
  // CP while the process condition fails.
  CHECK(davies_process_condition(0.5, 0.5, 0.35));
  CHECK_FALSE(davies_process_condition(0.5, 0.5, 0.37));
  for (double d_off : {0.35, 0.37}) {
    const DaviesQubit q = davies_qubit(0.5, 0.5, d_off);
    CHECK(davies_validate(q.t, q.d).cp);
  }

  CHECK_THROWS_AS(davies_process_condition(0.6, 0.8, 0.1), domain_error);
  CHECK_THROWS_AS(davies_process_condition(1.2, 0.5, 0.1), domain_error);
}

TEST_CASE("minimum output entropy search", "[channels]") {
  // State-picture Davies qubit channel: with weak damping the minimizer is a
  // basis state, and the value is the smaller row entropy.
  const DaviesQubit q = davies_qubit(0.8, 0.6, 0.15);
  const CpMap channel = davies_build(q.t, q.d).adjoint();
  const MinEntropyResult res = min_output_entropy_search(channel, 20, 0);
  CHECK(res.value == Approx(binary_entropy(0.2)).margin(1e-7));
  CHECK(res.value == Approx(0.5004024235381879).margin(1e-7));
  CHECK(res.state.norm() == Approx(1.0).epsilon(1e-9));

  // With strong damping and equal rows a superposition beats every basis
  // state (both basis outputs are maximally mixed).
  const DaviesQubit strong = davies_qubit(0.5, 0.5, 0.45);
  const MinEntropyResult coherent =
      min_output_entropy_search(davies_build(strong.t, strong.d).adjoint(), 20, 0);
  CHECK(coherent.value < binary_entropy(0.5) - 1e-3);

  // The Heisenberg-picture map is unital, not trace preserving, and is
  // rejected.
  CHECK_THROWS_AS(min_output_entropy_search(davies_build(q.t, q.d)),
                  contract_error);
}
