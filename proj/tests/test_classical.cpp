#include "qproc/classical.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace qproc;
using Catch::Approx;

namespace {

StochasticMatrix two_state_chain() {
  RMat t(2, 2);
  t << 0.7, 0.3, 0.1, 0.9;
  return StochasticMatrix(t);
}

}  // namespace

TEST_CASE("stochastic matrix validation", "[classical]") {
  CHECK(two_state_chain().dim() == 2);
  CHECK(two_state_chain().row(0)[1] == Approx(0.3));

  RMat neg(2, 2);
  neg << 1.1, -0.1, 0.5, 0.5;
  CHECK_THROWS_AS(StochasticMatrix(neg), domain_error);
  RMat bad_row(2, 2);
  bad_row << 0.7, 0.2, 0.1, 0.9;
  CHECK_THROWS_AS(StochasticMatrix(bad_row), domain_error);
  CHECK_THROWS_AS(StochasticMatrix(RMat::Zero(2, 3)), shape_error);

  RMat tiny(2, 2);
  tiny << 1.0 + 1e-14, -1e-14, 0.5, 0.5;
  CHECK(StochasticMatrix(tiny).matrix()(0, 1) == 0.0);  // clipped
}

TEST_CASE("ergodicity detection", "[classical]") {
  CHECK(is_ergodic(two_state_chain()));

  RMat id = RMat::Identity(2, 2);
  CHECK_FALSE(is_ergodic(StochasticMatrix(id)));

  RMat swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;  // period 2
  CHECK_FALSE(is_ergodic(StochasticMatrix(swap)));

  RMat lazy_swap(2, 2);
  lazy_swap << 0.01, 0.99, 0.99, 0.01;
  CHECK(is_ergodic(StochasticMatrix(lazy_swap)));
}

TEST_CASE("invariant measure", "[classical]") {
  const ProbVector mu = invariant_measure(two_state_chain());
  CHECK(mu[0] == Approx(0.25).epsilon(1e-14));
  CHECK(mu[1] == Approx(0.75).epsilon(1e-14));

  // mu T = mu on random ergodic chains of several sizes.
  Rng rng(101);
  for (int d : {2, 3, 4, 6}) {
    const StochasticMatrix t = testutil::random_stochastic(rng, d);
    const ProbVector m = invariant_measure(t);
    const RVec res = t.matrix().transpose() * m.values() - m.values();
    CHECK(res.cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-12));
  }

  CHECK_THROWS_AS(invariant_measure(StochasticMatrix(RMat::Identity(2, 2))),
                  domain_error);
  // Degenerate chains are accepted under the flag; any fixed point will do.
  const ProbVector deg = invariant_measure(
      StochasticMatrix(RMat::Identity(2, 2)), /*allow_degenerate=*/true);
  CHECK(deg.values().sum() == Approx(1.0).epsilon(1e-14));

  RMat swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const ProbVector periodic =
      invariant_measure(StochasticMatrix(swap), /*allow_degenerate=*/true);
  CHECK(periodic[0] == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("joint pmf indexing, marginals, entropy", "[classical]") {
  RVec v(4);
  v << 0.1, 0.2, 0.3, 0.4;
  const JointPmf pmf(2, 2, v);
  CHECK(pmf.index({1, 0}) == 2);
  CHECK(pmf.prob({1, 0}) == Approx(0.3));

  const JointPmf m0 = pmf.marginal({0});
  CHECK(m0.prob({0}) == Approx(0.3));
  CHECK(m0.prob({1}) == Approx(0.7));
  const JointPmf m1 = pmf.marginal({1});
  CHECK(m1.prob({0}) == Approx(0.4));

  // Product law: entropy is additive and marginals factorize.
  RVec prod(4);
  prod << 0.4 * 0.3, 0.4 * 0.7, 0.6 * 0.3, 0.6 * 0.7;
  const JointPmf p2(2, 2, prod);
  CHECK(p2.entropy() ==
        Approx(binary_entropy(0.4) + binary_entropy(0.3)).epsilon(1e-13));

  CHECK_THROWS_AS(pmf.marginal({}), shape_error);
  CHECK_THROWS_AS(pmf.marginal({1, 0}), shape_error);
  CHECK_THROWS_AS(pmf.marginal({2}), shape_error);
  CHECK_THROWS_AS(pmf.prob({0}), shape_error);
  CHECK_THROWS_AS(JointPmf(2, 2, RVec::Constant(3, 0.3)), shape_error);
  RVec badmass(4);
  badmass << 0.1, 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(JointPmf(2, 2, badmass), domain_error);
  CHECK_THROWS_AS(JointPmf(13, 2, RVec::Zero(8192)), size_error);
}

TEST_CASE("three-point extension and SSA saturation", "[classical]") {
  Rng rng(202);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + rng.uniform_int(3);  // alphabet 2..4
    const auto [mu12, nu23] = testutil::random_compatible_pair(rng, d);
    const JointPmf xi = markov_extension(mu12, nu23);

    // The extension matches both prescribed pair marginals.
    CHECK((xi.marginal({0, 1}).values() - mu12.values()).cwiseAbs().maxCoeff() ==
          Approx(0.0).margin(1e-13));
    CHECK((xi.marginal({1, 2}).values() - nu23.values()).cwiseAbs().maxCoeff() ==
          Approx(0.0).margin(1e-13));

    // Strong sub-additivity is saturated exactly.
    CHECK(std::abs(ssa_residual(xi)) < 1e-12);
  }

  // Incompatible middle marginals are rejected.
  RVec a(4), b(4);
  a << 0.25, 0.25, 0.25, 0.25;  // middle marginal (0.5, 0.5)
  b << 0.4, 0.2, 0.2, 0.2;      // middle marginal (0.6, 0.4)
  CHECK_THROWS_AS(markov_extension(JointPmf(2, 2, a), JointPmf(2, 2, b)),
                  compatibility_error);
  CHECK_THROWS_AS(markov_extension(JointPmf(1, 2, RVec::Constant(2, 0.5)),
                                   JointPmf(2, 2, a)),
                  shape_error);
}

TEST_CASE("SSA residual is nonnegative on arbitrary laws", "[classical]") {
  Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + rng.uniform_int(3);
    long size = static_cast<long>(d) * d * d;
    RVec v(size);
    double sum = 0.0;
    for (long i = 0; i < size; ++i) {
      v(i) = rng.uniform();
      sum += v(i);
    }
    v /= sum;
    const JointPmf xi(3, d, v);
    CHECK(ssa_residual(xi) >= -1e-12);
  }
  CHECK_THROWS_AS(ssa_residual(JointPmf(2, 2, RVec::Constant(4, 0.25))),
                  shape_error);
}

TEST_CASE("stationary word laws", "[classical]") {
  const StochasticMatrix t = two_state_chain();
  const ProbVector mu = invariant_measure(t);

  const JointPmf pair = markov_joint(t, mu, 1);
  CHECK(pair.prob({0, 1}) == Approx(0.075).epsilon(1e-14));  // mu_0 T_01
  CHECK(pair.prob({1, 1}) == Approx(0.675).epsilon(1e-14));  // mu_1 T_11

  // Every marginal of the stationary word law is the shorter word law.
  const JointPmf triple = markov_joint(t, mu, 2);
  CHECK((triple.marginal({0, 1}).values() - pair.values()).cwiseAbs().maxCoeff() ==
        Approx(0.0).margin(1e-14));
  CHECK((triple.marginal({1, 2}).values() - pair.values()).cwiseAbs().maxCoeff() ==
        Approx(0.0).margin(1e-14));

  // The Markov word law saturates SSA.
  CHECK(std::abs(ssa_residual(triple)) < 1e-13);

  RVec skew(2);
  skew << 0.5, 0.5;
  CHECK_THROWS_AS(markov_joint(t, ProbVector(skew), 1), domain_error);
  CHECK_THROWS_AS(markov_joint(t, mu, -1), shape_error);
  CHECK_THROWS_AS(markov_joint(t, mu, 12), size_error);
}

TEST_CASE("entropy rate of the stationary chain", "[classical]") {
  const StochasticMatrix t = two_state_chain();
  const EntropyRate er = entropy_rate_classical(t);
  CHECK(er.h == Approx(0.3965283055573096).epsilon(1e-15));
  CHECK(er.h_min == Approx(0.3250829733914482).epsilon(1e-15));
  CHECK(er.h_min == Approx(binary_entropy(0.1)).epsilon(1e-15));
  CHECK(er.h == Approx(0.25 * binary_entropy(0.3) + 0.75 * binary_entropy(0.1))
                    .epsilon(1e-15));

  // Entropy rate equals the conditional entropy H_{n+1} - H_n of word laws.
  const ProbVector mu = invariant_measure(t);
  const double h2 = markov_joint(t, mu, 2).entropy();
  const double h1 = markov_joint(t, mu, 1).entropy();
  const double h0 = markov_joint(t, mu, 0).entropy();
  CHECK(h2 - h1 == Approx(er.h).epsilon(1e-13));
  CHECK(h1 - h0 == Approx(er.h).epsilon(1e-13));
  CHECK(h0 == Approx(shannon_entropy(mu)).epsilon(1e-14));

  // Weighted row entropies on a random chain agree with the direct formula.
  Rng rng(404);
  const StochasticMatrix r = testutil::random_stochastic(rng, 4);
  const ProbVector rmu = invariant_measure(r);
  double manual = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) manual -= rmu[i] * xlogx(r.matrix()(i, j));
  CHECK(entropy_rate_classical(r, rmu).h == Approx(manual).epsilon(1e-13));
}
