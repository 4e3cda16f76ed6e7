#include "qproc/fcs_su2.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace qproc;
using Catch::Approx;

TEST_CASE("covariant CP region closed form", "[fcs_su2]") {
  // Interior/boundary points of the single-coefficient family.
  const Su2RegionCheck inside = su2_region_check(Su2Params(-1.5, 0.25, 0.0), 3);
  CHECK(inside.inside);
  CHECK(inside.linear_slack == Approx(0.0).margin(1e-14));
  CHECK(inside.quadratic_slack == Approx(11.25).epsilon(1e-13));

  CHECK_FALSE(su2_region_check(Su2Params(-3.0, 1.0, 0.0), 3).inside);
  CHECK_FALSE(su2_region_check(Su2Params(-1.5, 0.25, 2.0), 3).inside);

  // Two-coefficient family: the period-2 extremal map sits on the boundary.
  const Su2RegionCheck pair = su2_region_check(Su2Params(0.0, 0.0, 1.0, 0.0), 4);
  CHECK(pair.inside);
  CHECK(pair.linear_slack == Approx(0.0).margin(1e-14));
  CHECK(pair.quadratic_slack == Approx(0.0).margin(1e-14));

  CHECK_THROWS_AS(su2_region_check(Su2Params(0.0, 0.2, 0.3, 0.0), 3),
                  domain_error);
  CHECK_THROWS_AS(su2_region_check(Su2Params(0.0, 0.2, 0.0), 5), domain_error);
}

TEST_CASE("closed-form region agrees with Choi positivity", "[fcs_su2]") {
  Rng rng = Rng(31).stream("region_draws");
  int inside_seen = 0, outside_seen = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const int family = (trial % 2 == 0) ? 3 : 4;
    const double alpha = rng.uniform(-3.5, 1.5);
    const double mu = rng.uniform(-0.7, 1.2);
    const double nu = (family == 3) ? mu : rng.uniform(-0.7, 1.2);
    const double eta = rng.uniform(-1.3, 1.3);
    const Su2Params p(alpha, mu, nu, eta);

    const Su2RegionCheck rc = su2_region_check(p, family);
    if (std::abs(rc.linear_slack) < 1e-9 || std::abs(rc.quadratic_slack) < 1e-9)
      continue;  // skip the boundary shell where both tests are tolerance-bound
    const PsdReport psd = psd_check(testutil::su2_action_choi_unguarded(p));
    CHECK(rc.inside == psd.psd);
    (rc.inside ? inside_seen : outside_seen)++;
  }
  CHECK(inside_seen > 50);
  CHECK(outside_seen > 50);
}

TEST_CASE("covariant map construction", "[fcs_su2]") {
  const Su2Params p(-1.5, 0.25, 0.0);
  const CpMap lambda = su2_lambda(p, 3);
  CHECK(lambda.d_in() == 4);
  CHECK(lambda.d_out() == 2);

  const Mat eye2 = Mat::Identity(2, 2);
  CHECK((lambda.apply(kron(eye2, eye2)) - eye2).norm() ==
        Approx(0.0).margin(1e-13));

  // Action on the Pauli product basis.
  CHECK((lambda.apply(kron(pauli(1), eye2)) - p.mu * pauli(1)).norm() ==
        Approx(0.0).margin(1e-13));
  CHECK((lambda.apply(kron(eye2, pauli(2))) - p.nu * pauli(2)).norm() ==
        Approx(0.0).margin(1e-13));
  CHECK((lambda.apply(kron(pauli(3), pauli(3))) - (p.alpha / 3.0) * eye2).norm() ==
        Approx(0.0).margin(1e-13));
  CHECK(lambda.apply(kron(pauli(1), pauli(2))).norm() ==
        Approx(0.0).margin(1e-13));  // eta = 0 kills the antisymmetric part

  // The antisymmetric coefficient shows up for eta != 0 with weight eta/2.
  const CpMap twisted = su2_lambda(Su2Params(0.0, 0.25, 0.5), 3);
  CHECK((twisted.apply(kron(pauli(1), pauli(2))) - 0.25 * pauli(3)).norm() ==
        Approx(0.0).margin(1e-13));

  CHECK_THROWS_AS(su2_lambda(Su2Params(-3.0, 1.0, 0.0), 3), domain_error);
  CHECK_THROWS_WITH(su2_lambda(Su2Params(-3.0, 1.0, 0.0), 3),
                    Catch::Matchers::ContainsSubstring("linear constraint"));
  CHECK_THROWS_WITH(su2_lambda(Su2Params(1.5, 0.5, 0.0), 3),
                    Catch::Matchers::ContainsSubstring("quadratic constraint"));
}

TEST_CASE("single-site covariant map", "[fcs_su2]") {
  const CpMap gamma = su2_gamma(0.25);
  for (int a = 1; a <= 3; ++a)
    CHECK((gamma.apply(pauli(a)) - 0.25 * pauli(a)).norm() ==
          Approx(0.0).margin(1e-14));
  CHECK((gamma.apply(Mat::Identity(2, 2)) - Mat::Identity(2, 2)).norm() ==
        Approx(0.0).margin(1e-14));
  CHECK(cp_properties(gamma).cp);

  CHECK_NOTHROW(su2_gamma(1.0));
  CHECK_NOTHROW(su2_gamma(-1.0 / 3.0));
  CHECK_THROWS_AS(su2_gamma(1.001), domain_error);
  CHECK_THROWS_AS(su2_gamma(-0.34), domain_error);
}

TEST_CASE("chain spec compatibility", "[fcs_su2]") {
  const FcsSpec spec = su2_map_build(Su2Params(-1.5, 0.25, 0.0), 3);
  CHECK(spec.d() == 2);
  CHECK(spec.compatible());
  CHECK(spec.compat_residual() == Approx(0.0).margin(1e-13));
  CHECK(compatibility_residual(spec) == Approx(0.0).margin(1e-13));

  // A two-coefficient map with mu != nu is admitted but flagged, and the
  // stationary-marginal routines refuse it.
  const FcsSpec lopsided = su2_map_build(Su2Params(0.0, 0.0, 1.0, 0.0), 4);
  CHECK_FALSE(lopsided.compatible());
  CHECK(lopsided.compat_residual() > 0.1);
  CHECK_THROWS_AS(fcs_marginal_raw(lopsided, 2), domain_error);
  CHECK_THROWS_AS(singlet_expectation(lopsided), domain_error);

  // Mismatched pairs are rejected outright when compatibility is required.
  CHECK_THROWS_AS(FcsSpec(su2_lambda(Su2Params(-1.5, 0.25, 0.0), 3),
                          su2_gamma(0.5),
                          DensityMatrix(0.5 * Mat::Identity(2, 2))),
                  compatibility_error);

  // A memory state that is not invariant is rejected.
  Mat skew(2, 2);
  skew << 0.9, 0.0, 0.0, 0.1;
  CHECK_THROWS_AS(FcsSpec(su2_lambda(Su2Params(-1.5, 0.25, 0.0), 3),
                          su2_gamma(0.25), DensityMatrix(skew)),
                  domain_error);
}

TEST_CASE("expectations and marginals", "[fcs_su2]") {
  const FcsSpec spec = su2_map_build(Su2Params(-1.5, 0.25, 0.0), 3);

  // Nested expectation of identities is one; single-site Pauli expectations
  // vanish for the maximally mixed memory.
  const Mat eye2 = Mat::Identity(2, 2);
  CHECK(fcs_expectation(spec, {eye2, eye2, eye2}) == Approx(1.0).margin(1e-12));
  CHECK(fcs_expectation(spec, {pauli(3)}) == Approx(0.0).margin(1e-13));

  // One-site marginal is maximally mixed by symmetry.
  const DensityMatrix one = fcs_marginal(spec, 1);
  CHECK((one.matrix() - 0.5 * eye2).norm() == Approx(0.0).margin(1e-12));

  // The two-site marginal is rotation invariant, hence exactly the
  // one-parameter mixture determined by its singlet expectation.
  const double pexp = singlet_expectation(spec);
  CHECK(pexp == Approx(11.0 / 32.0).epsilon(1e-12));
  CHECK(pexp == Approx(su2_singlet_closed_form(Su2Params(-1.5, 0.25, 0.0)))
                    .epsilon(1e-12));
  const Mat two = fcs_marginal_raw(spec, 2);
  CHECK((two - werner_analysis(pexp).state).norm() == Approx(0.0).margin(1e-11));

  // The closed form holds across the admissible region.
  for (const Su2Params p : {Su2Params(0.0, 0.0, 0.0), Su2Params(-1.0, 0.1, 0.2),
                            Su2Params(0.5, 0.4, -0.3), Su2Params(-2.0, 0.1, 0.0)}) {
    const FcsSpec s = su2_map_build(p, 3);
    CHECK(singlet_expectation(s) ==
          Approx(su2_singlet_closed_form(p)).margin(1e-12));
  }

  CHECK_THROWS_AS(fcs_marginal_raw(spec, 0), shape_error);
  CHECK_THROWS_AS(fcs_marginal_raw(spec, 13), size_error);
}

TEST_CASE("marginal entropy sequence", "[fcs_su2]") {
  const FcsSpec spec = su2_map_build(Su2Params(-1.5, 0.25, 0.0), 3);
  const EntropySequence es = fcs_entropy_sequence(spec, 4);
  REQUIRE(es.H.size() == 4);
  CHECK(es.H[0] == Approx(std::log(2.0)).epsilon(1e-12));

  // The two-site entropy equals the entropy of the equivalent two-qubit
  // mixture.
  const double pexp = 11.0 / 32.0;
  const double expected_h2 =
      -(xlogx(pexp) + 3.0 * xlogx((1.0 - pexp) / 3.0));
  CHECK(es.H[1] == Approx(expected_h2).epsilon(1e-12));

  // Monotonicity and concavity come with the sequence contract; spot-check
  // the reported increments anyway.
  for (std::size_t k = 0; k + 1 < es.increments.size(); ++k)
    CHECK(es.increments[k + 1] <= es.increments[k] + 1e-10);
  CHECK_THROWS_AS(fcs_entropy_sequence(spec, 0), shape_error);
}

TEST_CASE("alternating two-map chain value", "[fcs_su2]") {
  // With both maps in the balanced family the explicit construction matches
  // the closed form everywhere.
  const Su2Params p1(-1.0, 0.2, 0.0);
  const Su2Params p2(0.5, 0.1, 0.0);
  CHECK(period2_explicit_value(p1, p2) ==
        Approx(period2_closed_form(p1, p2)).margin(1e-12));

  // At the reported optimum the assembled pair attains 5/8.
  const SingletOptimum opt = optimize_singlet(SingletMode::period2);
  CHECK(opt.value == Approx(0.625).margin(1e-9));
  auto get = [&](const std::string& key) {
    for (const auto& [k, v] : opt.argmax)
      if (k == key) return v;
    throw std::runtime_error("missing argmax key " + key);
  };
  const Su2Params q1(get("alpha1"), get("mu1"), get("nu1"), get("eta1"));
  const Su2Params q2(get("alpha2"), get("mu2"), get("nu2"), get("eta2"));
  CHECK(q1.alpha == Approx(-3.0).margin(1e-7));
  CHECK(q2.alpha == Approx(0.0).margin(1e-7));
  CHECK(su2_region_check(q1, 4).inside);
  CHECK(su2_region_check(q2, 4).inside);
  CHECK(period2_closed_form(q1, q2) == Approx(0.625).margin(1e-9));
  CHECK(period2_explicit_value(q1, q2) == Approx(0.625).margin(1e-9));
}

TEST_CASE("rotation-invariant two-qubit family", "[fcs_su2]") {
  const WernerReport pure = werner_analysis(1.0);
  CHECK(pure.p_expectation == Approx(1.0).epsilon(1e-13));
  CHECK(pure.pt_min_eig == Approx(-0.5).epsilon(1e-12));
  CHECK(pure.state.trace().real() == Approx(1.0).epsilon(1e-13));

  const WernerReport mixed = werner_analysis(0.25);
  CHECK((mixed.state - 0.25 * Mat::Identity(4, 4)).norm() ==
        Approx(0.0).margin(1e-14));

  // Minimal partial-transpose eigenvalue in closed form across the family.
  for (int k = 0; k <= 20; ++k) {
    const double lam = k / 20.0;
    const WernerReport wr = werner_analysis(lam);
    const double expected =
        std::min((1.0 - 2.0 * lam) / 2.0, (1.0 + 2.0 * lam) / 6.0);
    CHECK(wr.pt_min_eig == Approx(expected).margin(1e-12));
    CHECK(wr.p_expectation == Approx(lam).margin(1e-13));
  }

  CHECK(werner_ppt_threshold(1e-9) == Approx(0.5).margin(1e-9));
  CHECK(werner_ppt_threshold(1e-6) == Approx(0.5).margin(1e-6));
  CHECK_THROWS_AS(werner_analysis(1.5), domain_error);
}

TEST_CASE("singlet-density optimizers hit the known maxima", "[fcs_su2]") {
  const SingletOptimum ex = optimize_singlet(SingletMode::exchangeable);
  CHECK(ex.value == Approx(0.25).margin(1e-6));
  for (const auto& [k, v] : ex.argmax) CHECK(std::abs(v) < 1e-4);

  const SingletOptimum sep = optimize_singlet(SingletMode::separable);
  CHECK(sep.value == Approx(0.5).margin(1e-6));
  // Antipodal unit vectors.
  auto val = [&](const std::string& key) {
    for (const auto& [k, v] : sep.argmax)
      if (k == key) return v;
    throw std::runtime_error("missing argmax key " + key);
  };
  const double dot = val("x1") * val("y1") + val("x2") * val("y2") +
                     val("x3") * val("y3");
  CHECK(dot == Approx(-1.0).margin(1e-6));

  const SingletOptimum stat = optimize_singlet(SingletMode::su2_stationary);
  CHECK(stat.value == Approx(11.0 / 32.0).margin(1e-9));
  auto sval = [&](const std::string& key) {
    for (const auto& [k, v] : stat.argmax)
      if (k == key) return v;
    throw std::runtime_error("missing argmax key " + key);
  };
  CHECK(sval("alpha") == Approx(-1.5).margin(1e-6));
  CHECK(sval("mu") == Approx(0.25).margin(1e-6));

  const SingletOptimum three = optimize_singlet(SingletMode::three_qubit_su2);
  CHECK(three.value == Approx(0.75).margin(1e-6));
  auto tval = [&](const std::string& key) {
    for (const auto& [k, v] : three.argmax)
      if (k == key) return v;
    throw std::runtime_error("missing argmax key " + key);
  };
  CHECK(tval("lambda") == Approx(1.0).margin(1e-5));
  CHECK(tval("a") == Approx(1.0 / 6.0).margin(1e-5));
  CHECK(tval("re_c") == Approx(1.0 / 3.0).margin(1e-4));
  CHECK(tval("im_c") == Approx(0.0).margin(1e-4));

  // Determinism under a fixed seed.
  const SingletOptimum again = optimize_singlet(SingletMode::separable, 0);
  CHECK(again.value == sep.value);

  CHECK(optimize_singlet("su2_stationary").value ==
        Approx(11.0 / 32.0).margin(1e-9));
  CHECK_THROWS_AS(singlet_mode_from_string("bogus"), domain_error);
}
