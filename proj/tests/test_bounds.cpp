#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "lsilab/bounds.hpp"

using namespace lsilab;

namespace {

MixtureBoundInputs inputs(double k_ls, double k_p, double p) {
  return MixtureBoundInputs(k_ls, k_p, DualExponent::from_p(p));
}

}  // namespace

TEST_CASE("dual exponent pairs") {
  CHECK(DualExponent::from_p(2.0).p_star == 2.0);
  CHECK(DualExponent::from_p(infinity).p_star == 1.0);
  CHECK(DualExponent::from_p(1.5).p_star == Catch::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(DualExponent::from_p(1.0), std::invalid_argument);
}

TEST_CASE("mixture bound input validation") {
  CHECK_THROWS_AS(inputs(1.0, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(inputs(-1.0, 2.0, 2.0), std::invalid_argument);
  const MixtureBoundInputs in(2.0, 3.0, DualExponent::from_p(2.0));
  CHECK(in.k_poincare == 2.0);
  CHECK(in.log_k_p == Catch::Approx(std::log(3.0)).epsilon(1e-15));
}

// Reference values below come from a 50-digit evaluation of the printed
// closed forms; double arithmetic should match them to near machine epsilon.
TEST_CASE("mixture poincare bound values") {
  CHECK(poincare_mixture_bound(inputs(1.0, std::exp(1.0), infinity)).bound_value ==
        Catch::Approx(3.71828182845904523536).epsilon(1e-14));
  CHECK(poincare_mixture_bound(inputs(2.0, 3.0, 2.0)).bound_value ==
        Catch::Approx(22.0).epsilon(1e-14));
  CHECK(poincare_mixture_bound(inputs(1.5, 2.0, 1.5)).bound_value ==
        Catch::Approx(16.5).epsilon(1e-14));
}

TEST_CASE("mixture lsi bound values") {
  CHECK(lsi_mixture_bound(inputs(1.0, std::exp(1.0), infinity)).bound_value ==
        Catch::Approx(22.30969097075427141216).epsilon(1e-14));
  CHECK(lsi_mixture_bound(inputs(2.0, 3.0, 2.0)).bound_value ==
        Catch::Approx(211.0168221041904792642).epsilon(1e-14));
}

TEST_CASE("mixture bounds are monotone in the moment and the exponent") {
  double prev = 0.0;
  for (double k_p : {1.0, 1.5, 2.0, 4.0, 16.0}) {
    const double v = lsi_mixture_bound(inputs(1.0, k_p, 2.0)).bound_value;
    CHECK(v >= prev);
    prev = v;
  }
  // Larger p means a smaller dual exponent and a weaker moment penalty.
  prev = infinity;
  for (double p : {1.25, 1.5, 2.0, 8.0, infinity}) {
    const double v = poincare_mixture_bound(inputs(1.0, 3.0, p)).bound_value;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("gaussian convolution bound values") {
  CHECK(gaussian_convolution_lsi_bound(1.0, 1.0).bound_value ==
        Catch::Approx(1637.944500994327172343).epsilon(1e-14));
  CHECK(gaussian_convolution_lsi_bound(1.0, 4.0).bound_value ==
        Catch::Approx(130.4775277660341712973).epsilon(1e-14));
  CHECK(gaussian_convolution_lsi_bound(1.0, 0.25).bound_value ==
        Catch::Approx(226595818.2729507522375).epsilon(1e-13));
}

TEST_CASE("transport bound mirrors the lsi closed form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(0.05, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double r = ur(rng);
    const double t = ur(rng);
    const BoundReport a = gaussian_convolution_lsi_bound(r, t);
    const BoundReport b = gaussian_convolution_t2_bound(r, t);
    CHECK(b.bound_value == a.bound_value);
    CHECK(b.log_value == a.log_value);
    CHECK(b.formula_id == "cor41_t2");
    CHECK(b.target == Target::c_t2);
  }
}

TEST_CASE("large time simplification and its domain") {
  CHECK(gaussian_convolution_large_t_bound(1.0, 4.0).bound_value == 134.0);
  CHECK(gaussian_convolution_large_t_bound(0.5, 1.0).bound_value ==
        Catch::Approx(33.5).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_convolution_large_t_bound(1.0, 3.9), std::domain_error);
}

TEST_CASE("two point lower bound values") {
  CHECK(remark3_poincare_lower_bound(1.0, 1.0).bound_value ==
        Catch::Approx(0.2832871132667065792073).epsilon(1e-14));
  CHECK(remark3_poincare_lower_bound(2.0, 0.5).bound_value ==
        Catch::Approx(2.71828182845904523536).epsilon(1e-14));
  CHECK(remark3_poincare_lower_bound(1.0, 1.0).direction == Direction::lower);
}

TEST_CASE("subgaussian bound values and domain") {
  const auto [pi2, lsi2] = subgaussian_bounds(1.0, std::exp(1.0), 2.0);
  CHECK(pi2.bound_value == Catch::Approx(9.436563656918090470721).epsilon(1e-14));
  CHECK(lsi2.bound_value == Catch::Approx(56.61938194150854282432).epsilon(1e-14));

  const double c_sg = 0.5 * (1.0 + std::exp(1.0));
  const auto [pi8, lsi8] = subgaussian_bounds(4.0, c_sg, 8.0);
  CHECK(pi8.bound_value == Catch::Approx(30.87312731383618094144).epsilon(1e-14));
  CHECK(lsi8.bound_value == Catch::Approx(150.0540043089475058124).epsilon(1e-14));
  const auto [pi16, lsi16] = subgaussian_bounds(4.0, c_sg, 16.0);
  CHECK(pi16.bound_value == Catch::Approx(41.00724658696261507863).epsilon(1e-14));
  CHECK(lsi16.bound_value == Catch::Approx(148.4509282598786760772).epsilon(1e-14));

  CHECK_THROWS_AS(subgaussian_bounds(1.0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(subgaussian_bounds(1.0, 2.0, 0.5), std::domain_error);
}

TEST_CASE("local constant of the semigroup") {
  CHECK(c_loc(0.0, 0.5) == 1.0);
  CHECK(c_loc(1.0, 1.0) == Catch::Approx(-std::expm1(-2.0)).epsilon(1e-15));
  // Continuous at kappa = 0, monotone decreasing in kappa.
  CHECK(c_loc(1e-12, 0.5) == Catch::Approx(1.0).margin(1e-9));
  CHECK(c_loc(-1e-12, 0.5) == Catch::Approx(1.0).margin(1e-9));
  double prev = infinity;
  for (double kappa : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const double v = c_loc(kappa, 0.7);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("diffusion bound values") {
  CHECK(diffusion_lsi_bound(1.0, 1.0, std::exp(1.0)).bound_value ==
        Catch::Approx(28.20482864745123496518).epsilon(1e-14));
  CHECK(diffusion_lsi_bound(0.0, 0.5, 2.0).bound_value ==
        Catch::Approx(20.31776616671934371301).epsilon(1e-14));
  CHECK(diffusion_lsi_bound(-1.0, 0.5, 1.0).bound_value ==
        Catch::Approx(10.30969097075427141216).epsilon(1e-14));
}

TEST_CASE("two component mixture bound and degeneracy flag") {
  const BoundReport a = two_mixture_lsi_bound(2.0, 1.0, 1.0);
  CHECK(a.bound_value == Catch::Approx(20.31776616671934371301).epsilon(1e-14));
  CHECK_FALSE(a.degenerate);
  const BoundReport b = two_mixture_lsi_bound(1.0, 3.0, 0.5);
  CHECK(b.bound_value == Catch::Approx(12.6491859729734794378).epsilon(1e-14));
  CHECK(b.degenerate);
  CHECK(two_mixture_lsi_bound(1.0, 1.0, 0.0).bound_value == 0.0);
}

TEST_CASE("bernoulli pair constants") {
  const auto [k_ls, k_chi2] = bernoulli_pi_constants(0.25);
  CHECK(k_ls == Catch::Approx(0.2059898041252705671366).epsilon(1e-14));
  CHECK(k_chi2 == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
  const auto [k_ls1, k_chi21] = bernoulli_pi_constants(0.1);
  CHECK(k_ls1 == Catch::Approx(0.123593882475162340282).epsilon(1e-14));
  CHECK(k_chi21 == Catch::Approx(64.0 / 9.0).epsilon(1e-14));

  // k_ls increases toward the symmetric value 1/4 as p -> 1/2.
  double prev = 0.0;
  for (double p : {0.05, 0.1, 0.2, 0.3, 0.4, 0.49}) {
    const double v = bernoulli_pi_constants(p).first;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(bernoulli_pi_constants(0.4999).first == Catch::Approx(0.25).margin(1e-3));
  CHECK_THROWS_AS(bernoulli_pi_constants(0.5), std::domain_error);
  CHECK_THROWS_AS(bernoulli_pi_constants(0.0), std::domain_error);
}

TEST_CASE("hypercube mixing bound values") {
  const auto [k_ls, k_chi2] = bernoulli_pi_constants(0.25);
  CHECK(hypercube_lsi_bound(k_ls, k_chi2, 1).bound_value ==
        Catch::Approx(5.327343341910680819921).epsilon(1e-13));
  CHECK(hypercube_lsi_bound(k_ls, k_chi2, 3).bound_value ==
        Catch::Approx(87.0132745845411200587).epsilon(1e-13));
  CHECK_THROWS_AS(hypercube_lsi_bound(k_ls, k_chi2, 0), std::invalid_argument);
}

TEST_CASE("explicit bernoulli hypercube bound values") {
  CHECK(bernoulli_hypercube_bound(0.25, 2).bound_value ==
        Catch::Approx(184.4939573445893470722).epsilon(1e-14));
  CHECK(bernoulli_hypercube_bound(0.1, 3).bound_value ==
        Catch::Approx(11929.27074857639552376).epsilon(1e-14));
  CHECK_THROWS_AS(bernoulli_hypercube_bound(0.5, 2), std::domain_error);
}

TEST_CASE("defective inequality tightening is affine in its arguments") {
  CHECK(tighten_defective_lsi(0.0, 0.0, 0.0) == 0.0);
  CHECK(tighten_defective_lsi(1.0, 0.0, 5.0) == 6.0);
  CHECK(tighten_defective_lsi(2.0, 4.0, 1.5) == Catch::Approx(6.5).epsilon(1e-15));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ur(0.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double c = ur(rng), d = ur(rng), cp = ur(rng);
    CHECK(tighten_defective_lsi(c, d, cp) == c + cp * (d / 2.0 + 1.0));
  }
  CHECK_THROWS_AS(tighten_defective_lsi(-1.0, 0.0, 0.0), std::invalid_argument);
  CHECK(c_p_from_lsi(3.5) == 3.5);
}

TEST_CASE("gaussian chi2 helper") {
  CHECK(gaussian_chi2(0.0, 2.0) == 0.0);
  CHECK(gaussian_chi2(4.0, 2.0) == Catch::Approx(6.38905609893065022723).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_chi2(-1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_chi2(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("chi2 tensorization") {
  CHECK(chi2_tensorize({}) == 0.0);
  CHECK(chi2_tensorize({0.5}) == 0.5);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ur(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double a = ur(rng), b = ur(rng);
    CHECK(chi2_tensorize({a, b}) ==
          Catch::Approx((1.0 + a) * (1.0 + b) - 1.0).epsilon(1e-14));
  }
  const std::vector<double> many(200, 0.25);
  CHECK(chi2_tensorize(many) ==
        Catch::Approx(std::expm1(200.0 * std::log1p(0.25))).epsilon(1e-12));
  CHECK(std::isinf(chi2_tensorize({1.0, infinity})));
  const std::vector<double> huge(5000, 1.0);
  CHECK(std::isinf(chi2_tensorize(huge)));
  CHECK_THROWS_AS(chi2_tensorize({-0.1}), std::invalid_argument);
}

TEST_CASE("overflow reports infinity but keeps the logarithm") {
  const BoundReport r = gaussian_convolution_lsi_bound(20.0, 0.1);
  CHECK(std::isinf(r.bound_value));
  CHECK(is_finite(r.log_value));
  CHECK(r.log_value == Catch::Approx(std::log(6.0 * 1600.1) + 16000.0).epsilon(1e-12));

  const MixtureBoundInputs big(1.0, 1e300, DualExponent::from_p(2.0));
  const BoundReport m = lsi_mixture_bound(big);
  CHECK(std::isinf(m.bound_value));
  CHECK(is_finite(m.log_value));

  const BoundReport low = remark3_poincare_lower_bound(100.0, 0.001);
  CHECK(std::isinf(low.bound_value));
  CHECK(is_finite(low.log_value));
}

TEST_CASE("log values agree with logs of finite bounds") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(0.2, 4.0);
  for (int i = 0; i < 30; ++i) {
    const double r = ur(rng), t = ur(rng);
    const BoundReport g = gaussian_convolution_lsi_bound(r, t);
    CHECK(g.log_value == Catch::Approx(std::log(g.bound_value)).epsilon(1e-12));
    const BoundReport s = subgaussian_bounds(1.0, 1.0 + ur(rng), 1.0 + ur(rng)).second;
    CHECK(s.log_value == Catch::Approx(std::log(s.bound_value)).epsilon(1e-12));
    const MixtureBoundInputs in(ur(rng), 1.0 + ur(rng), DualExponent::from_p(1.0 + ur(rng)));
    const BoundReport m = poincare_mixture_bound(in);
    CHECK(m.log_value == Catch::Approx(std::log(m.bound_value)).epsilon(1e-12));
  }
}

TEST_CASE("formula catalog is complete and distinct") {
  const auto& catalog = formula_catalog();
  CHECK(catalog.size() == 13);
  std::set<std::string> ids;
  for (const FormulaInfo& info : catalog) {
    CHECK(!info.expression.empty());
    CHECK(!info.parameters.empty());
    ids.insert(info.id);
  }
  CHECK(ids.size() == 13);
  CHECK(ids.count("thm31_pi") == 1);
  CHECK(ids.count("propA_tighten") == 1);
}
