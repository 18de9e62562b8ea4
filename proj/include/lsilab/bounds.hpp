#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

// Exponent pair (p, p*) with 1/p + 1/p* = 1; p = inf is a first-class value
// with p* = 1, matching the extended-moment variant of the mixture bounds.
struct DualExponent {
  double p;
  double p_star;

  static DualExponent from_p(double p) {
    require(p > 1.0, "DualExponent: p must satisfy p > 1 (p = inf allowed)");
    return {p, std::isinf(p) ? 1.0 : p / (p - 1.0)};
  }
};

struct MixtureBoundInputs {
  double k_ls;             // uniform log-Sobolev constant over components
  double k_p;              // K_{p,chi2} moment, always >= 1
  DualExponent exponent;
  double k_poincare;       // uniform Poincare constant; defaults to k_ls
  double log_k_p;          // log of k_p, supplied directly when k_p overflows

  MixtureBoundInputs(double k_ls_, double k_p_, DualExponent e,
                     double k_poincare_ = -1.0, double log_k_p_ = -1.0)
      : k_ls(k_ls_),
        k_p(k_p_),
        exponent(e),
        k_poincare(k_poincare_ < 0.0 ? k_ls_ : k_poincare_),
        log_k_p(log_k_p_ < 0.0 ? std::log(k_p_) : log_k_p_) {
    require(k_ls > 0.0, "MixtureBoundInputs: k_ls must be positive");
    require(k_p >= 1.0, "MixtureBoundInputs: k_p must be >= 1");
    require(k_poincare <= k_ls * (1.0 + 1e-12),
            "MixtureBoundInputs: k_poincare cannot exceed k_ls");
  }
};

enum class Direction { upper, lower };
enum class Target { c_p, c_ls, c_t2 };

inline const char* to_string(Direction d) {
  return d == Direction::upper ? "upper" : "lower";
}
inline const char* to_string(Target t) {
  switch (t) {
    case Target::c_p: return "C_P";
    case Target::c_ls: return "C_LS";
    default: return "C_T2";
  }
}

struct BoundReport {
  std::string formula_id;
  std::vector<std::pair<std::string, double>> inputs;
  double bound_value = 0.0;    // +inf when the closed form overflows
  double log_value = 0.0;      // log of the bound, always meaningful
  Direction direction = Direction::upper;
  Target target = Target::c_ls;
  bool degenerate = false;     // flagged when the printed formula is vacuous
};

namespace detail {

// exp(x) reported as +inf past the overflow guard, with the log kept exact.
constexpr double exp_overflow_guard = 700.0;

inline double guarded_exp(double x) {
  return x > exp_overflow_guard ? infinity : std::exp(x);
}

// log(a + e^L) without forming e^L when it overflows.
inline double log_add_exp(double a, double L) {
  if (L > exp_overflow_guard) return L + std::log1p(a * std::exp(-L));
  return std::log(a + std::exp(L));
}

}  // namespace detail

// Catalog id thm31_pi: K_P (p* + K_{p,chi2}^{p*}), an upper bound on the
// Poincare constant of the mixture.
inline BoundReport poincare_mixture_bound(const MixtureBoundInputs& in) {
  const double ps = in.exponent.p_star;
  const double L = ps * in.log_k_p;  // log K^{p*}
  const double kp_pow = detail::guarded_exp(L);
  const double log_value = std::log(in.k_poincare) + detail::log_add_exp(ps, L);
  return {"thm31_pi",
          {{"k_poincare", in.k_poincare}, {"k_p", in.k_p}, {"p", in.exponent.p}},
          in.k_poincare * (ps + kp_pow),
          log_value,
          Direction::upper,
          Target::c_p};
}

// Catalog id thm31_lsi: 3 K_LS (p* + K^{p*}) (1 + log K^{p*}).
inline BoundReport lsi_mixture_bound(const MixtureBoundInputs& in) {
  const double ps = in.exponent.p_star;
  const double L = ps * in.log_k_p;
  const double kp_pow = detail::guarded_exp(L);
  const double log_value = std::log(3.0 * in.k_ls) + detail::log_add_exp(ps, L) +
                           std::log1p(L);
  return {"thm31_lsi",
          {{"k_ls", in.k_ls}, {"k_p", in.k_p}, {"p", in.exponent.p}},
          3.0 * in.k_ls * (ps + kp_pow) * (1.0 + L),
          log_value,
          Direction::upper,
          Target::c_ls};
}

// Catalog id cor41_gauss: 6 (4R^2 + t) e^{4R^2/t} for the Gaussian
// convolution mu * gamma_{0,t} of a measure supported in B(0,R).
inline BoundReport gaussian_convolution_lsi_bound(double r, double t) {
  require(r >= 0.0, "gaussian_convolution_lsi_bound: R must be nonnegative");
  require(t > 0.0, "gaussian_convolution_lsi_bound: t must be positive");
  const double e = 4.0 * r * r / t;
  return {"cor41_gauss",
          {{"r", r}, {"t", t}},
          6.0 * (4.0 * r * r + t) * detail::guarded_exp(e),
          std::log(6.0 * (4.0 * r * r + t)) + e,
          Direction::upper,
          Target::c_ls};
}

// Catalog id cor41_t2: the same constant read as a transport-entropy bound.
inline BoundReport gaussian_convolution_t2_bound(double r, double t) {
  BoundReport rep = gaussian_convolution_lsi_bound(r, t);
  rep.formula_id = "cor41_t2";
  rep.target = Target::c_t2;
  return rep;
}

// Catalog id rem3_large_t: t + 130 R^2, valid only for t >= 4R^2.
inline BoundReport gaussian_convolution_large_t_bound(double r, double t) {
  require(r >= 0.0, "gaussian_convolution_large_t_bound: R must be nonnegative");
  require_domain(t >= 4.0 * r * r,
                 "gaussian_convolution_large_t_bound: requires t >= 4R^2");
  const double v = t + 130.0 * r * r;
  return {"rem3_large_t", {{"r", r}, {"t", t}}, v, std::log(v),
          Direction::upper, Target::c_ls};
}

// Catalog id rem3_lower: (R^2/4) e^{R^2/(8t)}, a lower bound on the Poincare
// constant of the symmetric two-point convolution (mu = (delta_-R + delta_R)/2).
inline BoundReport remark3_poincare_lower_bound(double r, double t) {
  require(r > 0.0, "remark3_poincare_lower_bound: R must be positive");
  require(t > 0.0, "remark3_poincare_lower_bound: t must be positive");
  const double e = r * r / (8.0 * t);
  return {"rem3_lower",
          {{"r", r}, {"t", t}},
          0.25 * r * r * detail::guarded_exp(e),
          std::log(0.25 * r * r) + e,
          Direction::lower,
          Target::c_p};
}

// Catalog ids thm42_pi / thm42_lsi: bounds under the pairwise sub-Gaussian
// moment condition  E exp(|X-X'|^2/sigma^2) <= C_SG, for t > sigma^2.
inline std::pair<BoundReport, BoundReport> subgaussian_bounds(double sigma2,
                                                              double c_sg,
                                                              double t) {
  require(sigma2 > 0.0, "subgaussian_bounds: sigma^2 must be positive");
  require(c_sg >= 1.0, "subgaussian_bounds: C_SG must be >= 1");
  require_domain(t > sigma2, "subgaussian_bounds: requires t > sigma^2");
  const double ratio = sigma2 / (t - sigma2);
  const double brace = t / (t - sigma2) + std::pow(c_sg, ratio);
  const double log_brace = detail::log_add_exp(t / (t - sigma2), ratio * std::log(c_sg));
  const double tail = 1.0 + ratio * std::log(c_sg);
  BoundReport pi{"thm42_pi",
                 {{"sigma2", sigma2}, {"c_sg", c_sg}, {"t", t}},
                 t * brace,
                 std::log(t) + log_brace,
                 Direction::upper,
                 Target::c_p};
  BoundReport lsi{"thm42_lsi",
                  {{"sigma2", sigma2}, {"c_sg", c_sg}, {"t", t}},
                  3.0 * t * brace * tail,
                  std::log(3.0 * t) + log_brace + std::log(tail),
                  Direction::upper,
                  Target::c_ls};
  return {pi, lsi};
}

// Local log-Sobolev constant of a semigroup with curvature kappa at time t:
// (1 - e^{-2 kappa t})/kappa, continuously extended to 2t at kappa = 0.
inline double c_loc(double kappa, double t) {
  require(t >= 0.0, "c_loc: t must be nonnegative");
  if (kappa == 0.0) return 2.0 * t;
  return -std::expm1(-2.0 * kappa * t) / kappa;
}

// Catalog id cor43_diffusion: 6 C_loc(kappa,t) K_inf (1 + log K_inf).
inline BoundReport diffusion_lsi_bound(double kappa, double t, double k_inf) {
  require(k_inf >= 1.0, "diffusion_lsi_bound: K_inf must be >= 1");
  const double c = c_loc(kappa, t);
  const double v = 6.0 * c * k_inf * (1.0 + std::log(k_inf));
  return {"cor43_diffusion",
          {{"kappa", kappa}, {"t", t}, {"k_inf", k_inf}},
          v,
          std::log(v),
          Direction::upper,
          Target::c_ls};
}

// Catalog id cor44_two_mixture: 6 max{C0, C1} K_chi2 (1 + log(1 + K_chi2)),
// independent of the mixing weight. The printed formula vanishes as
// K_chi2 -> 0, so reports with K_chi2 < 1 carry a degenerate flag rather
// than a silent correction.
inline BoundReport two_mixture_lsi_bound(double c0, double c1, double k_chi2) {
  require(c0 > 0.0 && c1 > 0.0, "two_mixture_lsi_bound: component constants must be positive");
  require(k_chi2 >= 0.0, "two_mixture_lsi_bound: K_chi2 must be nonnegative");
  const double v = 6.0 * std::max(c0, c1) * k_chi2 * (1.0 + std::log1p(k_chi2));
  BoundReport rep{"cor44_two_mixture",
                  {{"c0", c0}, {"c1", c1}, {"k_chi2", k_chi2}},
                  v,
                  v > 0.0 ? std::log(v) : -infinity,
                  Direction::upper,
                  Target::c_ls};
  rep.degenerate = k_chi2 < 1.0;
  return rep;
}

// Catalog id cor45_hypercube: 6k K_LS(pi) (1 + K_chi2(pi))^k (1 + log(1 + K_chi2(pi)))
// for mixing measures supported on a Hamming-diameter-k set.
inline BoundReport hypercube_lsi_bound(double k_ls_pi, double k_chi2_pi, int k) {
  require(k_ls_pi > 0.0, "hypercube_lsi_bound: K_LS(pi) must be positive");
  require(k_chi2_pi >= 0.0, "hypercube_lsi_bound: K_chi2(pi) must be nonnegative");
  require(k >= 1, "hypercube_lsi_bound: k must be a positive integer");
  const double L = k * std::log1p(k_chi2_pi);
  const double v = 6.0 * k * k_ls_pi * detail::guarded_exp(L) *
                   (1.0 + std::log1p(k_chi2_pi));
  return {"cor45_hypercube",
          {{"k_ls_pi", k_ls_pi}, {"k_chi2_pi", k_chi2_pi}, {"k", double(k)}},
          v,
          std::log(6.0 * k * k_ls_pi) + L + std::log1p(std::log1p(k_chi2_pi)),
          Direction::upper,
          Target::c_ls};
}

// Optimal log-Sobolev and chi-squared constants of the Bernoulli pair
// pi_0 = Bernoulli(p), pi_1 = Bernoulli(1-p) under the discrete gradient:
//   K_LS(pi)   = p(1-p) / (2(1-2p)) * log((1-p)/p)
//   K_chi2(pi) = (1-p)^2/p + p^2/(1-p) - 1.
inline std::pair<double, double> bernoulli_pi_constants(double p) {
  require_domain(p > 0.0 && p < 0.5, "bernoulli_pi_constants: requires p in (0, 1/2)");
  const double k_ls = p * (1.0 - p) / (2.0 * (1.0 - 2.0 * p)) * std::log((1.0 - p) / p);
  const double k_chi2 = sq(1.0 - p) / p + sq(p) / (1.0 - p) - 1.0;
  return {k_ls, k_chi2};
}

// Catalog id cor45_bernoulli: 6k / (p^{k-1} (1-2p)) * log^2(1/p).
inline BoundReport bernoulli_hypercube_bound(double p, int k) {
  require_domain(p > 0.0 && p < 0.5, "bernoulli_hypercube_bound: requires p in (0, 1/2)");
  require(k >= 1, "bernoulli_hypercube_bound: k must be a positive integer");
  const double v =
      6.0 * k / (std::pow(p, k - 1) * (1.0 - 2.0 * p)) * sq(std::log(1.0 / p));
  return {"cor45_bernoulli",
          {{"p", p}, {"k", double(k)}},
          v,
          std::log(6.0 * k) - (k - 1) * std::log(p) - std::log1p(-2.0 * p) +
              2.0 * std::log(std::log(1.0 / p)),
          Direction::upper,
          Target::c_ls};
}

// Catalog id propA_tighten: a defective log-Sobolev inequality
// ent(f^2) <= 2C E Gamma(f) + D E(f^2) plus a Poincare inequality tightens
// to a full log-Sobolev constant C + C_P (D/2 + 1).
inline double tighten_defective_lsi(double c, double d, double c_p) {
  require(c >= 0.0 && d >= 0.0 && c_p >= 0.0,
          "tighten_defective_lsi: arguments must be nonnegative");
  return c + c_p * (d / 2.0 + 1.0);
}

inline BoundReport tighten_defective_lsi_report(double c, double d, double c_p) {
  const double v = tighten_defective_lsi(c, d, c_p);
  return {"propA_tighten",
          {{"c", c}, {"d", d}, {"c_p", c_p}},
          v,
          v > 0.0 ? std::log(v) : -infinity,
          Direction::upper,
          Target::c_ls};
}

// Companion fact: a log-Sobolev constant is itself a Poincare constant.
inline double c_p_from_lsi(double c_ls) {
  require(c_ls >= 0.0, "c_p_from_lsi: constant must be nonnegative");
  return c_ls;
}

// chi2 between two Gaussians with common covariance t*I at squared distance
// x_dist2: e^{x_dist2/t} - 1.
inline double gaussian_chi2(double x_dist2, double t) {
  require(x_dist2 >= 0.0, "gaussian_chi2: squared distance must be nonnegative");
  require(t > 0.0, "gaussian_chi2: t must be positive");
  return std::expm1(x_dist2 / t);
}

// chi2 of a product measure pair from per-coordinate chi2 values:
// prod_i (1 + c_i) - 1, evaluated through log1p so long products stay exact.
inline double chi2_tensorize(const std::vector<double>& component_chi2s) {
  CompensatedSum log_prod;
  for (double c : component_chi2s) {
    require(c >= 0.0, "chi2_tensorize: chi2 values must be nonnegative");
    if (std::isinf(c)) return infinity;
    log_prod.add(std::log1p(c));
  }
  const double L = log_prod.value();
  return L > detail::exp_overflow_guard ? infinity : std::expm1(L);
}

struct FormulaInfo {
  std::string id;
  std::string parameters;
  std::string expression;
  Target target;
  Direction direction;
};

// The stable formula catalog backing report provenance and `list-formulas`.
inline const std::vector<FormulaInfo>& formula_catalog() {
  static const std::vector<FormulaInfo> catalog = {
      {"thm31_pi", "k_poincare, k_p, p", "K_P (p* + K_p^{p*})", Target::c_p,
       Direction::upper},
      {"thm31_lsi", "k_ls, k_p, p", "3 K_LS (p* + K_p^{p*}) (1 + log K_p^{p*})",
       Target::c_ls, Direction::upper},
      {"cor41_gauss", "r, t", "6 (4R^2 + t) e^{4R^2/t}", Target::c_ls,
       Direction::upper},
      {"cor41_t2", "r, t", "6 (4R^2 + t) e^{4R^2/t}", Target::c_t2,
       Direction::upper},
      {"rem3_large_t", "r, t (t >= 4R^2)", "t + 130 R^2", Target::c_ls,
       Direction::upper},
      {"rem3_lower", "r, t", "(R^2/4) e^{R^2/(8t)}", Target::c_p,
       Direction::lower},
      {"thm42_pi", "sigma2, c_sg, t (t > sigma2)",
       "t (t/(t-s2) + C_SG^{s2/(t-s2)})", Target::c_p, Direction::upper},
      {"thm42_lsi", "sigma2, c_sg, t (t > sigma2)",
       "3t (t/(t-s2) + C_SG^{s2/(t-s2)}) (1 + s2/(t-s2) log C_SG)",
       Target::c_ls, Direction::upper},
      {"cor43_diffusion", "kappa, t, k_inf",
       "6 C_loc(kappa,t) K_inf (1 + log K_inf)", Target::c_ls, Direction::upper},
      {"cor44_two_mixture", "c0, c1, k_chi2",
       "6 max{C0,C1} K_chi2 (1 + log(1 + K_chi2))", Target::c_ls,
       Direction::upper},
      {"cor45_hypercube", "k_ls_pi, k_chi2_pi, k",
       "6k K_LS (1 + K_chi2)^k (1 + log(1 + K_chi2))", Target::c_ls,
       Direction::upper},
      {"cor45_bernoulli", "p, k", "6k / (p^{k-1} (1-2p)) log^2(1/p)",
       Target::c_ls, Direction::upper},
      {"propA_tighten", "c, d, c_p", "C + C_P (D/2 + 1)", Target::c_ls,
       Direction::upper},
  };
  return catalog;
}

}  // namespace lsilab
