#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lsilab/measures.hpp"
#include "lsilab/random_instances.hpp"

namespace lsilab {

// One line of the randomized property suite shared by the test binaries and
// the `selfcheck` subcommand: the worst observed slack (or residual) over all
// instances, judged against the stated tolerance.
struct PropertyCheck {
  std::string name;
  int instances = 0;
  double worst = 0.0;   // most adverse value seen
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline std::size_t random_size(InstanceRng& rng, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> pick(lo, hi);
  return pick(rng.engine());
}

}  // namespace detail

// Slack of the divergence inequality on random (pi, rho, f) triples over at
// most 8 states; must stay above -1e-10.
inline PropertyCheck check_dv_inequality_suite(std::uint64_t seed, int n_instances) {
  InstanceRng rng(seed);
  double worst = infinity;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n = detail::random_size(rng, 2, 8);
    const DiscreteMeasure pi = rng.measure(n);
    const DiscreteMeasure rho = rng.measure(n);
    const DiscreteFunction f = rng.nonneg_function(n);
    worst = std::min(worst, check_dv_inequality(pi, rho, f));
  }
  return {"divergence inequality slack", n_instances, worst, -1e-10, worst >= -1e-10};
}

inline PropertyCheck check_variance_decomposition_suite(std::uint64_t seed,
                                                        int n_instances) {
  InstanceRng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n_mix = detail::random_size(rng, 1, 6);
    const std::size_t n_target = detail::random_size(rng, 2, 8);
    const DiscreteMeasure mu = rng.measure(n_mix);
    const auto rows = rng.kernel_rows(n_mix, n_target);
    const DiscreteFunction f = rng.signed_function(n_target);
    worst = std::max(worst, check_variance_decomposition(mu, rows, f));
  }
  return {"variance decomposition residual", n_instances, worst, 1e-10, worst <= 1e-10};
}

inline PropertyCheck check_entropy_decomposition_suite(std::uint64_t seed,
                                                       int n_instances) {
  InstanceRng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n_mix = detail::random_size(rng, 1, 6);
    const std::size_t n_target = detail::random_size(rng, 2, 8);
    const DiscreteMeasure mu = rng.measure(n_mix);
    const auto rows = rng.kernel_rows(n_mix, n_target);
    const DiscreteFunction f = rng.signed_function(n_target);
    worst = std::max(worst, check_entropy_decomposition(mu, rows, f));
  }
  return {"entropy decomposition residual", n_instances, worst, 1e-10, worst <= 1e-10};
}

// Convexity of chi2 in its first argument along mixtures:
// chi2(mu P || P_x) <= sum_x' mu(x') chi2(P_x' || P_x).
inline PropertyCheck check_chi2_convexity_suite(std::uint64_t seed, int n_instances) {
  InstanceRng rng(seed);
  double worst = infinity;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n_mix = detail::random_size(rng, 2, 6);
    const std::size_t n_target = detail::random_size(rng, 2, 8);
    const DiscreteMeasure mu = rng.measure(n_mix);
    const auto rows = rng.kernel_rows(n_mix, n_target);
    std::vector<double> mixed(n_target, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t y = 0; y < n_target; ++y)
        mixed[y] += mu.weight(i) * rows[i].weight(y);
    const DiscreteMeasure mix = DiscreteMeasure::normalized(std::move(mixed));
    for (std::size_t x = 0; x < rows.size(); ++x) {
      const double lhs = chi2_divergence(mix, rows[x]).value;
      CompensatedSum rhs;
      for (std::size_t i = 0; i < rows.size(); ++i)
        rhs.add(mu.weight(i) * chi2_divergence(rows[i], rows[x]).value);
      worst = std::min(worst, rhs.value() - lhs);
    }
  }
  return {"chi2 mixture convexity slack", n_instances, worst, -1e-10, worst >= -1e-10};
}

// Divergences vanish exactly on identical arguments and are positive apart.
inline PropertyCheck check_divergence_nonnegativity_suite(std::uint64_t seed,
                                                          int n_instances) {
  InstanceRng rng(seed);
  double worst = infinity;
  bool identity_ok = true;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n = detail::random_size(rng, 2, 8);
    const DiscreteMeasure a = rng.measure(n);
    const DiscreteMeasure b = rng.measure(n);
    worst = std::min({worst, kl_divergence(a, b).value, chi2_divergence(a, b).value});
    identity_ok = identity_ok && std::abs(kl_divergence(a, a).value) <= 1e-12 &&
                  std::abs(chi2_divergence(a, a).value) <= 1e-12;
  }
  const bool pass = worst >= 0.0 && identity_ok;
  return {"divergence nonnegativity", n_instances, worst, 0.0, pass};
}

// K_{p,chi2} is nondecreasing in p, and its large-p limit meets the p = inf
// branch on strictly positive instances.
inline PropertyCheck check_k_p_monotonicity_suite(std::uint64_t seed, int n_instances) {
  InstanceRng rng(seed);
  double worst = infinity;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n = detail::random_size(rng, 2, 6);
    const DiscreteMeasure mu = rng.measure(n);
    std::uniform_real_distribution<double> unif(0.0, 4.0);
    std::vector<std::vector<double>> chi2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        chi2[i][j] = chi2[j][i] = unif(rng.engine());
    double prev = 1.0;
    for (double p : {1.5, 2.0, 4.0, 8.0, 16.0}) {
      const double kp = k_p_chi2_discrete(mu, chi2, p);
      worst = std::min(worst, kp - prev);
      prev = kp;
    }
    const double k_inf = k_p_chi2_discrete(mu, chi2, infinity);
    const double k_big = k_p_chi2_discrete(mu, chi2, 65536.0);
    worst = std::min({worst, k_inf - k_big, 1e-2 - (k_inf - k_big)});
  }
  return {"k_p moment monotonicity in p", n_instances, worst, -1e-10, worst >= -1e-10};
}

// ent(c g) = c ent(g) exactly for positive scalars.
inline PropertyCheck check_entropy_scaling_suite(std::uint64_t seed, int n_instances) {
  InstanceRng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < n_instances; ++k) {
    const std::size_t n = detail::random_size(rng, 2, 8);
    const DiscreteMeasure rho = rng.measure(n);
    const DiscreteFunction g = rng.nonneg_function(n);
    const double base = entropy(rho, g);
    for (double c : {0.5, 3.0}) {
      DiscreteFunction cg(g);
      for (double& v : cg) v *= c;
      const double rel = std::abs(entropy(rho, cg) - c * base) /
                         std::max(1.0, std::abs(c * base));
      worst = std::max(worst, rel);
    }
  }
  return {"entropy scaling identity", n_instances, worst, 1e-12, worst <= 1e-12};
}

inline std::vector<PropertyCheck> run_measure_property_suite(std::uint64_t seed,
                                                             int n_instances) {
  return {
      check_dv_inequality_suite(seed, n_instances),
      check_variance_decomposition_suite(seed + 1, n_instances),
      check_entropy_decomposition_suite(seed + 2, n_instances),
      check_chi2_convexity_suite(seed + 3, n_instances),
      check_divergence_nonnegativity_suite(seed + 4, n_instances),
      check_k_p_monotonicity_suite(seed + 5, n_instances),
      check_entropy_scaling_suite(seed + 6, n_instances),
  };
}

}  // namespace lsilab
