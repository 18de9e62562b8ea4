#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

// A finitely supported probability measure on an abstract finite state set.
// States are opaque 64-bit identifiers; functions and kernels align with the
// measure positionally, in the order of `states`.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<std::uint64_t> states, std::vector<double> weights)
      : states_(std::move(states)), weights_(std::move(weights)) {
    validate();
  }

  explicit DiscreteMeasure(std::vector<double> weights)
      : weights_(std::move(weights)) {
    states_.resize(weights_.size());
    std::iota(states_.begin(), states_.end(), std::uint64_t{0});
    validate();
  }

  // Renormalizes nonnegative weights to total mass 1 before constructing.
  static DiscreteMeasure normalized(std::vector<double> weights) {
    double total = compensated_total(weights);
    require(total > 0.0, "DiscreteMeasure: total weight must be positive");
    for (double& w : weights) w /= total;
    return DiscreteMeasure(std::move(weights));
  }

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::uint64_t>& states() const { return states_; }
  double weight(std::size_t i) const { return weights_[i]; }

  bool same_state_set(const DiscreteMeasure& other) const {
    return states_ == other.states_;
  }

 private:
  void validate() const {
    require(!weights_.empty(), "DiscreteMeasure: empty support");
    require(states_.size() == weights_.size(),
            "DiscreteMeasure: states/weights length mismatch");
    CompensatedSum total;
    for (double w : weights_) {
      require(std::isfinite(w) && w >= 0.0,
              "DiscreteMeasure: weights must be finite and nonnegative");
      total.add(w);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12,
            "DiscreteMeasure: weights must sum to 1 within 1e-12");
    std::unordered_set<std::uint64_t> seen(states_.begin(), states_.end());
    require(seen.size() == states_.size(), "DiscreteMeasure: duplicate states");
  }

  std::vector<std::uint64_t> states_;
  std::vector<double> weights_;
};

using DiscreteFunction = std::vector<double>;

enum class DivergenceKind { kl, chi2 };

struct DivergenceValue {
  double value = 0.0;  // nonnegative, +inf iff absolute continuity fails
  DivergenceKind kind = DivergenceKind::kl;
};

namespace detail {

inline void check_association(const DiscreteMeasure& rho, const DiscreteFunction& f) {
  require(rho.size() == f.size(), "function/measure dimension mismatch");
  for (double v : f) require(std::isfinite(v), "function values must be finite");
}

// Clamp tiny negative roundoff on quantities that are nonnegative exactly.
inline double clamp_roundoff(double x) {
  return (x < 0.0 && x > -1e-12) ? 0.0 : x;
}

}  // namespace detail

inline double mean(const DiscreteMeasure& rho, const DiscreteFunction& f) {
  detail::check_association(rho, f);
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(rho.weight(i) * f[i]);
  return s.value();
}

inline double variance(const DiscreteMeasure& rho, const DiscreteFunction& f) {
  detail::check_association(rho, f);
  const double m = mean(rho, f);
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(rho.weight(i) * sq(f[i] - m));
  return detail::clamp_roundoff(s.value());
}

// ent_rho(g) = E[g log g] - E[g] log E[g] for g >= 0, with 0 log 0 = 0.
inline double entropy(const DiscreteMeasure& rho, const DiscreteFunction& g) {
  detail::check_association(rho, g);
  CompensatedSum glogg;
  CompensatedSum eg;
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(g[i] >= 0.0, "entropy: nonnegative function required");
    const double w = rho.weight(i);
    eg.add(w * g[i]);
    if (w > 0.0 && g[i] > 0.0) glogg.add(w * g[i] * std::log(g[i]));
  }
  const double m = eg.value();
  const double cross = (m > 0.0) ? m * std::log(m) : 0.0;
  return detail::clamp_roundoff(glogg.value() - cross);
}

inline DivergenceValue kl_divergence(const DiscreteMeasure& rho1,
                                     const DiscreteMeasure& rho2) {
  require(rho1.same_state_set(rho2), "kl_divergence: mismatched state sets");
  CompensatedSum s;
  for (std::size_t i = 0; i < rho1.size(); ++i) {
    const double a = rho1.weight(i), b = rho2.weight(i);
    if (a == 0.0) continue;
    if (b == 0.0) return {infinity, DivergenceKind::kl};
    s.add(a * std::log(a / b));
  }
  return {detail::clamp_roundoff(s.value()), DivergenceKind::kl};
}

inline DivergenceValue chi2_divergence(const DiscreteMeasure& rho1,
                                       const DiscreteMeasure& rho2) {
  require(rho1.same_state_set(rho2), "chi2_divergence: mismatched state sets");
  CompensatedSum s;
  for (std::size_t i = 0; i < rho1.size(); ++i) {
    const double a = rho1.weight(i), b = rho2.weight(i);
    if (a == 0.0) continue;
    if (b == 0.0) return {infinity, DivergenceKind::chi2};
    s.add(a * a / b);
  }
  // sum a_i^2/b_i - 1 == var_{rho2}(d rho1/d rho2)
  return {detail::clamp_roundoff(s.value() - 1.0), DivergenceKind::chi2};
}

// K_{p,chi2}: the L^p(mu x mu) norm of 1 + chi2 between component pairs.
// pairwise_chi2[i][j] must hold chi2(P_i || P_j) over mu's support; p = inf
// returns 1 + max over pairs carrying positive mu x mu mass.
inline double k_p_chi2_discrete(const DiscreteMeasure& mu,
                                const std::vector<std::vector<double>>& pairwise_chi2,
                                double p) {
  require(p > 1.0, "k_p_chi2_discrete: exponent must satisfy p > 1");
  const std::size_t n = mu.size();
  require(pairwise_chi2.size() == n, "k_p_chi2_discrete: matrix shape mismatch");
  for (const auto& row : pairwise_chi2)
    require(row.size() == n, "k_p_chi2_discrete: matrix shape mismatch");

  if (std::isinf(p)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (mu.weight(i) * mu.weight(j) == 0.0) continue;
        require(pairwise_chi2[i][j] >= 0.0, "k_p_chi2_discrete: negative chi2 entry");
        worst = std::max(worst, pairwise_chi2[i][j]);
      }
    return 1.0 + worst;
  }

  // Work with log terms so large chi2 entries cannot overflow the moment sum.
  std::vector<double> log_terms;
  log_terms.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double mass = mu.weight(i) * mu.weight(j);
      if (mass == 0.0) continue;
      const double c = pairwise_chi2[i][j];
      require(c >= 0.0, "k_p_chi2_discrete: negative chi2 entry");
      if (std::isinf(c)) return infinity;
      log_terms.push_back(std::log(mass) + p * std::log1p(c));
    }
  const double log_moment = log_sum_exp(log_terms);
  return std::exp(log_moment / p);
}

// Slack (right minus left side) of the divergence inequality
//   E_pi f log(E_pi f / E_rho f) <= ent_pi(f) + E_pi f log(1 + chi2(pi||rho)),
// with both sides zero when E_pi f = 0. Nonnegative slack means it holds.
inline double check_dv_inequality(const DiscreteMeasure& pi,
                                  const DiscreteMeasure& rho,
                                  const DiscreteFunction& f) {
  detail::check_association(pi, f);
  require(pi.same_state_set(rho), "check_dv_inequality: mismatched state sets");
  for (double v : f) require(v >= 0.0, "check_dv_inequality: f must be nonnegative");

  const double epi = mean(pi, f);
  if (epi == 0.0) return 0.0;
  const double chi2 = chi2_divergence(pi, rho).value;
  if (std::isinf(chi2)) return infinity;
  const double erho = mean(rho, f);
  const double lhs = epi * std::log(epi / erho);
  const double rhs = entropy(pi, f) + epi * std::log1p(chi2);
  return rhs - lhs;
}

namespace detail {

inline DiscreteMeasure mixture_of_rows(const DiscreteMeasure& mu,
                                       const std::vector<DiscreteMeasure>& rows) {
  require(rows.size() == mu.size(), "kernel row count must match mixing support");
  const std::size_t m = rows.front().size();
  for (const auto& r : rows)
    require(r.same_state_set(rows.front()), "kernel rows must share a state set");
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t y = 0; y < m; ++y) w[y] += mu.weight(i) * rows[i].weight(y);
  return DiscreteMeasure::normalized(std::move(w));
}

}  // namespace detail

// Residual of var_{mu P}(f) = E var_{P_X} f + var E_{P_X} f on a finite kernel.
inline double check_variance_decomposition(const DiscreteMeasure& mu,
                                           const std::vector<DiscreteMeasure>& rows,
                                           const DiscreteFunction& f) {
  const DiscreteMeasure mix = detail::mixture_of_rows(mu, rows);
  detail::check_association(mix, f);
  CompensatedSum within;
  DiscreteFunction row_means(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    within.add(mu.weight(i) * variance(rows[i], f));
    row_means[i] = mean(rows[i], f);
  }
  const double decomposed = within.value() + variance(mu, row_means);
  return std::abs(variance(mix, f) - decomposed);
}

// Residual of ent_{mu P}(f^2) = E ent_{P_X} f^2 + ent E_{P_X} f^2.
inline double check_entropy_decomposition(const DiscreteMeasure& mu,
                                          const std::vector<DiscreteMeasure>& rows,
                                          const DiscreteFunction& f) {
  const DiscreteMeasure mix = detail::mixture_of_rows(mu, rows);
  detail::check_association(mix, f);
  DiscreteFunction f2(f.size());
  for (std::size_t y = 0; y < f.size(); ++y) f2[y] = sq(f[y]);
  CompensatedSum within;
  DiscreteFunction row_means(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    within.add(mu.weight(i) * entropy(rows[i], f2));
    row_means[i] = mean(rows[i], f2);
  }
  const double decomposed = within.value() + entropy(mu, row_means);
  return std::abs(entropy(mix, f2) - decomposed);
}

}  // namespace lsilab
