#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lsilab/hypercube.hpp"
#include "lsilab/measures.hpp"

namespace lsilab {

// Seeded generators for property-test instances. Weight vectors come from a
// symmetric Dirichlet with concentration 1 (normalized exponentials), floored
// at 1e-6 and renormalized so that generic instances never trip the
// absolute-continuity branch; singular cases are constructed explicitly.
class InstanceRng {
 public:
  explicit InstanceRng(std::uint64_t seed) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }

  std::vector<double> dirichlet_weights(std::size_t n, double floor = 1e-6) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
      x = expo(engine_);
      total += x;
    }
    for (double& x : w) x = std::max(x / total, floor);
    total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return w;
  }

  DiscreteMeasure measure(std::size_t n) {
    return DiscreteMeasure::normalized(dirichlet_weights(n));
  }

  // Nonnegative test function with occasional exact zeros (0 log 0 branch).
  DiscreteFunction nonneg_function(std::size_t n) {
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    std::bernoulli_distribution zero(0.1);
    DiscreteFunction f(n);
    for (double& v : f) v = zero(engine_) ? 0.0 : unif(engine_);
    return f;
  }

  DiscreteFunction signed_function(std::size_t n) {
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    DiscreteFunction f(n);
    for (double& v : f) v = unif(engine_);
    return f;
  }

  std::vector<DiscreteMeasure> kernel_rows(std::size_t n_rows, std::size_t n_states) {
    std::vector<DiscreteMeasure> rows;
    rows.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) rows.push_back(measure(n_states));
    return rows;
  }

  HypercubeInstance hypercube_instance(int n_max = 6,
                                       const std::vector<double>& p_choices = {0.1, 0.25, 0.4},
                                       std::size_t max_support = 8) {
    std::uniform_int_distribution<int> pick_n(1, n_max);
    const int n = pick_n(engine_);
    std::uniform_int_distribution<std::size_t> pick_p(0, p_choices.size() - 1);
    const double p = p_choices[pick_p(engine_)];

    const std::uint64_t space = std::uint64_t{1} << n;
    std::uniform_int_distribution<std::uint64_t> pick_mask(0, space - 1);
    std::uniform_int_distribution<std::size_t> pick_s(
        1, std::min<std::size_t>(space, max_support));
    const std::size_t support = pick_s(engine_);

    std::vector<std::uint64_t> masks;
    while (masks.size() < support) {
      const std::uint64_t m = pick_mask(engine_);
      bool fresh = true;
      for (std::uint64_t seen : masks) fresh = fresh && seen != m;
      if (fresh) masks.push_back(m);
    }
    const std::vector<double> w = dirichlet_weights(support);
    std::vector<std::pair<std::uint64_t, double>> atoms(support);
    for (std::size_t i = 0; i < support; ++i) atoms[i] = {masks[i], w[i]};
    return {n, p, std::move(atoms)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lsilab
