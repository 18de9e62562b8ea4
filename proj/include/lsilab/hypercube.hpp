#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "lsilab/bounds.hpp"
#include "lsilab/core.hpp"
#include "lsilab/measures.hpp"
#include "lsilab/optimize.hpp"

namespace lsilab {

// Mixture of Bernoulli product measures on {0,1}^n: component x carries
// pi_{x_i} in coordinate i with pi_0 = Bernoulli(p), pi_1 = Bernoulli(1-p).
// Atoms are 64-bit masks in lexicographic bit order; n <= 12 keeps the
// 2^n-state enumeration exact at desk scale.
struct HypercubeInstance {
  int n;
  double p;
  std::vector<std::pair<std::uint64_t, double>> atoms;  // (mask, weight)

  HypercubeInstance(int n_, double p_,
                    std::vector<std::pair<std::uint64_t, double>> atoms_)
      : n(n_), p(p_), atoms(std::move(atoms_)) {
    require(n >= 1 && n <= 12, "HypercubeInstance: n must lie in [1, 12]");
    require_domain(p > 0.0 && p < 0.5, "HypercubeInstance: p must lie in (0, 1/2)");
    require(!atoms.empty(), "HypercubeInstance: empty mixing support");
    CompensatedSum total;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      require(atoms[i].first < (std::uint64_t{1} << n),
              "HypercubeInstance: atom mask outside {0,1}^n");
      require(atoms[i].second > 0.0, "HypercubeInstance: atom weights must be positive");
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        require(atoms[i].first != atoms[j].first, "HypercubeInstance: duplicate atom");
      total.add(atoms[i].second);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12,
            "HypercubeInstance: atom weights must sum to 1 within 1e-12");
  }

  // Hamming diameter of the mixing support.
  int diameter() const {
    int k = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        k = std::max(k, std::popcount(atoms[i].first ^ atoms[j].first));
    return k;
  }
};

// Exact 2^n-vector of the mixture: component x puts mass
// p^{d(x,y)} (1-p)^{n-d(x,y)} on y, d the Hamming distance.
inline DiscreteMeasure mixture_distribution(const HypercubeInstance& inst) {
  const std::size_t size = std::size_t{1} << inst.n;
  std::vector<double> pow_p(inst.n + 1), pow_q(inst.n + 1);
  pow_p[0] = pow_q[0] = 1.0;
  for (int k = 1; k <= inst.n; ++k) {
    pow_p[k] = pow_p[k - 1] * inst.p;
    pow_q[k] = pow_q[k - 1] * (1.0 - inst.p);
  }
  std::vector<double> w(size, 0.0);
  for (const auto& [mask, weight] : inst.atoms)
    for (std::size_t y = 0; y < size; ++y) {
      const int d = std::popcount(mask ^ y);
      w[y] += weight * pow_p[d] * pow_q[inst.n - d];
    }
  std::vector<std::uint64_t> states(size);
  for (std::size_t y = 0; y < size; ++y) states[y] = y;
  return DiscreteMeasure::normalized(std::move(w));  // exact up to roundoff
}

// E_rho Gamma(f) with the discrete coordinate gradient: each edge {y, y^e_i}
// contributes (rho(y) + rho(y^e_i)) (f difference)^2, because the coordinate
// increment is constant along the fiber.
inline double discrete_dirichlet_form(const DiscreteMeasure& rho,
                                      const DiscreteFunction& f) {
  const std::size_t size = rho.size();
  require(f.size() == size, "discrete_dirichlet_form: dimension mismatch");
  const int n = std::countr_zero(size);
  require(size == (std::size_t{1} << n), "discrete_dirichlet_form: state count not 2^n");
  CompensatedSum s;
  for (std::size_t y = 0; y < size; ++y)
    for (int i = 0; i < n; ++i) {
      const std::size_t z = y | (std::size_t{1} << i);
      if (z == y) continue;  // visit each edge from its low endpoint
      const std::size_t x = y;  // bit i clear
      s.add((rho.weight(x) + rho.weight(z)) * sq(f[z] - f[x]));
    }
  return s.value();
}

namespace detail {

// Graph Laplacian action matching discrete_dirichlet_form: f^T A f equals the
// form, with edge weights rho(y) + rho(y^e_i).
inline std::vector<double> dirichlet_apply(const std::vector<double>& rho,
                                           const std::vector<double>& f) {
  const std::size_t size = rho.size();
  const int n = std::countr_zero(size);
  std::vector<double> out(size, 0.0);
  for (std::size_t y = 0; y < size; ++y)
    for (int i = 0; i < n; ++i) {
      const std::size_t z = y | (std::size_t{1} << i);
      if (z == y) continue;
      const double wedge = rho[y] + rho[z];
      const double diff = f[z] - f[y];
      out[y] -= wedge * diff;
      out[z] += wedge * diff;
    }
  return out;
}

inline double sparse_pinned_poincare(const std::vector<double>& rho, double rel_tol);

}  // namespace detail

// Exact Poincare constant of a strictly positive measure on {0,1}^n: the
// reciprocal of the smallest nonzero eigenvalue of the (Dirichlet form, mass)
// pencil. Dense symmetric solve up to n = 9; pinned-factorization inverse
// iteration beyond.
inline double exact_poincare(const DiscreteMeasure& rho, double rel_tol = 1e-10) {
  const std::size_t size = rho.size();
  const int n = std::countr_zero(size);
  require(size == (std::size_t{1} << n), "exact_poincare: state count not 2^n");
  for (double w : rho.weights())
    require(w > 0.0, "exact_poincare: measure must be strictly positive");

  if (n <= 9) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t y = 0; y < size; ++y) {
      m(y, y) = rho.weight(y);
      for (int i = 0; i < n; ++i) {
        const std::size_t z = y | (std::size_t{1} << i);
        if (z == y) continue;
        const double wedge = rho.weight(y) + rho.weight(z);
        a(y, y) += wedge;
        a(z, z) += wedge;
        a(y, z) -= wedge;
        a(z, y) -= wedge;
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, m);
    require(solver.info() == Eigen::Success, "exact_poincare: dense eigensolve failed");
    const double lambda1 = solver.eigenvalues()(1);  // index 0 is the constant mode
    require(lambda1 > 0.0, "exact_poincare: vanishing spectral gap");
    return 1.0 / lambda1;
  }
  return detail::sparse_pinned_poincare(rho.weights(), rel_tol);
}

namespace detail {

inline double sparse_pinned_poincare(const std::vector<double>& rho, double rel_tol) {
  const std::size_t size = rho.size();
  const int n = std::countr_zero(size);
  const std::size_t dim = size - 1;  // last state pinned to zero

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size * n * 2);
  std::vector<double> diag(size, 0.0);
  for (std::size_t y = 0; y < size; ++y)
    for (int i = 0; i < n; ++i) {
      const std::size_t z = y | (std::size_t{1} << i);
      if (z == y) continue;
      const double wedge = rho[y] + rho[z];
      diag[y] += wedge;
      diag[z] += wedge;
      if (y < dim && z < dim) {
        trip.emplace_back(int(y), int(z), -wedge);
        trip.emplace_back(int(z), int(y), -wedge);
      }
    }
  for (std::size_t y = 0; y < dim; ++y) trip.emplace_back(int(y), int(y), diag[y]);
  Eigen::SparseMatrix<double> a_red(dim, dim);
  a_red.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(a_red);
  require(factor.info() == Eigen::Success, "exact_poincare: sparse factorization failed");

  const double m_total = compensated_total(rho);
  auto project = [&](std::vector<double>& f) {
    CompensatedSum s;
    for (std::size_t i = 0; i < size; ++i) s.add(rho[i] * f[i]);
    const double c = s.value() / m_total;
    for (double& v : f) v -= c;
  };
  auto m_norm = [&](const std::vector<double>& f) {
    CompensatedSum s;
    for (std::size_t i = 0; i < size; ++i) s.add(rho[i] * f[i] * f[i]);
    return std::sqrt(s.value());
  };

  std::vector<double> v(size);
  for (std::size_t i = 0; i < size; ++i) v[i] = double(std::popcount(i));
  project(v);
  const double nv = m_norm(v);
  for (double& x : v) x /= nv;

  double lambda = 0.0, prev = infinity;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXd b(dim);
    for (std::size_t i = 0; i < dim; ++i) b(i) = rho[i] * v[i];
    const Eigen::VectorXd sol = factor.solve(b);
    std::vector<double> z(size, 0.0);
    for (std::size_t i = 0; i < dim; ++i) z[i] = sol(i);
    project(z);
    const double nz = m_norm(z);
    require(nz > 0.0, "exact_poincare: inverse iteration collapsed");
    for (double& x : z) x /= nz;
    const std::vector<double> az = dirichlet_apply(rho, z);
    CompensatedSum num;
    for (std::size_t i = 0; i < size; ++i) num.add(z[i] * az[i]);
    lambda = num.value();
    v = std::move(z);
    if (std::abs(lambda - prev) <= rel_tol * lambda) return 1.0 / lambda;
    prev = lambda;
  }
  throw std::runtime_error("exact_poincare: inverse iteration did not converge");
}

}  // namespace detail

struct HypercubeLsiLowerBound {
  double value = 0.0;
  DiscreteFunction witness;
  int restarts_used = 0;
};

// Certified lower bound on the log-Sobolev constant: multistart ascent of
// ent_rho(f^2) / (2 E_rho Gamma(f)) over all of R^{2^n}. Finite state space,
// so every quotient value is exact up to roundoff; no quadrature error.
// Seeds: coordinate splits, optional support-separation splits from the
// instance, a near-constant perturbation, and seeded random starts.
inline HypercubeLsiLowerBound lsi_lower_bound_hypercube(
    const DiscreteMeasure& rho, int restarts = 8, int max_iters = 4000,
    std::uint64_t seed = 0, const std::vector<DiscreteFunction>& extra_seeds = {}) {
  const std::size_t size = rho.size();
  const int n = std::countr_zero(size);
  require(size == (std::size_t{1} << n), "lsi_lower_bound_hypercube: state count not 2^n");
  require(restarts >= 1, "lsi_lower_bound_hypercube: restarts must be >= 1");
  for (double w : rho.weights())
    require(w > 0.0, "lsi_lower_bound_hypercube: measure must be strictly positive");

  const std::vector<double>& w = rho.weights();
  auto apply_energy = [&w](const std::vector<double>& f) {
    return detail::dirichlet_apply(w, f);
  };

  std::vector<DiscreteFunction> seeds;
  for (int i = 0; i < n; ++i) {  // +-1 split along each coordinate
    DiscreteFunction f(size);
    for (std::size_t y = 0; y < size; ++y)
      f[y] = (y >> i) & 1 ? 1.0 : -1.0;
    seeds.push_back(std::move(f));
  }
  {
    // Near-constant perturbation along the popcount direction: starts at a
    // Poincare-type quotient, keeping the output near or above the gap.
    DiscreteFunction f(size);
    for (std::size_t y = 0; y < size; ++y)
      f[y] = 1.0 + 1e-3 * (std::popcount(y) - 0.5 * n);
    seeds.push_back(std::move(f));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    DiscreteFunction f(size);
    for (std::size_t y = 0; y < size; ++y) f[y] = normal(rng);
    seeds.push_back(std::move(f));
  }
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

  AscentOptions opt;
  opt.max_iters = max_iters;
  HypercubeLsiLowerBound best;
  best.value = -infinity;
  for (auto& s : seeds) {
    AscentResult r = maximize_entropy_quotient(w, apply_energy, std::move(s), opt);
    if (r.value > best.value) {
      best.value = r.value;
      best.witness = std::move(r.f);
    }
  }
  require(best.value > -infinity, "lsi_lower_bound_hypercube: all restarts degenerate");
  best.restarts_used = int(seeds.size());
  return best;
}

// Support-separation seed for an instance: split states by which extreme
// atom of the mixing measure is nearer in Hamming distance.
inline DiscreteFunction support_separation_seed(const HypercubeInstance& inst) {
  const std::size_t size = std::size_t{1} << inst.n;
  std::uint64_t a = inst.atoms.front().first, b = a;
  int widest = -1;
  for (std::size_t i = 0; i < inst.atoms.size(); ++i)
    for (std::size_t j = i; j < inst.atoms.size(); ++j) {
      const int d = std::popcount(inst.atoms[i].first ^ inst.atoms[j].first);
      if (d > widest) {
        widest = d;
        a = inst.atoms[i].first;
        b = inst.atoms[j].first;
      }
    }
  DiscreteFunction f(size);
  for (std::size_t y = 0; y < size; ++y) {
    const int da = std::popcount(y ^ a), db = std::popcount(y ^ b);
    f[y] = da == db ? 0.0 : (da < db ? -1.0 : 1.0);
  }
  if (a == b) std::fill(f.begin(), f.end(), 1.0);  // point support: constant, skipped
  return f;
}

struct ExactKConstants {
  double k_inf = 1.0;                       // 1 + max pairwise chi2 over the support
  std::map<double, double> k_p;             // exponent -> K_{p,chi2}
  double k_chi2_pi = 0.0;                   // per-coordinate chi2 of the Bernoulli pair
  double diameter_bound = 0.0;              // (1 + K_chi2(pi))^k - 1 comparison value
};

// Exact K-moments of the instance: pairwise chi2 over the support comes from
// the per-coordinate tensorization (equal factors at differing bits), then
// the discrete p-moment. The Hamming-diameter bound is returned alongside.
inline ExactKConstants exact_k_constants(const HypercubeInstance& inst,
                                         const std::vector<double>& p_exponents) {
  const auto [k_ls_pi, k_chi2_pi] = bernoulli_pi_constants(inst.p);
  (void)k_ls_pi;
  const std::size_t s = inst.atoms.size();

  std::vector<double> weights(s);
  for (std::size_t i = 0; i < s; ++i) weights[i] = inst.atoms[i].second;
  const DiscreteMeasure mu = DiscreteMeasure::normalized(std::move(weights));

  std::vector<std::vector<double>> pairwise(s, std::vector<double>(s, 0.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const int d = std::popcount(inst.atoms[i].first ^ inst.atoms[j].first);
      pairwise[i][j] = chi2_tensorize(std::vector<double>(d, k_chi2_pi));
      worst = std::max(worst, pairwise[i][j]);
    }

  ExactKConstants out;
  out.k_chi2_pi = k_chi2_pi;
  out.k_inf = 1.0 + worst;
  out.diameter_bound = chi2_tensorize(std::vector<double>(inst.diameter(), k_chi2_pi));
  for (double p : p_exponents) out.k_p[p] = k_p_chi2_discrete(mu, pairwise, p);
  return out;
}

struct Theorem31Validation {
  BoundReport pi_bound;
  BoundReport lsi_bound;
  double c_p_exact = 0.0;
  double c_ls_lower = 0.0;
  double tighten_value = 0.0;  // defective pair read off the mixture argument
  bool pi_pass = false;
  bool lsi_pass = false;
  bool tighten_pass = false;
};

// Checks the mixture bounds against exact ground truth on one instance:
// exact Poincare constant against the PI bound, the ascent lower bound
// against the LSI bound, and the defective-LSI tightening consistency with
// C = 2 p* K_LS and D = p* log K_{p,chi2}.
inline Theorem31Validation validate_theorem31(const HypercubeInstance& inst, double p_exp,
                                              int restarts = 8, int max_iters = 4000,
                                              std::uint64_t seed = 0) {
  const auto [k_ls_pi, k_chi2_pi] = bernoulli_pi_constants(inst.p);
  (void)k_chi2_pi;
  const ExactKConstants kc = exact_k_constants(inst, {p_exp});
  const double k_p = kc.k_p.at(p_exp);
  const DualExponent exponent = DualExponent::from_p(p_exp);
  // Components are Bernoulli products, so their Poincare constant is exactly
  // p(1-p), sharper than the log-Sobolev fallback.
  const MixtureBoundInputs in(k_ls_pi, k_p, exponent, inst.p * (1.0 - inst.p));

  Theorem31Validation v;
  v.pi_bound = poincare_mixture_bound(in);
  v.lsi_bound = lsi_mixture_bound(in);

  const DiscreteMeasure rho = mixture_distribution(inst);
  v.c_p_exact = exact_poincare(rho);
  std::vector<DiscreteFunction> extra;
  DiscreteFunction sep = support_separation_seed(inst);
  if (inst.diameter() > 0) extra.push_back(std::move(sep));
  v.c_ls_lower = lsi_lower_bound_hypercube(rho, restarts, max_iters, seed, extra).value;

  const double ps = exponent.p_star;
  v.tighten_value = tighten_defective_lsi(2.0 * ps * k_ls_pi,
                                          ps * std::log(k_p), v.c_p_exact);

  const double tol = 1e-9;
  v.pi_pass = v.c_p_exact <= v.pi_bound.bound_value * (1.0 + tol);
  v.lsi_pass = v.c_ls_lower <= v.lsi_bound.bound_value * (1.0 + tol);
  v.tighten_pass = v.c_ls_lower <= v.tighten_value * (1.0 + tol);
  return v;
}

}  // namespace lsilab
