#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lsilab/core.hpp"
#include "lsilab/optimize.hpp"
#include "lsilab/spectral1d.hpp"

namespace lsilab {

using TestFunction1D = std::vector<double>;

// Certified lower bound on the log-Sobolev constant of a grid density: the
// value is the quotient of the stored witness, reproducible from it exactly.
struct LsiLowerBoundCertificate {
  double value = 0.0;
  TestFunction1D witness;
  double quadrature_error_estimate = 0.0;
};

// ent_rho(f^2) / (2 E_rho |f'|^2) with the trapezoid node weights for the
// entropy and the cell-midpoint energy form shared with the eigensolver.
inline double lsi_quotient(const GridDensity1D& rho, const TestFunction1D& f) {
  require(f.size() == rho.values.size(), "lsi_quotient: grid size mismatch");
  bool constant = true;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] != f[0]) { constant = false; break; }
  require(!constant, "lsi_quotient: degenerate (constant) input function");

  const std::vector<double> w = rho.node_weights();
  const double m = compensated_total(w);
  const double energy = dirichlet_energy(rho, f);
  require(energy > 0.0, "lsi_quotient: zero Dirichlet energy");

  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(w[i] * f[i] * f[i]);
  const double total = s.value();
  // Cancellation-free entropy, matching the ascent engine: the numerator
  // sum_i w_i f_i^2 log f_i^2 - S log(S/m) equals
  // S [sum_i w_i phi(f_i^2/S) + log m - (m-1)] with nonnegative phi terms.
  CompensatedSum num;
  for (std::size_t i = 0; i < f.size(); ++i)
    num.add(w[i] * entropy_phi(f[i] * f[i] / total));
  const double mass_defect = std::log1p(m - 1.0) - (m - 1.0);
  return total * (num.value() + mass_defect) / (2.0 * energy);
}

// The explicit piecewise-linear witness: -1 left of -R/2, +1 right of R/2,
// linear in between, sampled at the grid nodes.
inline TestFunction1D remark3_witness(double r, const GridDensity1D& rho) {
  require(r > 0.0, "remark3_witness: R must be positive");
  require(rho.left <= -r && rho.right >= r,
          "remark3_witness: grid window must contain [-R, R]");
  TestFunction1D f(rho.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double y = rho.node(int(i));
    if (y < -r / 2.0) f[i] = -1.0;
    else if (y > r / 2.0) f[i] = 1.0;
    else f[i] = 2.0 * y / r;
  }
  return f;
}

// Near-constant perturbation 1 + eps g of a centered direction g; its
// entropy quotient approaches the Rayleigh quotient of g as eps -> 0, so
// seeding the ascent with a spectral eigenfunction pins the certificate
// near or above the Poincare constant of the same discrete pair.
inline TestFunction1D near_constant_seed(const TestFunction1D& direction, double eps) {
  require(eps > 0.0, "near_constant_seed: eps must be positive");
  TestFunction1D f(direction.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 + eps * direction[i];
  return f;
}

namespace detail {

inline std::vector<TestFunction1D> ascent_seeds(const GridDensity1D& rho,
                                                int restarts, std::uint64_t seed) {
  const std::size_t n = rho.values.size();
  std::vector<TestFunction1D> seeds;

  TestFunction1D linear(n);
  for (std::size_t i = 0; i < n; ++i) linear[i] = rho.node(int(i));
  seeds.push_back(linear);

  // Exponential tilt, the extremal family for a pure Gaussian.
  const double lambda = 1.0 / std::sqrt(rho.t);
  TestFunction1D tilt(n);
  const double center = 0.5 * (rho.left + rho.right);
  for (std::size_t i = 0; i < n; ++i)
    tilt[i] = std::exp(lambda * (rho.node(int(i)) - center) / 2.0);
  seeds.push_back(tilt);

  // Near-constant perturbation along the linear mode; its quotient starts at
  // the Poincare quotient, pinning the certificate above the spectral value.
  const std::vector<double> w = rho.node_weights();
  const double m = compensated_total(w);
  CompensatedSum mean_y;
  for (std::size_t i = 0; i < n; ++i) mean_y.add(w[i] * linear[i]);
  const double c = mean_y.value() / m;
  for (double eps : {1e-2, 1e-3}) {
    TestFunction1D f(n);
    const double span = rho.right - rho.left;
    for (std::size_t i = 0; i < n; ++i) f[i] = 1.0 + eps * (linear[i] - c) / span;
    seeds.push_back(f);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int random_starts = std::max(0, restarts - int(seeds.size()));
  for (int r = 0; r < random_starts; ++r) {
    // Smooth random perturbation of the constant: a few low-frequency modes.
    double coef[4], phase[4];
    for (int k = 0; k < 4; ++k) {
      coef[k] = normal(rng);
      phase[k] = normal(rng);
    }
    TestFunction1D f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (rho.node(int(i)) - rho.left) / (rho.right - rho.left);
      double bump = 0.0;
      for (int k = 0; k < 4; ++k)
        bump += coef[k] * std::sin((k + 1) * std::numbers::pi * u + phase[k]);
      f[i] = 1.0 + 0.2 * bump;
    }
    seeds.push_back(f);
  }
  return seeds;
}

inline double coarse_grid_quotient(const GridDensity1D& rho, const TestFunction1D& f) {
  // Re-evaluate the quotient on the stride-2 subgrid to estimate the
  // quadrature sensitivity of the certificate.
  GridDensity1D coarse;
  coarse.left = rho.left;
  coarse.t = rho.t;
  coarse.mass_tol = rho.mass_tol;
  TestFunction1D cf;
  for (std::size_t i = 0; i < rho.values.size(); i += 2) {
    coarse.values.push_back(rho.values[i]);
    cf.push_back(f[i]);
  }
  coarse.n_points = int(coarse.values.size());
  coarse.right = rho.left + (coarse.n_points - 1) * 2.0 * rho.h();
  return lsi_quotient(coarse, cf);
}

}  // namespace detail

// Multistart ascent over test functions; the best quotient found is returned
// as a certificate together with its witness. Deterministic given the seed.
inline LsiLowerBoundCertificate maximize_lsi_quotient(
    const GridDensity1D& rho, int restarts = 8, int max_iters = 2000,
    std::uint64_t seed = 0, const std::vector<TestFunction1D>& extra_seeds = {}) {
  require(restarts >= 1, "maximize_lsi_quotient: restarts must be >= 1");

  const std::vector<double> w = rho.node_weights();
  const double h = rho.h();
  auto apply_energy = [&rho, h](const std::vector<double>& f) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      const double a = 0.5 * (rho.values[i] + rho.values[i + 1]) / h;
      const double flux = a * (f[i + 1] - f[i]);
      out[i] -= flux;
      out[i + 1] += flux;
    }
    return out;
  };

  std::vector<TestFunction1D> seeds = detail::ascent_seeds(rho, restarts, seed);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

  AscentOptions opt;
  opt.max_iters = max_iters;
  AscentResult best;
  for (auto& s : seeds) {
    AscentResult r = maximize_entropy_quotient(w, apply_energy, std::move(s), opt);
    if (r.value > best.value) best = std::move(r);
  }
  require(best.value > -infinity, "maximize_lsi_quotient: all restarts degenerate");

  LsiLowerBoundCertificate cert;
  cert.value = lsi_quotient(rho, best.f);  // recomputed from the witness
  cert.witness = std::move(best.f);
  cert.quadrature_error_estimate =
      std::abs(detail::coarse_grid_quotient(rho, cert.witness) - cert.value) / 3.0;
  return cert;
}

struct Remark3Displays {
  double mean_value = 0.0;       // E f under the exact mixture, 0 by symmetry
  double var_value = 0.0;        // at least 1/2
  double dirichlet_value = 0.0;  // at most (2/R^2) e^{-R^2/(8t)}
  bool both_pass = false;
};

namespace detail {

// Composite Simpson rule; n subintervals (even).
template <class F>
double simpson(F&& g, double a, double b, int n) {
  const double h = (b - a) / n;
  CompensatedSum s;
  s.add(g(a));
  s.add(g(b));
  for (int i = 1; i < n; ++i) s.add(((i % 2) ? 4.0 : 2.0) * g(a + i * h));
  return s.value() * h / 3.0;
}

}  // namespace detail

// High-accuracy quadrature checks of the two displayed estimates for the
// piecewise-linear witness against the exact two-point mixture density.
// The kinks at +-R/2 are integration-cell boundaries so Simpson keeps its
// full order on each smooth piece.
inline Remark3Displays check_remark3_displays(double r, double t) {
  require(r > 0.0 && t > 0.0, "check_remark3_displays: R and t must be positive");
  const double sigma = std::sqrt(t);
  auto density = [&](double y) {
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * t);
    const double la = std::log(0.5) + log_norm - sq(y + r) / (2.0 * t);
    const double lb = std::log(0.5) + log_norm - sq(y - r) / (2.0 * t);
    const double m = std::max(la, lb);
    return std::exp(m) * (std::exp(la - m) + std::exp(lb - m));
  };
  auto witness = [&](double y) {
    if (y < -r / 2.0) return -1.0;
    if (y > r / 2.0) return 1.0;
    return 2.0 * y / r;
  };

  const double lo = -r - 12.0 * sigma, hi = r + 12.0 * sigma;
  const double cuts[4] = {lo, -r / 2.0, r / 2.0, hi};
  double ef = 0.0, ef2 = 0.0, band_mass = 0.0;
  for (int piece = 0; piece < 3; ++piece) {
    const double a = cuts[piece], b = cuts[piece + 1];
    const int n = 40000;
    ef += detail::simpson([&](double y) { return witness(y) * density(y); }, a, b, n);
    ef2 += detail::simpson([&](double y) { return sq(witness(y)) * density(y); }, a, b, n);
    if (piece == 1)
      band_mass = detail::simpson(density, a, b, n);
  }

  Remark3Displays out;
  out.mean_value = ef;
  out.var_value = ef2 - sq(ef);
  out.dirichlet_value = (4.0 / sq(r)) * band_mass;  // |f'| = 2/R on the band
  const double dirichlet_bound = (2.0 / sq(r)) * std::exp(-sq(r) / (8.0 * t));
  out.both_pass = std::abs(out.mean_value) <= 1e-10 && out.var_value >= 0.5 &&
                  out.dirichlet_value <= dirichlet_bound;
  return out;
}

}  // namespace lsilab
