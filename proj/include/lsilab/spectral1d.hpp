#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

// Finitely supported mixing measure on the line; the convolution kernel is
// the centered Gaussian with variance t.
struct AtomicMixingMeasure1D {
  std::vector<double> locations;
  std::vector<double> weights;

  AtomicMixingMeasure1D(std::vector<double> locs, std::vector<double> ws)
      : locations(std::move(locs)), weights(std::move(ws)) {
    require(!locations.empty(), "AtomicMixingMeasure1D: empty support");
    require(locations.size() == weights.size(),
            "AtomicMixingMeasure1D: locations/weights length mismatch");
    CompensatedSum total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      require(std::isfinite(locations[i]), "AtomicMixingMeasure1D: locations must be finite");
      require(weights[i] > 0.0, "AtomicMixingMeasure1D: weights must be positive");
      total.add(weights[i]);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12,
            "AtomicMixingMeasure1D: weights must sum to 1 within 1e-12");
  }

  static AtomicMixingMeasure1D point_mass(double x) { return {{x}, {1.0}}; }

  static AtomicMixingMeasure1D symmetric_pair(double r) {
    require(r > 0.0, "symmetric_pair: R must be positive");
    return {{-r, r}, {0.5, 0.5}};
  }

  double radius() const {
    double r = 0.0;
    for (double x : locations) r = std::max(r, std::abs(x));
    return r;
  }
};

// Density of the convolution tabulated on a uniform grid over a truncation
// window; values are strictly positive and the trapezoid mass deficit is
// bounded by mass_tol.
struct GridDensity1D {
  double left = 0.0;
  double right = 0.0;
  int n_points = 0;
  double t = 0.0;
  std::vector<double> values;
  double total_mass = 0.0;
  double mass_tol = 1e-10;

  double h() const { return (right - left) / (n_points - 1); }
  double node(int i) const { return left + i * h(); }

  // Trapezoid node weights: rho_i * h, halved at the two ends.
  std::vector<double> node_weights() const {
    std::vector<double> w(values.size());
    const double step = h();
    for (std::size_t i = 0; i < values.size(); ++i) w[i] = values[i] * step;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }
};

struct SpectralDefaults {
  static constexpr int n_points = 4001;
  static constexpr double window_sigmas = 8.0;
  static constexpr double mass_tol = 1e-10;
};

inline GridDensity1D build_grid_density(const AtomicMixingMeasure1D& mu, double t,
                                        int n_points = SpectralDefaults::n_points,
                                        double window_sigmas = SpectralDefaults::window_sigmas,
                                        double mass_tol = SpectralDefaults::mass_tol) {
  require(t > 0.0, "build_grid_density: t must be positive");
  require(n_points >= 3, "build_grid_density: need at least 3 grid points");
  require(window_sigmas > 0.0, "build_grid_density: window_sigmas must be positive");

  const double sigma = std::sqrt(t);
  GridDensity1D g;
  g.left = *std::min_element(mu.locations.begin(), mu.locations.end()) -
           window_sigmas * sigma;
  g.right = *std::max_element(mu.locations.begin(), mu.locations.end()) +
            window_sigmas * sigma;
  g.n_points = n_points;
  g.t = t;
  g.mass_tol = mass_tol;
  g.values.resize(n_points);

  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * t);
  std::vector<double> log_terms(mu.locations.size());
  for (int i = 0; i < n_points; ++i) {
    const double y = g.left + i * (g.right - g.left) / (n_points - 1);
    for (std::size_t j = 0; j < mu.locations.size(); ++j)
      log_terms[j] =
          std::log(mu.weights[j]) + log_norm - sq(y - mu.locations[j]) / (2.0 * t);
    g.values[i] = std::exp(log_sum_exp(log_terms));
    if (g.values[i] == 0.0)
      throw std::runtime_error(
          "build_grid_density: density underflowed to 0 at grid node " +
          std::to_string(i) + "; the window reaches too far into the tails, "
          "reduce window_sigmas");
  }

  CompensatedSum mass;
  for (int i = 0; i < n_points; ++i) {
    const double w = (i == 0 || i == n_points - 1) ? 0.5 : 1.0;
    mass.add(w * g.values[i]);
  }
  g.total_mass = mass.value() * g.h();
  if (g.total_mass < 1.0 - mass_tol)
    throw std::runtime_error(
        "build_grid_density: trapezoid mass " + std::to_string(g.total_mass) +
        " misses tolerance; increase window_sigmas or n_points");
  return g;
}

// Finite-volume Dirichlet form on the grid: midpoint density (mean of the two
// node values) times squared increment over h, summed over cells. Differences
// are centered at cell midpoints, so this quadratic form and the node-weight
// mass form constitute the exact discrete pair used by the eigensolver.
inline double dirichlet_energy(const GridDensity1D& rho, const std::vector<double>& f) {
  require(f.size() == rho.values.size(), "dirichlet_energy: grid size mismatch");
  const double h = rho.h();
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double mid = 0.5 * (rho.values[i] + rho.values[i + 1]);
    s.add(mid * sq(f[i + 1] - f[i]) / h);
  }
  return s.value();
}

struct EigenEstimate {
  double value = 0.0;          // estimated Poincare constant, 1/lambda_1
  double residual_norm = 0.0;  // ||A f - lambda M f|| / (lambda ||M f||)
  std::vector<double> eigenvector;  // M-normalized, mean-zero gap eigenfunction
  std::optional<double> grid_refinement_ratio;  // change under grid doubling
};

namespace detail {

// Solve A z = b with A the (singular, Neumann) tridiagonal stiffness matrix:
// pin the last entry of z to zero and run the Thomas algorithm on the leading
// principal submatrix, which is positive definite. b must satisfy 1^T b = 0.
inline std::vector<double> pinned_stiffness_solve(const std::vector<double>& a,
                                                  const std::vector<double>& b) {
  const std::size_t n = b.size();
  // A has diagonal d_i = a_{i-1} + a_i (missing terms at the ends) and
  // off-diagonal -a_i; unknowns are z_0..z_{n-2}.
  std::vector<double> diag(n - 1), rhs(b.begin(), b.end() - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    diag[i] = (i > 0 ? a[i - 1] : 0.0) + a[i];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double m = -a[i - 1] / diag[i - 1];
    diag[i] += m * a[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> z(n, 0.0);
  z[n - 2] = rhs[n - 2] / diag[n - 2];
  for (std::size_t i = n - 2; i-- > 0;)
    z[i] = (rhs[i] + a[i] * z[i + 1]) / diag[i];
  return z;
}

}  // namespace detail

// Smallest nonzero eigenvalue of the pencil (stiffness, mass) by inverse
// iteration with constant-mode deflation; returns its reciprocal, the grid
// Poincare constant. Deterministic start vector y - mean(y).
inline EigenEstimate poincare_constant_estimate(const GridDensity1D& rho,
                                                double rel_tol = 1e-10,
                                                double residual_tol = 1e-8,
                                                int max_iters = 500) {
  const std::size_t n = rho.values.size();
  const double h = rho.h();
  std::vector<double> a(n - 1);  // cell conductivities rho_mid / h
  for (std::size_t i = 0; i + 1 < n; ++i)
    a[i] = 0.5 * (rho.values[i] + rho.values[i + 1]) / h;
  const std::vector<double> m = rho.node_weights();
  const double m_total = compensated_total(m);

  auto apply_stiffness = [&](const std::vector<double>& f) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double flux = a[i] * (f[i + 1] - f[i]);
      out[i] -= flux;
      out[i + 1] += flux;
    }
    return out;
  };
  auto project_constants = [&](std::vector<double>& f) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(m[i] * f[i]);
    const double c = s.value() / m_total;
    for (double& v : f) v -= c;
  };
  auto m_norm = [&](const std::vector<double>& f) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(m[i] * f[i] * f[i]);
    return std::sqrt(s.value());
  };

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rho.node(int(i));
  project_constants(v);
  double nv = m_norm(v);
  for (double& x : v) x /= nv;

  double lambda = 0.0;
  double prev_lambda = infinity;
  double residual = infinity;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = m[i] * v[i];
    std::vector<double> z = detail::pinned_stiffness_solve(a, b);
    project_constants(z);
    const double nz = m_norm(z);
    require(nz > 0.0, "poincare_constant_estimate: iteration collapsed");
    for (double& x : z) x /= nz;

    const std::vector<double> az = apply_stiffness(z);
    CompensatedSum num;
    for (std::size_t i = 0; i < n; ++i) num.add(z[i] * az[i]);
    lambda = num.value();  // Rayleigh quotient, z is M-normalized

    CompensatedSum res2;
    for (std::size_t i = 0; i < n; ++i) res2.add(sq(az[i] - lambda * m[i] * z[i]));
    residual = std::sqrt(res2.value()) / lambda;

    v = std::move(z);
    if (std::abs(lambda - prev_lambda) <= rel_tol * lambda && residual <= residual_tol)
      return {1.0 / lambda, residual, v, std::nullopt};
    prev_lambda = lambda;
  }
  throw std::runtime_error(
      "poincare_constant_estimate: no convergence after " +
      std::to_string(max_iters) + " iterations (lambda=" + std::to_string(lambda) +
      ", residual=" + std::to_string(residual) + ")");
}

// Variance-to-energy quotient of an explicit grid function under the same
// discrete pair as the eigensolver, hence never above the spectral estimate
// beyond solver tolerance.
inline double rayleigh_quotient(const GridDensity1D& rho, const std::vector<double>& f) {
  require(f.size() == rho.values.size(), "rayleigh_quotient: grid size mismatch");
  const double energy = dirichlet_energy(rho, f);
  require(energy > 0.0, "rayleigh_quotient: degenerate (constant) input function");
  const std::vector<double> m = rho.node_weights();
  const double m_total = compensated_total(m);
  CompensatedSum first, second;
  for (std::size_t i = 0; i < f.size(); ++i) {
    first.add(m[i] * f[i] * f[i]);
    second.add(m[i] * f[i]);
  }
  const double var = first.value() - sq(second.value()) / m_total;
  return var / energy;
}

struct RefinementRow {
  int n_points = 0;
  EigenEstimate estimate;
};

struct RefinementStudy {
  std::vector<RefinementRow> rows;
  double extrapolated = 0.0;   // Richardson limit assuming second-order error
  double observed_order = 0.0; // from the last three grids
  bool monotone = true;        // differences kept one sign; false flags a warning
};

inline RefinementStudy grid_refinement_study(const AtomicMixingMeasure1D& mu, double t,
                                             const std::vector<int>& n_list,
                                             double window_sigmas = SpectralDefaults::window_sigmas) {
  require(n_list.size() >= 2, "grid_refinement_study: need at least two grids");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    require(n_list[i] > n_list[i - 1], "grid_refinement_study: n_list must increase");

  RefinementStudy study;
  for (int n : n_list) {
    GridDensity1D g = build_grid_density(mu, t, n, window_sigmas);
    RefinementRow row{n, poincare_constant_estimate(g)};
    if (!study.rows.empty())
      row.estimate.grid_refinement_ratio =
          row.estimate.value - study.rows.back().estimate.value;
    study.rows.push_back(std::move(row));
  }

  const std::size_t k = study.rows.size();
  const double e1 = study.rows[k - 2].estimate.value;
  const double e2 = study.rows[k - 1].estimate.value;
  study.extrapolated = e2 + (e2 - e1) / 3.0;  // second-order Richardson

  for (std::size_t i = 2; i < k; ++i) {
    const double d_prev = study.rows[i - 1].estimate.value - study.rows[i - 2].estimate.value;
    const double d_next = study.rows[i].estimate.value - study.rows[i - 1].estimate.value;
    if (d_prev * d_next < 0.0) study.monotone = false;
  }
  if (k >= 3) {
    const double d1 = study.rows[k - 2].estimate.value - study.rows[k - 3].estimate.value;
    const double d2 = study.rows[k - 1].estimate.value - study.rows[k - 2].estimate.value;
    if (d1 != 0.0 && d2 != 0.0 && d1 * d2 > 0.0)
      study.observed_order = std::log2(std::abs(d1 / d2));
  }
  return study;
}

}  // namespace lsilab
