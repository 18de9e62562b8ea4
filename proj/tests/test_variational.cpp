#include <catch2/catch_amalgamated.hpp>

#include "lsilab/bounds.hpp"
#include "lsilab/variational.hpp"

using namespace lsilab;

namespace {

GridDensity1D gaussian_grid(double t, int n = SpectralDefaults::n_points) {
  return build_grid_density(AtomicMixingMeasure1D::point_mass(0.0), t, n);
}

GridDensity1D pair_grid(double t, int n = SpectralDefaults::n_points) {
  return build_grid_density(AtomicMixingMeasure1D::symmetric_pair(1.0), t, n);
}

}  // namespace

TEST_CASE("quotient validation and scale invariance") {
  const GridDensity1D g = gaussian_grid(1.0, 801);
  std::vector<double> f(g.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 + std::sin(g.node(int(i)));

  const double q = lsi_quotient(g, f);
  CHECK(q > 0.0);
  std::vector<double> scaled = f;
  for (double& x : scaled) x *= 3.0;
  CHECK(lsi_quotient(g, scaled) == Catch::Approx(q).epsilon(1e-12));

  CHECK_THROWS_AS(lsi_quotient(g, std::vector<double>(f.size(), 2.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(lsi_quotient(g, std::vector<double>(5, 1.0)), std::invalid_argument);
}

TEST_CASE("exponential tilts realize the gaussian constant") {
  for (double t : {0.5, 2.0}) {
    const GridDensity1D g = gaussian_grid(t);
    std::vector<double> tilt(g.values.size());
    const double lambda = 1.0 / std::sqrt(t);
    for (std::size_t i = 0; i < tilt.size(); ++i)
      tilt[i] = std::exp(0.5 * lambda * g.node(int(i)));
    CHECK(lsi_quotient(g, tilt) == Catch::Approx(t).epsilon(1e-4));
  }
}

TEST_CASE("gaussian certificates live in the one percent band") {
  for (double t : {0.5, 1.0, 2.0}) {
    const LsiLowerBoundCertificate cert = maximize_lsi_quotient(gaussian_grid(t), 6);
    CHECK(cert.value >= t * (1.0 - 1e-2));
    CHECK(cert.value <= t * (1.0 + 1e-2));
    CHECK(cert.quadrature_error_estimate >= 0.0);
    CHECK(cert.quadrature_error_estimate <= 1e-6 * t);
    CHECK(cert.witness.size() == std::size_t(SpectralDefaults::n_points));
  }
}

TEST_CASE("certificate value is reproducible from its witness") {
  const GridDensity1D g = pair_grid(0.25);
  const EigenEstimate est = poincare_constant_estimate(g);
  const std::vector<TestFunction1D> extra = {
      near_constant_seed(est.eigenvector, 1e-3),
      near_constant_seed(est.eigenvector, 1e-4)};
  const LsiLowerBoundCertificate cert = maximize_lsi_quotient(g, 6, 2000, 0, extra);

  // The reported value is literally the quotient of the stored witness.
  CHECK(cert.value == lsi_quotient(g, cert.witness));
  // Seeded with the gap eigenfunction, the log-Sobolev certificate cannot
  // fall below the Poincare constant of the same discrete pair.
  CHECK(cert.value >= est.value * (1.0 - 1e-6));
  // And it stays below the closed-form upper bound (criterion chain).
  CHECK(cert.value <= gaussian_convolution_lsi_bound(1.0, 0.25).bound_value);
}

TEST_CASE("explicit extra seeds are never ignored") {
  const GridDensity1D g = pair_grid(0.5, 801);
  const TestFunction1D witness = remark3_witness(1.0, g);
  const double start = lsi_quotient(g, witness);
  const LsiLowerBoundCertificate cert = maximize_lsi_quotient(g, 1, 50, 0, {witness});
  CHECK(cert.value >= start * (1.0 - 1e-12));
}

TEST_CASE("ascent is deterministic for a fixed seed") {
  const GridDensity1D g = pair_grid(0.5, 801);
  const LsiLowerBoundCertificate a = maximize_lsi_quotient(g, 8, 400, 77);
  const LsiLowerBoundCertificate b = maximize_lsi_quotient(g, 8, 400, 77);
  CHECK(a.value == b.value);
  CHECK(a.witness == b.witness);
}

TEST_CASE("near constant seed construction") {
  CHECK_THROWS_AS(near_constant_seed({1.0, -1.0}, 0.0), std::invalid_argument);
  const TestFunction1D f = near_constant_seed({2.0, -2.0}, 1e-3);
  CHECK(f[0] == Catch::Approx(1.002).epsilon(1e-15));
  CHECK(f[1] == Catch::Approx(0.998).epsilon(1e-15));
}

TEST_CASE("piecewise linear witness shape and domain") {
  const GridDensity1D g = pair_grid(0.25);
  const TestFunction1D w = remark3_witness(1.0, g);
  CHECK(w.front() == -1.0);
  CHECK(w.back() == 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y = g.node(int(i));
    if (y < -0.5) CHECK(w[i] == -1.0);
    else if (y > 0.5) CHECK(w[i] == 1.0);
    else CHECK(w[i] == Catch::Approx(2.0 * y).margin(1e-12));
  }
  const GridDensity1D narrow = gaussian_grid(0.01);  // window [-0.8, 0.8]
  CHECK_THROWS_AS(remark3_witness(1.0, narrow), std::invalid_argument);
}

TEST_CASE("witness dominates the closed-form lower bound on the grid") {
  const GridDensity1D g = pair_grid(0.1);
  const TestFunction1D w = remark3_witness(1.0, g);
  const double quotient = rayleigh_quotient(g, w);
  CHECK(quotient >= remark3_poincare_lower_bound(1.0, 0.1).bound_value * 0.999);
}

TEST_CASE("quadrature checks of the witness displays") {
  for (auto [r, t] : {std::pair{1.0, 0.1}, {1.0, 1.0}, {2.0, 0.5}, {0.5, 0.05}}) {
    const Remark3Displays d = check_remark3_displays(r, t);
    INFO("r=" << r << " t=" << t);
    CHECK(std::abs(d.mean_value) <= 1e-10);
    CHECK(d.var_value >= 0.5);
    CHECK(d.dirichlet_value <= (2.0 / (r * r)) * std::exp(-r * r / (8.0 * t)));
    CHECK(d.both_pass);
  }
  CHECK_THROWS_AS(check_remark3_displays(0.0, 1.0), std::invalid_argument);
}
