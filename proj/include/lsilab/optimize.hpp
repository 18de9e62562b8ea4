#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

// Ascent on the entropy-to-energy quotient
//   Q(f) = [sum_i w_i f_i^2 log f_i^2 - S log(S/m)] / (2 f^T A f),
// with S = sum_i w_i f_i^2 and m = sum_i w_i: the log-Sobolev quotient of f
// under the weighted-node entropy and a positive semidefinite energy form A
// whose kernel is the constants. Every evaluated Q is a valid lower bound on
// the discrete optimum, so the optimizer only ever reports certified values.
struct AscentOptions {
  int max_iters = 2000;
  double rel_tol = 1e-9;
  int max_backtracks = 60;
};

struct AscentResult {
  std::vector<double> f;
  double value = -infinity;
  int iters = 0;
  bool converged = false;
};

namespace detail {

constexpr double entropy_floor = 1e-300;  // f^2 floor inside the log only

struct QuotientParts {
  double numerator = 0.0;
  double energy = 0.0;
  double s = 0.0;
  double quotient = -infinity;
};

template <class ApplyA>
QuotientParts entropy_quotient_parts(const std::vector<double>& w, double m,
                                     ApplyA&& apply_a, const std::vector<double>& f,
                                     std::vector<double>& af) {
  QuotientParts parts;
  af = apply_a(f);
  CompensatedSum energy, s, num;
  for (std::size_t i = 0; i < f.size(); ++i) {
    energy.add(f[i] * af[i]);
    s.add(w[i] * f[i] * f[i]);
  }
  parts.energy = energy.value();
  parts.s = s.value();
  if (!(parts.energy > 0.0) || !(parts.s > 0.0)) return parts;
  // The numerator sum_i w_i f_i^2 log f_i^2 - S log(S/m) is rewritten as
  // S [sum_i w_i phi(f_i^2 / S) + log m - (m - 1)]. The phi terms are
  // nonnegative, so near-constant iterates cannot produce a 0/0 noise
  // quotient; the textbook sum cancels catastrophically there and the
  // ascent would otherwise chase pure roundoff.
  for (std::size_t i = 0; i < f.size(); ++i)
    num.add(w[i] * entropy_phi(f[i] * f[i] / parts.s));
  const double mass_defect = std::log1p(m - 1.0) - (m - 1.0);
  parts.numerator = parts.s * (num.value() + mass_defect);
  parts.quotient = parts.numerator / (2.0 * parts.energy);
  return parts;
}

}  // namespace detail

// Preconditioned backtracking gradient ascent from one start vector. The
// gradient is that of the discrete quotient itself (not a continuum formula),
// the search direction is the w-preconditioned gradient, and steps are only
// accepted on strict increase, so the iterate sequence is monotone.
template <class ApplyA>
AscentResult maximize_entropy_quotient(const std::vector<double>& w,
                                       ApplyA&& apply_a, std::vector<double> f,
                                       const AscentOptions& opt = {}) {
  const std::size_t n = w.size();
  require(f.size() == n, "maximize_entropy_quotient: dimension mismatch");
  const double m = compensated_total(w);
  require(m > 0.0, "maximize_entropy_quotient: weights must carry mass");

  std::vector<double> af;
  auto parts = detail::entropy_quotient_parts(w, m, apply_a, f, af);
  AscentResult result;
  if (!(parts.quotient > -infinity)) return result;  // degenerate start

  std::vector<double> grad(n), trial(n), trial_af;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    // d/df_i of numerator: 2 w_i f_i log(m f_i^2 / S); of energy: 2 (A f)_i.
    const double ratio = parts.numerator / parts.energy;
    for (std::size_t i = 0; i < n; ++i) {
      const double f2 = f[i] * f[i];
      const double ent_term =
          (f2 < detail::entropy_floor) ? 0.0
                                       : 2.0 * w[i] * f[i] * (std::log(f2 * m / parts.s));
      const double g = (ent_term - ratio * 2.0 * af[i]) / (2.0 * parts.energy);
      grad[i] = g / w[i];  // preconditioned ascent direction
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] + step * grad[i];
      auto trial_parts =
          detail::entropy_quotient_parts(w, m, apply_a, trial, trial_af);
      if (trial_parts.quotient > parts.quotient &&
          std::isfinite(trial_parts.quotient)) {
        const double gain = trial_parts.quotient - parts.quotient;
        f.swap(trial);
        af.swap(trial_af);
        parts = trial_parts;
        accepted = true;
        result.iters = iter + 1;
        if (gain <= opt.rel_tol * std::abs(parts.quotient)) {
          result.converged = true;
        }
        break;
      }
    }
    if (!accepted) {
      result.converged = true;  // no ascent direction at line-search scale
      break;
    }
    if (result.converged) break;

    // Rescale to S = m; the quotient is scale-invariant and this keeps the
    // entropy terms centered in the double range.
    const double scale = std::sqrt(m / parts.s);
    for (double& x : f) x *= scale;
    for (double& x : af) x *= scale;
    parts.s = m;
    parts.numerator *= scale * scale;
    parts.energy *= scale * scale;
  }

  result.f = std::move(f);
  result.value = parts.quotient;
  return result;
}

}  // namespace lsilab
