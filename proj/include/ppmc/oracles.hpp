#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ppmc/errors.hpp"
#include "ppmc/model.hpp"

namespace ppmc {

/// Central finite differences (f(x+h e_i) - f(x-h e_i)) / 2h. Independent
/// of the tape machinery; used to validate every AD gradient.
inline std::vector<double> finite_diff_grad(
    const std::function<double(const ParamVector&)>& f, const ParamVector& x,
    double h = 1e-5) {
  if (!(h > 0.0)) throw DomainError("finite_diff_grad: h <= 0");
  std::vector<double> grad(x.size());
  ParamVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double hi = f(probe);
    probe[i] = x[i] - h;
    const double lo = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(hi) || !std::isfinite(lo))
      throw NumericalError("finite_diff_grad: non-finite function value");
    grad[i] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

/// Uniform 1-D grid.
struct Grid1D {
  double lo, hi;
  int n_points;
};

/// Posterior expectation of g over a 1-D grid by trapezoid quadrature of
/// exp(logpost - max). Returns the expectation and the (max-shifted)
/// normalizer.
inline std::pair<double, double> grid_posterior_expectation(
    const std::function<double(double)>& logpost, const Grid1D& grid,
    const std::function<double(double)>& g) {
  if (!(grid.lo < grid.hi)) throw DomainError("grid: lo >= hi");
  if (grid.n_points < 3) throw DomainError("grid: fewer than 3 points");
  const int n = grid.n_points;
  const double step = (grid.hi - grid.lo) / (n - 1);

  std::vector<double> lp(n);
  double max_lp = -INFINITY;
  for (int i = 0; i < n; ++i) {
    const double x = grid.lo + i * step;
    lp[i] = logpost(x);
    if (!std::isfinite(lp[i])) throw NumericalError("grid: non-finite logpost");
    max_lp = std::max(max_lp, lp[i]);
  }

  double normalizer = 0.0, moment = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = grid.lo + i * step;
    const double w = std::exp(lp[i] - max_lp) * (i == 0 || i == n - 1 ? 0.5 : 1.0);
    normalizer += w * step;
    moment += w * step * g(x);
  }
  if (normalizer == 0.0) throw NumericalError("grid: zero normalizer");
  return {moment / normalizer, normalizer};
}

/// Posterior mean of the grid coordinate itself.
inline std::pair<double, double> grid_posterior_mean(
    const std::function<double(double)>& logpost, const Grid1D& grid) {
  return grid_posterior_expectation(logpost, grid, [](double x) { return x; });
}

/// Argmax of logpost over the grid.
inline double grid_argmax(const std::function<double(double)>& logpost,
                          const Grid1D& grid) {
  if (!(grid.lo < grid.hi)) throw DomainError("grid: lo >= hi");
  if (grid.n_points < 3) throw DomainError("grid: fewer than 3 points");
  const double step = (grid.hi - grid.lo) / (grid.n_points - 1);
  double best_x = grid.lo, best = -INFINITY;
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.lo + i * step;
    const double v = logpost(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

struct EnumeratedOutcome {
  double weight;  // prior probability of this nuisance assignment
  double logp;
  std::vector<double> grad;
};

inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

/// Evaluates every nuisance assignment of an enumerable model: the exact,
/// finite version of both marginalization and nondeterminism integrals.
inline std::vector<EnumeratedOutcome> enumerate_outcomes(
    const EnumerableModel& model, const ParamVector& x) {
  const std::uint64_t count = model.outcome_count();
  if (count > kEnumerationBudget)
    throw DomainError("enumerate_outcomes: " + std::to_string(count) +
                      " outcomes exceed the enumeration budget");
  std::vector<EnumeratedOutcome> outcomes;
  outcomes.reserve(count);
  double total_weight = 0.0;
  for (std::uint64_t k = 0; k < count; ++k) {
    const double w = model.outcome_weight(k);
    EvalResult r = evaluate_outcome(model, x, k);
    outcomes.push_back({w, r.logp, std::move(r.grad)});
    total_weight += w;
  }
  if (std::abs(total_weight - 1.0) > 1e-12)
    throw NumericalError("enumerate_outcomes: weights sum to " +
                         std::to_string(total_weight));
  return outcomes;
}

}  // namespace ppmc
