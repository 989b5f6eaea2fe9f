#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flexport/solver.hpp"

namespace flexport {

SolutionQuality measure_quality(const LpProblem& problem,
                                const std::vector<double>& primal,
                                const std::vector<double>& dual) {
  const std::size_t n = problem.num_cols();
  const std::size_t m = problem.num_rows();
  if (primal.size() != n || dual.size() != m)
    throw std::invalid_argument("solution size does not match problem");

  std::vector<double> activity(m, 0.0);
  std::vector<double> magnitude(m, 0.0);
  std::vector<double> reduced(problem.cost);
  for (const auto& e : problem.entries) {
    activity[e.row] += e.value * primal[e.col];
    magnitude[e.row] = std::max(magnitude[e.row], std::abs(e.value * primal[e.col]));
    reduced[e.col] -= e.value * dual[e.row];
  }

  double cost_scale = 1.0;
  for (double c : problem.cost) cost_scale = std::max(cost_scale, 1.0 + std::abs(c));

  SolutionQuality q;
  for (std::size_t j = 0; j < n; ++j) q.primal_objective += problem.cost[j] * primal[j];

  // Dual objective uses the bound (or the row rhs) each multiplier prices;
  // multipliers of the wrong sign price the primal activity instead, so
  // p - d is exactly the signed sum of complementarity products.
  double dual_obj = 0.0;
  double max_product = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = dual[i];
    const double ax = activity[i];
    const double b = problem.rhs[i];
    double violation = 0.0;
    bool sign_ok = true;
    switch (problem.row_sense[i]) {
      case RowSense::equal:
        violation = std::abs(ax - b);
        break;
      case RowSense::less_equal:
        violation = std::max(0.0, ax - b);
        sign_ok = y <= 0.0;
        break;
      case RowSense::greater_equal:
        violation = std::max(0.0, b - ax);
        sign_ok = y >= 0.0;
        break;
    }
    q.primal_residual = std::max(q.primal_residual, violation);
    q.relative_residual =
        std::max(q.relative_residual, violation / (1.0 + std::abs(b) + magnitude[i]));
    if (sign_ok) {
      dual_obj += y * b;
      if (problem.row_sense[i] != RowSense::equal)
        max_product = std::max(max_product, std::abs(y) * std::abs(ax - b));
    } else {
      dual_obj += y * ax;
      q.dual_sign_violation = std::max(q.dual_sign_violation, std::abs(y) / cost_scale);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double x = primal[j];
    const double l = problem.col_lower[j];
    const double u = problem.col_upper[j];
    const double d = reduced[j];
    q.bound_violation = std::max({q.bound_violation, l - x, x - u});

    // priced at the nearer bound; a wrong sign there is dual infeasibility
    const bool has_l = std::isfinite(l);
    const bool has_u = std::isfinite(u);
    if (!has_l && !has_u) {
      dual_obj += d * x;
      q.dual_sign_violation = std::max(q.dual_sign_violation, std::abs(d) / cost_scale);
      continue;
    }
    const bool use_lower = has_l && (!has_u || x - l <= u - x);
    const double bound = use_lower ? l : u;
    dual_obj += d * bound;
    max_product = std::max(max_product, std::abs(d) * std::abs(x - bound));
    if (use_lower ? d < 0.0 : d > 0.0)
      q.dual_sign_violation = std::max(q.dual_sign_violation, std::abs(d) / cost_scale);
  }
  q.bound_violation = std::max(0.0, q.bound_violation);
  q.dual_objective = dual_obj;
  const double denom = 1.0 + std::abs(q.primal_objective);
  q.relative_gap = std::abs(q.primal_objective - dual_obj) / denom;
  q.complementarity = max_product / denom;
  return q;
}

}  // namespace flexport
