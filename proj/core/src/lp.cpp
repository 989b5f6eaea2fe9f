#include "flexport/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flexport {

std::size_t LpProblem::add_column(double cost_coeff, double lower,
                                  double upper, ColumnTag tag) {
  cost.push_back(cost_coeff);
  col_lower.push_back(lower);
  col_upper.push_back(upper);
  col_tags.push_back(tag);
  return cost.size() - 1;
}

std::size_t LpProblem::add_row(RowSense sense, double rhs_value, RowTag tag) {
  row_sense.push_back(sense);
  rhs.push_back(rhs_value);
  row_tags.push_back(tag);
  return rhs.size() - 1;
}

void LpProblem::add_entry(std::size_t row, std::size_t col, double value) {
  entries.push_back({row, col, value});
}

void LpProblem::check() const {
  const std::size_t n = num_cols();
  const std::size_t m = num_rows();
  if (col_lower.size() != n || col_upper.size() != n || col_tags.size() != n)
    throw std::invalid_argument("column arrays have inconsistent sizes");
  if (row_sense.size() != m || row_tags.size() != m)
    throw std::invalid_argument("row arrays have inconsistent sizes");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j]))
      throw std::invalid_argument("non-finite cost in column " +
                                  std::to_string(j));
    if (std::isnan(col_lower[j]) || std::isnan(col_upper[j]) ||
        col_lower[j] > col_upper[j] || col_lower[j] == kInf ||
        col_upper[j] == -kInf)
      throw std::invalid_argument("invalid bounds in column " +
                                  std::to_string(j));
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!std::isfinite(rhs[i]))
      throw std::invalid_argument("non-finite rhs in row " + std::to_string(i));

  std::vector<std::pair<std::size_t, std::size_t>> keys;
  keys.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row >= m || e.col >= n)
      throw std::invalid_argument("matrix entry out of range");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("non-finite matrix entry at row " +
                                  std::to_string(e.row));
    keys.emplace_back(e.row, e.col);
  }
  std::sort(keys.begin(), keys.end());
  auto dup = std::adjacent_find(keys.begin(), keys.end());
  if (dup != keys.end())
    throw std::invalid_argument("duplicate entry at row " +
                                std::to_string(dup->first) + ", column " +
                                std::to_string(dup->second));
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

}  // namespace flexport
