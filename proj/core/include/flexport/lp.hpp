#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace flexport {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { less_equal, equal, greater_equal };

// What a constraint row models. Used to group duals after a solve.
enum class RowKind : std::uint8_t {
  generic,
  balance,         // bus x snapshot
  storage,         // state-of-charge recursion, store x snapshot
  generator_cap,   // dispatch <= availability * capacity
  link_cap,        // flow <= capacity
  store_cap,       // soc <= capacity
  buffer,          // export buffer state-of-charge recursion
  matching,        // monthly renewable matching, month 0..11
  emission,        // single emission cap row
};

enum class ColumnKind : std::uint8_t {
  generic,
  generator_dispatch,
  generator_capacity,
  link_dispatch,
  link_capacity,
  store_soc,
  store_charge,
  store_discharge,
  store_capacity,
};

/// Identifies a row by kind, component index (bus, store, ...) and period
/// (snapshot or month). `component` and `period` are zero when unused.
struct RowTag {
  RowKind kind = RowKind::generic;
  std::size_t component = 0;
  std::size_t period = 0;
  friend bool operator==(const RowTag&, const RowTag&) = default;
};

struct ColumnTag {
  ColumnKind kind = ColumnKind::generic;
  std::size_t component = 0;
  std::size_t period = 0;
  friend bool operator==(const ColumnTag&, const ColumnTag&) = default;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Minimization LP over bounded columns:
///   min cost'x  s.t.  row_i(x) {<=,=,>=} rhs_i,  lower <= x <= upper.
/// Bounds may be infinite.
struct LpProblem {
  std::string name = "LP";
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<ColumnTag> col_tags;
  std::vector<RowSense> row_sense;
  std::vector<double> rhs;
  std::vector<RowTag> row_tags;
  std::vector<Triplet> entries;

  [[nodiscard]] std::size_t num_cols() const { return cost.size(); }
  [[nodiscard]] std::size_t num_rows() const { return rhs.size(); }

  std::size_t add_column(double cost_coeff, double lower, double upper,
                         ColumnTag tag = {});
  std::size_t add_row(RowSense sense, double rhs_value, RowTag tag = {});
  void add_entry(std::size_t row, std::size_t col, double value);

  /// Throws std::invalid_argument describing the first violated invariant
  /// (sizes, finiteness, lower <= upper, duplicate (row, col) pairs).
  void check() const;
};

enum class SolveStatus : std::uint8_t {
  optimal,
  infeasible,
  unbounded,
  iteration_limit,
  numerical_error,
};

[[nodiscard]] const char* to_string(SolveStatus status);

struct Tolerances {
  double feasibility = 1e-7;  // absolute primal residual bound
  double optimality = 1e-6;   // relative duality gap bound
  int max_iterations = 300;
};

/// Quality measures of a primal/dual pair, all computed on the caller's
/// (unscaled) problem.
struct SolutionQuality {
  double primal_residual = 0.0;    // max row violation, absolute
  double relative_residual = 0.0;  // violation / (1 + |rhs| + max|a_ij x_j|)
  double bound_violation = 0.0;    // max column bound violation, absolute
  double dual_sign_violation = 0.0;  // relative to 1 + max|cost|
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;       // |p - d| / (1 + |p|)
  double complementarity = 0.0;    // max pairwise product / (1 + |p|)
};

/// Solver output. Row duals follow y = d(objective)/d(rhs): a binding >=
/// row has y >= 0 and a binding <= row has y <= 0. Reduced costs are
/// cost - A'y. For infeasible problems `ray` holds row multipliers of a
/// Farkas certificate; for unbounded problems it is a primal direction.
struct LpSolution {
  SolveStatus status = SolveStatus::numerical_error;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  std::vector<double> ray;
  int iterations = 0;
  SolutionQuality quality;
};

}  // namespace flexport
