#pragma once

#include <array>
#include <optional>
#include <vector>

#include "flexport/lp.hpp"

namespace flexport {

/// Solves `problem` with a homogeneous self-dual interior-point method.
///
/// Contract when the returned status is optimal, measured on the caller's
/// problem: relative row residual (violation over 1 + |rhs| + largest
/// |a_ij x_j| of the row) and bound violations <= tol.feasibility,
/// relative duality gap <= tol.optimality, complementarity (max pairwise
/// product over 1 + |objective|) <= tol.feasibility. If the iterate cannot
/// be brought inside the contract the status is numerical_error, never
/// optimal.
///
/// Presolve removes empty rows, empty and fixed columns, and turns rows
/// with a single free entry into column bounds; their duals are recovered
/// from the reduced cost of that column. Single-threaded and
/// deterministic: identical input gives bit-identical output.
[[nodiscard]] LpSolution solve(const LpProblem& problem,
                               const Tolerances& tol = {});

/// Quality of a primal/dual pair on `problem`. Each reduced cost is priced
/// at the bound nearer to its column value; a multiplier of the wrong sign
/// counts as dual_sign_violation rather than as a complementarity product.
[[nodiscard]] SolutionQuality measure_quality(const LpProblem& problem,
                                              const std::vector<double>& primal,
                                              const std::vector<double>& dual);

/// Row duals grouped by what the rows model.
struct TaggedDuals {
  std::vector<std::vector<double>> balance;  // [bus][snapshot]
  std::vector<std::vector<double>> buffer;   // [store][snapshot], buffer rows
  std::array<double, 12> matching{};         // per month
  std::array<bool, 12> has_matching{};
  std::optional<double> emission;
};

/// Throws std::invalid_argument unless `solution` is optimal.
[[nodiscard]] TaggedDuals extract_duals(const LpSolution& solution,
                                        const std::vector<RowTag>& row_tags);

}  // namespace flexport
