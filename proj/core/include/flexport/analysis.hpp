#pragma once

#include <map>
#include <string>
#include <vector>

#include "flexport/formulation.hpp"
#include "flexport/lp.hpp"
#include "flexport/model.hpp"

namespace flexport {

struct PriceReport {
  double take_off_price = 0.0;            // EUR/MWh, offtake-weighted
  std::vector<double> time_series_price;  // EUR/MWh per snapshot
  std::vector<double> offtake_mwh;        // energy drawn per snapshot
  double tau = 0.0;
  double volume_q = 0.0;
};

/// Offtake-weighted mean of the export hub balance duals:
///   sum_t dual_t * offtake_t / Q  with offtake_t in MW,
/// which is the marginal system cost of one more MWh of export volume at
/// fixed buffer size. Throws std::invalid_argument when `lp` carries no
/// export or `solution` is not optimal.
[[nodiscard]] PriceReport take_off_price(const LpSolution& solution, const AssembledLp& lp);

struct FiniteDifferencePrice {
  double objective = 0.0;         // Theta(Q)
  double objective_plus = 0.0;    // Theta(Q + dQ)
  double delta_q = 0.0;
  double fd_price = 0.0;          // (Theta(Q + dQ) - Theta(Q)) / dQ
  double dual_price = 0.0;
  double relative_error = 0.0;    // |dual - fd| / |fd|
};

/// Re-solves with Q scaled by (1 + relative_delta), tau unchanged, and
/// compares the slope with take_off_price. Throws std::runtime_error when
/// either solve is not optimal.
[[nodiscard]] FiniteDifferencePrice finite_difference_price(const Network& network,
                                                            const FormulationOptions& options,
                                                            double relative_delta,
                                                            const Tolerances& tol = {});

struct DeliverySchedule {
  std::vector<double> feed_mw;     // sum over ports into the export hub
  std::vector<double> buffer_mwh;  // buffer state of charge
  double weight = 1.0;
  double offtake_mw = 0.0;
  double delivered_mwh = 0.0;      // sum feed * weight
  double mean = 0.0;
  double max = 0.0;
  double variance = 0.0;           // population variance of feed_mw
};

/// Port to hub flows of an optimal export solution. Throws
/// std::invalid_argument when `lp` carries no export.
[[nodiscard]] DeliverySchedule delivery_schedule(const LpSolution& solution, const AssembledLp& lp);

struct ClassDelta {
  double capex_delta = 0.0;  // EUR/a
  double opex_delta = 0.0;   // EUR/a
  double capex_per_mwh = 0.0;
  double opex_per_mwh = 0.0;
};

struct CostBreakdown {
  std::map<std::string, ClassDelta> classes;  // by technology class
  double total_delta = 0.0;                   // sum over classes
  double volume_q = 0.0;
};

/// Export-run minus reference-run cost by technology class: capex_annual
/// times built capacity and marginal_cost * weight times dispatch.
/// Components are matched by id; export-only components count against
/// zero. Components without a tech_class fall under "generator", "link"
/// or "store". Throws std::invalid_argument on mismatched snapshot sets.
[[nodiscard]] CostBreakdown cost_breakdown(const LpSolution& export_solution, const AssembledLp& export_lp,
                                           const LpSolution& reference_solution,
                                           const AssembledLp& reference_lp);

struct VerificationCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  std::size_t worst_row = 0;  // row with the largest residual
  RowKind worst_row_kind = RowKind::generic;
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const VerificationCheck* find(const std::string& name) const;
};

struct VerificationLimits {
  double residual = 1e-7;
  double gap = 1e-6;
  double complementarity = 1e-7;
  double dual_sign = 1e-7;
};

/// Recomputes row residuals, bound violations, dual signs, the duality gap
/// and complementary slackness directly from the triplets. Checks are
/// "row_residual", "bound_violation", "dual_sign", "relative_gap" and
/// "complementarity"; gap and complementarity are normalized by
/// 1 + |primal objective|, dual signs by 1 + max|cost|.
[[nodiscard]] VerificationReport verify_solution(const LpProblem& problem, const std::vector<double>& primal,
                                                 const std::vector<double>& dual,
                                                 const VerificationLimits& limits = {});
[[nodiscard]] VerificationReport verify_solution(const LpSolution& solution, const LpProblem& problem,
                                                 const VerificationLimits& limits = {});

}  // namespace flexport
