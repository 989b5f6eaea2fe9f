#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexport/analysis.hpp"
#include "flexport/formulation.hpp"
#include "flexport/model.hpp"
#include "flexport/solver.hpp"

namespace flexport {

struct ScenarioConfig {
  std::string id = "scenario";
  std::filesystem::path system_file;
  std::optional<std::filesystem::path> timeseries_dir;
  std::vector<double> volumes;  // MWh; empty disables export cells
  std::vector<double> taus;
  std::vector<std::string> ports;  // empty: every export_port bus
  bool temporal_matching = false;
  EmissionCap emission_cap;
  std::optional<double> wacc;  // default: the system file's rate
  std::filesystem::path output_dir = "out";
  unsigned workers = 1;
  Tolerances tolerances;

  /// Throws std::invalid_argument on volumes <= 0, tau outside (0,1],
  /// wacc < 0, a negative emission limit or zero workers.
  void check() const;
};

/// Reads a scenario file ([scenario] and optional [solver] tables). Paths
/// are resolved relative to the file. Throws ParseError with line and
/// column on malformed input.
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

[[nodiscard]] Network load_scenario_network(const ScenarioConfig& config);

struct ReferenceRun {
  AssembledLp lp;
  LpSolution solution;
  ReferenceProfile profile;
};

/// Solves the no-export system. Throws std::runtime_error naming the
/// status when the reference is not optimal.
[[nodiscard]] ReferenceRun run_reference(const Network& network, const EmissionCap& cap,
                                         const Tolerances& tol = {});

/// Export ports from the config, or every export_port bus.
[[nodiscard]] std::vector<std::string> export_ports(const ScenarioConfig& config, const Network& network);

[[nodiscard]] FormulationOptions cell_options(const ScenarioConfig& config, const Network& network,
                                              const ReferenceProfile& reference, double tau, double volume_q);

struct CellResult {
  double tau = 0.0;
  double volume_q = 0.0;
  SolveStatus status = SolveStatus::numerical_error;
  std::string error;  // set when the cell failed
  double objective = 0.0;
  int iterations = 0;
  double additional_cost = 0.0;          // objective - reference objective
  double additional_cost_per_mwh = 0.0;  // additional_cost / Q
  SolutionQuality quality;
  double max_balance_residual = 0.0;
  double max_matching_violation = 0.0;
  std::optional<PriceReport> price;
  std::optional<DeliverySchedule> schedule;
  std::optional<CostBreakdown> breakdown;
};

struct ReferenceSummary {
  SolveStatus status = SolveStatus::numerical_error;
  double objective = 0.0;
  int iterations = 0;
  SolutionQuality quality;
  ReferenceProfile profile;
};

struct RunArtifact {
  std::string scenario_id;
  std::string config_hash;
  std::string tool_version;
  std::size_t solves = 0;
  std::vector<double> taus;
  std::vector<double> volumes;
  ReferenceSummary reference;
  std::vector<CellResult> cells;  // tau-major, in config order
};

/// Largest violation over rows of one kind: |activity - rhs| for
/// equalities, the exceeded amount for inequalities.
[[nodiscard]] double max_row_violation(const LpProblem& problem, const std::vector<double>& primal, RowKind kind);
/// max_row_violation over balance rows.
[[nodiscard]] double max_balance_residual(const LpProblem& problem, const std::vector<double>& primal);

/// Solves one export cell against a finished reference run.
[[nodiscard]] CellResult solve_cell(const ScenarioConfig& config, const Network& network,
                                    const ReferenceRun& reference, double tau, double volume_q);

/// Reference solve, then one solve per (tau, Q) cell on up to
/// config.workers threads. Failed cells carry their status and error; the
/// remaining cells still run. Results do not depend on the worker count.
[[nodiscard]] RunArtifact run_matrix(const ScenarioConfig& config, const Network& network);
[[nodiscard]] RunArtifact run_matrix(const ScenarioConfig& config);

/// FNV-1a over a canonical dump of the config and the network data.
[[nodiscard]] std::string config_hash(const ScenarioConfig& config, const NetworkData& network);

[[nodiscard]] const char* tool_version();

}  // namespace flexport
