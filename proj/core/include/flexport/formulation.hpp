#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "flexport/lp.hpp"
#include "flexport/model.hpp"

namespace flexport {

// Ids of the components attach_export adds.
inline constexpr std::string_view kExportHub = "export_hub";
inline constexpr std::string_view kExportBuffer = "export_buffer";
inline constexpr std::string_view kExportOfftake = "export_offtake";
inline constexpr std::string_view kExportFeedPrefix = "export_feed:";

/// Column layout of the LP. Dispatch-like variables occupy a contiguous
/// block of T columns per component; capacity columns exist only for
/// extendable components.
class VariableIndex {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  [[nodiscard]] std::size_t num_snapshots() const { return num_snapshots_; }
  [[nodiscard]] std::size_t num_columns() const { return lower_.size(); }

  [[nodiscard]] std::size_t generator_dispatch(std::size_t g, std::size_t t) const { return gen_dispatch_[g] + t; }
  [[nodiscard]] std::size_t link_dispatch(std::size_t l, std::size_t t) const { return link_dispatch_[l] + t; }
  [[nodiscard]] std::size_t store_soc(std::size_t s, std::size_t t) const { return store_soc_[s] + t; }
  [[nodiscard]] std::size_t store_charge(std::size_t s, std::size_t t) const { return store_charge_[s] + t; }
  [[nodiscard]] std::size_t store_discharge(std::size_t s, std::size_t t) const { return store_discharge_[s] + t; }

  /// npos when the component is not extendable.
  [[nodiscard]] std::size_t generator_capacity(std::size_t g) const { return gen_capacity_[g]; }
  [[nodiscard]] std::size_t link_capacity(std::size_t l) const { return link_capacity_[l]; }
  [[nodiscard]] std::size_t store_capacity(std::size_t s) const { return store_capacity_[s]; }

  [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
  [[nodiscard]] const std::vector<double>& upper() const { return upper_; }
  [[nodiscard]] const std::vector<ColumnTag>& tags() const { return tags_; }

 private:
  friend VariableIndex build_variables(const Network& network);
  std::size_t block(ColumnKind kind, std::size_t component, std::size_t count);
  std::size_t single(ColumnKind kind, std::size_t component, double upper);

  std::size_t num_snapshots_ = 0;
  std::vector<std::size_t> gen_dispatch_, gen_capacity_;
  std::vector<std::size_t> link_dispatch_, link_capacity_;
  std::vector<std::size_t> store_soc_, store_charge_, store_discharge_, store_capacity_;
  std::vector<double> lower_, upper_;
  std::vector<ColumnTag> tags_;
};

/// Assigns columns and bounds. Fixed generators carry availability *
/// p_existing as an upper bound; extendable components get capacity rows
/// instead (see capacity_rows).
[[nodiscard]] VariableIndex build_variables(const Network& network);

struct LpRow {
  RowSense sense = RowSense::equal;
  double rhs = 0.0;
  RowTag tag;
  std::vector<std::pair<std::size_t, double>> coeffs;
};

/// Monthly electrolyzer electricity use and renewable generation (MWh) of
/// the no-export reference run.
struct ReferenceProfile {
  std::array<double, 12> electrolyzer_mwh{};
  std::array<double, 12> renewable_mwh{};
};

/// Per (bus, snapshot): generation + efficiency * link inflow + discharge
/// - link outflow - charge = load. The export hub is left to
/// export_buffer_rows.
[[nodiscard]] std::vector<LpRow> nodal_balance_rows(const Network& network, const VariableIndex& index);

/// soc_t - soc_{t-1} - weight * (charge_t - discharge_t) = 0 for every
/// non-fictional store; cyclic stores wrap t = 0 to t = T-1, others start
/// empty.
[[nodiscard]] std::vector<LpRow> storage_dynamics_rows(const Network& network, const VariableIndex& index);

/// dispatch_t <= availability_t * (existing + built) for extendable
/// generators, flow_t <= existing + built for extendable links and
/// soc_t <= existing + built for extendable stores.
[[nodiscard]] std::vector<LpRow> capacity_rows(const Network& network, const VariableIndex& index);

/// Copy of `network` with the export hub attached: a lossless,
/// uncapacitated feed link from every port, a free cyclic buffer store of
/// energy capacity tau * Q and a constant offtake of Q / (T * weight) MW.
/// Throws std::invalid_argument on an invalid spec or a port that is not
/// an export_port bus.
[[nodiscard]] Network attach_export(const Network& network, const ExportSpec& spec);

/// Balance rows of the export hub and state-of-charge rows of the buffer.
/// `network` must come from attach_export.
[[nodiscard]] std::vector<LpRow> export_buffer_rows(const Network& network, const VariableIndex& index,
                                                    const ExportSpec& spec);

/// One row per calendar month m:
///   sum_{t in m} w * (electrolyzer input) - C_ref(m)
///     <= sum_{t in m} w * (renewable dispatch) - G_ref(m).
[[nodiscard]] std::vector<LpRow> temporal_matching_rows(const Network& network, const VariableIndex& index,
                                                        const ReferenceProfile& reference);

/// sum w * co2 * fuel input <= limit, with fuel input dispatch / efficiency
/// for generators and the link input for links leaving a fuel bus.
[[nodiscard]] LpRow emission_cap_row(const Network& network, const VariableIndex& index, double limit);

/// capex_annual on capacity columns, marginal_cost * weight on dispatch.
[[nodiscard]] std::vector<double> objective(const Network& network, const VariableIndex& index);

struct FormulationOptions {
  std::optional<ExportSpec> export_spec;
  bool temporal_matching = false;
  std::optional<ReferenceProfile> reference;  // required with temporal_matching
  EmissionCap emission_cap;
};

/// The assembled LP together with the (possibly export-augmented) network
/// and column layout it was built from.
struct AssembledLp {
  Network network;
  VariableIndex index;
  LpProblem problem;
  std::optional<ExportSpec> export_spec;
};

/// Rows are appended in the order balance, storage, capacity, export,
/// matching, emission. Throws std::invalid_argument if matching is enabled
/// without a reference profile.
[[nodiscard]] AssembledLp assemble_lp(const Network& network, const FormulationOptions& options);

/// Number of rows assemble_lp produces:
///   (buses + stores + extendable generators + extendable links +
///    extendable stores) * T + 12 * matching + 1 * emission cap,
/// where an export adds one bus and one store.
[[nodiscard]] std::size_t expected_row_count(const Network& network, const FormulationOptions& options);

/// Monthly aggregation of electrolyzer input and renewable dispatch from a
/// primal solution of an LP built on `network`.
[[nodiscard]] ReferenceProfile reference_profile(const Network& network, const VariableIndex& index,
                                                 const std::vector<double>& primal);

}  // namespace flexport
