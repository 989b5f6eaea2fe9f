#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flexport/lp.hpp"

namespace flexport {

// Carrier names with structural meaning.
inline constexpr std::string_view kElectricity = "electricity";
inline constexpr std::string_view kHydrogen = "hydrogen";

struct Carrier {
  std::string name;
  double co2_factor = 0.0;  // tCO2 per MWh of fuel input
  bool renewable = false;   // counted as renewable in monthly matching
};

/// Uniformly weighted snapshots covering one year at most.
struct SnapshotSet {
  std::size_t count = 0;
  double weight = 1.0;     // hours per snapshot
  std::vector<int> month;  // 1..12 per snapshot, non-decreasing

  [[nodiscard]] double horizon_hours() const { return weight * static_cast<double>(count); }
};

struct Bus {
  std::string id;
  std::string carrier;
  bool export_port = false;
};

struct Generator {
  std::string id;
  std::string bus;
  std::string carrier;
  double p_existing = 0.0;  // MW
  bool extendable = false;
  double p_max_build = kInf;    // MW that may be added
  double capex_annual = 0.0;    // EUR/MW/a of added capacity
  double marginal_cost = 0.0;   // EUR/MWh of output
  double efficiency = 1.0;      // output per unit fuel input
  std::vector<double> availability;  // per-unit, one value per snapshot
  std::string tech_class;
};

/// Directed conversion or transport. Dispatch is measured at the input.
struct Link {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double efficiency = 1.0;
  double p_existing = 0.0;  // MW input, may be infinite when not extendable
  bool extendable = false;
  double p_max_build = kInf;
  double capex_annual = 0.0;   // EUR/MW/a
  double marginal_cost = 0.0;  // EUR/MWh of input
  bool electrolyzer = false;
  std::string tech_class;
};

struct Store {
  std::string id;
  std::string bus;
  double e_existing = 0.0;  // MWh
  bool extendable = false;
  double e_max_build = kInf;
  double capex_annual = 0.0;  // EUR/MWh/a
  bool cyclic = true;
  bool fictional = false;     // export buffer: free, fixed size
  std::string tech_class;
};

struct Load {
  std::string id;
  std::string bus;
  std::vector<double> profile;  // MW per snapshot
  std::string sector;
};

/// Plain description of a system. References between components are by id
/// and are only checked by validate_network.
struct NetworkData {
  std::string name;
  std::vector<Carrier> carriers;
  SnapshotSet snapshots;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Link> links;
  std::vector<Store> stores;
  std::vector<Load> loads;
};

struct Violation {
  std::string component;  // "generator 'solar'" etc.
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string to_string() const;
};

[[nodiscard]] ValidationReport validate_network(const NetworkData& data);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  [[nodiscard]] const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Validated, immutable network with resolved component references.
/// Safe to share read-only between threads.
class Network {
 public:
  /// Throws ValidationError when `data` is not well formed.
  explicit Network(NetworkData data);

  [[nodiscard]] const NetworkData& data() const { return data_; }
  [[nodiscard]] const SnapshotSet& snapshots() const { return data_.snapshots; }
  [[nodiscard]] std::size_t num_snapshots() const { return data_.snapshots.count; }
  [[nodiscard]] double weight() const { return data_.snapshots.weight; }

  [[nodiscard]] const std::vector<Carrier>& carriers() const { return data_.carriers; }
  [[nodiscard]] const std::vector<Bus>& buses() const { return data_.buses; }
  [[nodiscard]] const std::vector<Generator>& generators() const { return data_.generators; }
  [[nodiscard]] const std::vector<Link>& links() const { return data_.links; }
  [[nodiscard]] const std::vector<Store>& stores() const { return data_.stores; }
  [[nodiscard]] const std::vector<Load>& loads() const { return data_.loads; }

  [[nodiscard]] std::size_t generator_bus(std::size_t g) const { return gen_bus_[g]; }
  [[nodiscard]] const Carrier& generator_carrier(std::size_t g) const;
  [[nodiscard]] std::size_t link_from(std::size_t l) const { return link_from_[l]; }
  [[nodiscard]] std::size_t link_to(std::size_t l) const { return link_to_[l]; }
  [[nodiscard]] std::size_t store_bus(std::size_t s) const { return store_bus_[s]; }
  [[nodiscard]] std::size_t load_bus(std::size_t d) const { return load_bus_[d]; }
  [[nodiscard]] const Carrier& bus_carrier(std::size_t b) const;

  [[nodiscard]] std::optional<std::size_t> find_bus(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> find_generator(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> find_link(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> find_store(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> find_carrier(std::string_view name) const;

 private:
  NetworkData data_;
  std::vector<std::size_t> gen_bus_, gen_carrier_;
  std::vector<std::size_t> link_from_, link_to_;
  std::vector<std::size_t> store_bus_, load_bus_, bus_carrier_;
};

/// Annual cost of one unit of capacity: investment * r / (1 - (1+r)^-n)
/// plus fom * investment (fom as a fraction of investment per year).
/// wacc = 0 gives investment / lifetime + fom * investment.
/// Throws std::invalid_argument on non-finite or out-of-range inputs.
[[nodiscard]] double annuitize(double investment, double lifetime, double wacc, double fom);

/// Flexibility of the export delivery schedule as a fraction of Q.
namespace tau {
inline constexpr double flexible = 1.0;
inline constexpr double weekly = 1.0 / 52.0;
inline constexpr double daily = 1.0 / 365.0;
inline constexpr double stable = 1.0 / 8760.0;
}  // namespace tau

/// "flexible", "weekly", "daily", "stable" or a number in (0, 1].
[[nodiscard]] double parse_tau(std::string_view text);
/// Label for the four named schedules, otherwise the number.
[[nodiscard]] std::string tau_label(double value);

struct ExportSpec {
  std::vector<std::string> ports;  // export_port bus ids
  double volume_q = 0.0;           // MWh over the horizon
  double tau = tau::flexible;

  /// Throws std::invalid_argument on tau outside (0, 1], Q <= 0 or no ports.
  void check() const;
};

/// Energy capacity of the export buffer store, tau * Q.
[[nodiscard]] double buffer_capacity(const ExportSpec& spec);

struct EmissionCap {
  std::optional<double> limit;  // tCO2 over the horizon; disabled if empty
  [[nodiscard]] bool enabled() const { return limit.has_value(); }
};

}  // namespace flexport
