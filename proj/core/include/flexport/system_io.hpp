#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexport/kv_document.hpp"
#include "flexport/model.hpp"

namespace flexport {

/// Cost and performance data of one technology in model units: EUR/MW
/// (or EUR/MWh for energy capacity), years, EUR/MWh.
struct TechnologyParams {
  std::string name;
  double investment = 0.0;
  double lifetime = 1.0;
  double fom_fraction = 0.0;  // of investment per year
  double fom_absolute = 0.0;  // EUR/MW/a on top of the fraction
  double vom = 0.0;           // EUR/MWh
  double efficiency = 1.0;
  std::optional<double> wacc;  // overrides the scenario rate

  /// annuitize(investment, lifetime, wacc, fom_fraction) + fom_absolute.
  [[nodiscard]] double capex_annual(double scenario_wacc) const;
};

using TechnologyTable = std::map<std::string, TechnologyParams, std::less<>>;

/// Reads [[technology]] tables. Units are given per entry:
///   investment_unit  EUR/kW, EUR/kWh, EUR/MW, EUR/MWh
///   fom_unit         %/year, EUR/kW/year, EUR/MW/year
/// kW-based values are scaled to MW.
[[nodiscard]] TechnologyTable parse_technologies(const KvDocument& doc);
[[nodiscard]] TechnologyTable load_technologies(const std::filesystem::path& path);

/// Numeric CSV whose first column is the snapshot index 0..rows-1.
struct ProfileTable {
  std::string source;
  std::vector<std::string> columns;         // excluding the index column
  std::vector<std::vector<double>> values;  // [column][row]
  std::size_t rows = 0;

  [[nodiscard]] const std::vector<double>* find(std::string_view column) const;
};

/// Throws ParseError with line and column on malformed input.
[[nodiscard]] ProfileTable parse_profile_csv(std::string_view text, const std::string& source);
[[nodiscard]] ProfileTable read_profile_csv(const std::filesystem::path& path);

struct SystemOptions {
  std::optional<std::filesystem::path> timeseries_dir;  // default: next to the system file
  std::optional<double> wacc;                           // default: [system] wacc
};

/// Parses a system file into validated network data. Throws ParseError on
/// syntax or schema errors, std::runtime_error on profile mismatches
/// (naming the component) and ValidationError on model violations.
[[nodiscard]] NetworkData load_system_data(const std::filesystem::path& system_file,
                                           const SystemOptions& options = {});
[[nodiscard]] Network load_system(const std::filesystem::path& system_file, const SystemOptions& options = {});

}  // namespace flexport
