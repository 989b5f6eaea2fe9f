#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "flexport/runner.hpp"

namespace flexport {

// Artifact directory layout written by write_artifact:
//   artifact.json          scenario, provenance, reference and all cells
//   reference.json         reference solve summary
//   cells/<key>.json       one summary per tau x Q cell
//   summary.csv            one row per cell
//   breakdown.csv          one row per cell and technology class
//   prices.csv             take-off prices, schedule rows x volume columns
//   schedules/<key>.csv    snapshot, feed_mw, buffer_mwh, price_eur_per_mwh
// Nothing time dependent is written, so reruns are byte-identical.

/// "<tau label>_<Q in MWh>", e.g. "stable_8760".
[[nodiscard]] std::string cell_key(double tau, double volume_q);
/// "10 TWh", "500 GWh" or "8760 MWh".
[[nodiscard]] std::string volume_label(double volume_mwh);

[[nodiscard]] std::string artifact_json(const RunArtifact& artifact);
[[nodiscard]] std::string reference_json(const RunArtifact& artifact);
[[nodiscard]] std::string cell_json(const RunArtifact& artifact, const CellResult& cell);
[[nodiscard]] std::string summary_csv(const RunArtifact& artifact);
[[nodiscard]] std::string breakdown_csv(const RunArtifact& artifact);
[[nodiscard]] std::string price_table_csv(const RunArtifact& artifact);
[[nodiscard]] std::string schedule_csv(const CellResult& cell);

/// Creates `dir` and writes every report; stale cell files are removed.
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir);

/// Parses artifact.json from a directory (or the file itself). Time
/// series are not restored. Throws std::runtime_error on malformed input.
[[nodiscard]] RunArtifact read_artifact(const std::filesystem::path& path);

enum class ReportFormat { csv, json, table };
[[nodiscard]] ReportFormat parse_report_format(std::string_view text);

/// csv: summary.csv; json: artifact.json; table: prices.csv.
[[nodiscard]] std::string render_report(const RunArtifact& artifact, ReportFormat format);

}  // namespace flexport
