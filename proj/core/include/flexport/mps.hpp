#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "flexport/lp.hpp"

namespace flexport {

// Fixed-layout MPS interchange.
//
// Sections are always emitted in the order NAME, ROWS, COLUMNS, RHS,
// BOUNDS, ENDATA. The objective row is "COST"; rows and columns are named
// R0000001.. and C0000001.. in problem order so that every name fits the
// eight-character fixed fields. Numbers use 12 significant digits and
// start in column 25; long numbers run past column 36, which
// whitespace-tokenizing readers accept. Every column carries a COST entry,
// even when zero, so columns without matrix entries survive a round trip.

void write_mps(const LpProblem& problem, std::ostream& out);

/// Throws std::runtime_error if `path` cannot be written.
void write_mps(const LpProblem& problem, const std::filesystem::path& path);

/// Parses MPS text (fixed or whitespace-separated free layout without
/// RANGES). Throws std::runtime_error naming the offending line.
[[nodiscard]] LpProblem parse_mps(std::string_view text);
[[nodiscard]] LpProblem read_mps(const std::filesystem::path& path);

/// The numeric formatting used by write_mps.
[[nodiscard]] std::string format_mps_number(double value);

}  // namespace flexport
