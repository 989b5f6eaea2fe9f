#include "flexport/mps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace flexport {
namespace {

std::string indexed_name(char prefix, std::size_t index) {
  if (index + 1 > 9'999'999)
    throw std::runtime_error("MPS writer supports at most 9999999 rows/columns");
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%07zu", prefix, index + 1);
  return buf;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

// " F1 NAME2345  NAME2345  value" with the number starting at column 25.
void data_line(std::ostream& out, std::string_view f1, std::string_view f2,
               std::string_view f3, double value) {
  out << ' ' << pad(f1, 2) << ' ' << pad(f2, 8) << "  " << pad(f3, 8) << "  "
      << format_mps_number(value) << '\n';
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("MPS line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    fail(line, "invalid number '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

std::string format_mps_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_mps(const LpProblem& problem, std::ostream& out) {
  problem.check();
  const std::size_t n = problem.num_cols();
  const std::size_t m = problem.num_rows();

  out << "NAME          " << problem.name << '\n';
  out << "ROWS\n";
  out << " N  COST\n";
  for (std::size_t i = 0; i < m; ++i) {
    const char* sense = problem.row_sense[i] == RowSense::equal       ? "E"
                        : problem.row_sense[i] == RowSense::less_equal ? "L"
                                                                        : "G";
    out << ' ' << pad(sense, 2) << ' ' << indexed_name('R', i) << '\n';
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(n);
  for (const auto& e : problem.entries) by_col[e.col].emplace_back(e.row, e.value);
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    auto& col = by_col[j];
    std::sort(col.begin(), col.end());
    const std::string name = indexed_name('C', j);
    data_line(out, "", name, "COST", problem.cost[j]);
    for (const auto& [row, value] : col) data_line(out, "", name, indexed_name('R', row), value);
  }

  out << "RHS\n";
  for (std::size_t i = 0; i < m; ++i)
    if (problem.rhs[i] != 0.0) data_line(out, "", "RHS", indexed_name('R', i), problem.rhs[i]);

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const double l = problem.col_lower[j];
    const double u = problem.col_upper[j];
    const std::string name = indexed_name('C', j);
    if (l == u) {
      data_line(out, "FX", "BND", name, l);
    } else if (!std::isfinite(l) && !std::isfinite(u)) {
      out << " FR BND       " << name << '\n';
    } else {
      if (!std::isfinite(l))
        out << " MI BND       " << name << '\n';
      else if (l != 0.0 || u < 0.0)
        data_line(out, "LO", "BND", name, l);
      if (std::isfinite(u)) data_line(out, "UP", "BND", name, u);
    }
  }
  out << "ENDATA\n";
}

void write_mps(const LpProblem& problem, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_mps(problem, file);
  file.flush();
  if (!file) throw std::runtime_error("failed writing '" + path.string() + "'");
}

LpProblem parse_mps(std::string_view text) {
  enum class Section { none, name, rows, columns, rhs, bounds, done };
  Section section = Section::none;
  LpProblem lp;
  std::string objective_row;
  std::unordered_map<std::string, std::size_t> row_index;
  std::unordered_map<std::string, std::size_t> col_index;
  std::map<std::pair<std::size_t, std::size_t>, double> coeffs;
  std::vector<bool> lower_set;

  auto column_of = [&](std::string_view name) {
    auto [it, inserted] = col_index.try_emplace(std::string(name), lp.num_cols());
    if (inserted) {
      lp.add_column(0.0, 0.0, kInf);
      lower_set.push_back(false);
    }
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size() && section != Section::done) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '*') {
      if (pos > text.size()) break;
      continue;
    }
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string_view head = toks[0];
      if (head == "NAME") {
        section = Section::name;
        if (toks.size() > 1) lp.name = std::string(toks[1]);
      } else if (head == "ROWS") {
        section = Section::rows;
      } else if (head == "COLUMNS") {
        section = Section::columns;
      } else if (head == "RHS") {
        section = Section::rhs;
      } else if (head == "BOUNDS") {
        section = Section::bounds;
      } else if (head == "ENDATA") {
        section = Section::done;
      } else {
        fail(line_no, "unsupported section '" + std::string(head) + "'");
      }
      continue;
    }

    switch (section) {
      case Section::rows: {
        if (toks.size() != 2) fail(line_no, "expected '<type> <name>'");
        const std::string_view type = toks[0];
        const std::string name(toks[1]);
        if (type == "N") {
          if (objective_row.empty()) objective_row = name;
          continue;
        }
        RowSense sense;
        if (type == "E") sense = RowSense::equal;
        else if (type == "L") sense = RowSense::less_equal;
        else if (type == "G") sense = RowSense::greater_equal;
        else fail(line_no, "unknown row type '" + std::string(type) + "'");
        if (!row_index.try_emplace(name, lp.num_rows()).second)
          fail(line_no, "duplicate row '" + name + "'");
        lp.add_row(sense, 0.0);
        break;
      }
      case Section::columns: {
        if (toks.size() != 3 && toks.size() != 5) fail(line_no, "expected '<col> <row> <value> [<row> <value>]'");
        if (toks[1] == "'MARKER'") fail(line_no, "integer markers are not supported");
        const std::size_t j = column_of(toks[0]);
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string row(toks[k]);
          const double v = parse_number(toks[k + 1], line_no);
          if (row == objective_row) {
            lp.cost[j] = v;
            continue;
          }
          auto it = row_index.find(row);
          if (it == row_index.end()) fail(line_no, "unknown row '" + row + "'");
          if (!coeffs.try_emplace({it->second, j}, v).second)
            fail(line_no, "duplicate entry for row '" + row + "'");
        }
        break;
      }
      case Section::rhs: {
        if (toks.size() != 3 && toks.size() != 5) fail(line_no, "expected '<set> <row> <value> [<row> <value>]'");
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string row(toks[k]);
          const double v = parse_number(toks[k + 1], line_no);
          if (row == objective_row) continue;
          auto it = row_index.find(row);
          if (it == row_index.end()) fail(line_no, "unknown row '" + row + "'");
          lp.rhs[it->second] = v;
        }
        break;
      }
      case Section::bounds: {
        if (toks.size() < 3) fail(line_no, "expected '<type> <set> <col> [<value>]'");
        const std::string_view type = toks[0];
        auto it = col_index.find(std::string(toks[2]));
        if (it == col_index.end()) fail(line_no, "unknown column '" + std::string(toks[2]) + "'");
        const std::size_t j = it->second;
        const bool needs_value = type == "UP" || type == "LO" || type == "FX";
        if (needs_value && toks.size() != 4) fail(line_no, "bound needs a value");
        const double v = needs_value ? parse_number(toks[3], line_no) : 0.0;
        if (type == "UP") {
          lp.col_upper[j] = v;
          if (v < 0.0 && !lower_set[j] && lp.col_lower[j] == 0.0) lp.col_lower[j] = -kInf;
        } else if (type == "LO") {
          lp.col_lower[j] = v;
          lower_set[j] = true;
        } else if (type == "FX") {
          lp.col_lower[j] = v;
          lp.col_upper[j] = v;
          lower_set[j] = true;
        } else if (type == "FR") {
          lp.col_lower[j] = -kInf;
          lp.col_upper[j] = kInf;
        } else if (type == "MI") {
          lp.col_lower[j] = -kInf;
          lower_set[j] = true;
        } else if (type == "PL") {
          lp.col_upper[j] = kInf;
        } else {
          fail(line_no, "unsupported bound type '" + std::string(type) + "'");
        }
        break;
      }
      default:
        fail(line_no, "data line outside a section");
    }
    if (pos > text.size()) break;
  }
  if (section != Section::done) throw std::runtime_error("MPS text ends without ENDATA");
  lp.entries.reserve(coeffs.size());
  for (const auto& [key, v] : coeffs) lp.add_entry(key.first, key.second, v);
  std::sort(lp.entries.begin(), lp.entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  return lp;
}

LpProblem read_mps(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << file.rdbuf();
  const std::string text = ss.str();
  return parse_mps(text);
}

}  // namespace flexport
