#include "flexport/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace flexport {
namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ordered_json quality_json(const SolutionQuality& q) {
  return {{"primal_residual", q.primal_residual},   {"relative_residual", q.relative_residual},
          {"bound_violation", q.bound_violation},
          {"dual_sign_violation", q.dual_sign_violation}, {"relative_gap", q.relative_gap},
          {"complementarity", q.complementarity}};
}

SolutionQuality quality_from(const ordered_json& j) {
  SolutionQuality q;
  q.primal_residual = j.at("primal_residual").get<double>();
  q.relative_residual = j.at("relative_residual").get<double>();
  q.bound_violation = j.at("bound_violation").get<double>();
  q.dual_sign_violation = j.at("dual_sign_violation").get<double>();
  q.relative_gap = j.at("relative_gap").get<double>();
  q.complementarity = j.at("complementarity").get<double>();
  return q;
}

SolveStatus status_from(const std::string& s) {
  for (auto st : {SolveStatus::optimal, SolveStatus::infeasible, SolveStatus::unbounded,
                  SolveStatus::iteration_limit, SolveStatus::numerical_error})
    if (s == to_string(st)) return st;
  throw std::runtime_error("unknown status '" + s + "'");
}

ordered_json cell_to_json(const CellResult& c) {
  ordered_json j;
  j["key"] = cell_key(c.tau, c.volume_q);
  j["schedule"] = tau_label(c.tau);
  j["tau"] = c.tau;
  j["volume_mwh"] = c.volume_q;
  j["status"] = to_string(c.status);
  if (!c.error.empty()) j["error"] = c.error;
  j["iterations"] = c.iterations;
  if (c.status != SolveStatus::optimal) return j;
  j["objective"] = c.objective;
  j["additional_cost"] = c.additional_cost;
  j["additional_cost_per_mwh"] = c.additional_cost_per_mwh;
  j["quality"] = quality_json(c.quality);
  j["max_balance_residual"] = c.max_balance_residual;
  j["max_matching_violation"] = c.max_matching_violation;
  if (c.price) j["take_off_price"] = c.price->take_off_price;
  if (c.schedule) {
    const auto& s = *c.schedule;
    j["delivery"] = {{"delivered_mwh", s.delivered_mwh}, {"offtake_mw", s.offtake_mw}, {"mean_mw", s.mean},
                     {"max_mw", s.max},                  {"variance", s.variance}};
  }
  if (c.breakdown) {
    ordered_json classes = ordered_json::object();
    for (const auto& [name, d] : c.breakdown->classes)
      classes[name] = {{"capex_delta", d.capex_delta}, {"opex_delta", d.opex_delta},
                       {"capex_per_mwh", d.capex_per_mwh}, {"opex_per_mwh", d.opex_per_mwh}};
    j["breakdown"] = {{"total_delta", c.breakdown->total_delta}, {"classes", classes}};
  }
  return j;
}

CellResult cell_from_json(const ordered_json& j) {
  CellResult c;
  c.tau = j.at("tau").get<double>();
  c.volume_q = j.at("volume_mwh").get<double>();
  c.status = status_from(j.at("status").get<std::string>());
  c.error = j.value("error", "");
  c.iterations = j.at("iterations").get<int>();
  if (c.status != SolveStatus::optimal) return c;
  c.objective = j.at("objective").get<double>();
  c.additional_cost = j.at("additional_cost").get<double>();
  c.additional_cost_per_mwh = j.at("additional_cost_per_mwh").get<double>();
  c.quality = quality_from(j.at("quality"));
  c.max_balance_residual = j.at("max_balance_residual").get<double>();
  c.max_matching_violation = j.value("max_matching_violation", 0.0);
  if (j.contains("take_off_price")) {
    PriceReport p;
    p.take_off_price = j["take_off_price"].get<double>();
    p.tau = c.tau;
    p.volume_q = c.volume_q;
    c.price = p;
  }
  if (j.contains("delivery")) {
    const auto& d = j["delivery"];
    DeliverySchedule s;
    s.delivered_mwh = d.at("delivered_mwh").get<double>();
    s.offtake_mw = d.at("offtake_mw").get<double>();
    s.mean = d.at("mean_mw").get<double>();
    s.max = d.at("max_mw").get<double>();
    s.variance = d.at("variance").get<double>();
    c.schedule = s;
  }
  if (j.contains("breakdown")) {
    CostBreakdown b;
    b.volume_q = c.volume_q;
    b.total_delta = j["breakdown"].at("total_delta").get<double>();
    for (const auto& [name, d] : j["breakdown"].at("classes").items())
      b.classes[name] = {d.at("capex_delta").get<double>(), d.at("opex_delta").get<double>(),
                         d.at("capex_per_mwh").get<double>(), d.at("opex_per_mwh").get<double>()};
    c.breakdown = b;
  }
  return c;
}

ordered_json reference_to_json(const ReferenceSummary& r) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["quality"] = quality_json(r.quality);
  j["electrolyzer_mwh"] = r.profile.electrolyzer_mwh;
  j["renewable_mwh"] = r.profile.renewable_mwh;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string cell_key(double tau, double volume_q) { return tau_label(tau) + "_" + num(volume_q); }

std::string volume_label(double v) {
  if (v >= 1e6) return num(v / 1e6) + " TWh";
  if (v >= 1e3) return num(v / 1e3) + " GWh";
  return num(v) + " MWh";
}

std::string artifact_json(const RunArtifact& a) {
  ordered_json j;
  j["scenario"] = a.scenario_id;
  j["provenance"] = {{"config_hash", a.config_hash}, {"tool_version", a.tool_version}};
  j["solves"] = a.solves;
  j["taus"] = a.taus;
  j["volumes_mwh"] = a.volumes;
  j["reference"] = reference_to_json(a.reference);
  ordered_json cells = ordered_json::array();
  for (const auto& c : a.cells) cells.push_back(cell_to_json(c));
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::string reference_json(const RunArtifact& a) {
  ordered_json j = reference_to_json(a.reference);
  j["scenario"] = a.scenario_id;
  return j.dump(2) + "\n";
}

std::string cell_json(const RunArtifact& a, const CellResult& c) {
  ordered_json j = cell_to_json(c);
  j["scenario"] = a.scenario_id;
  return j.dump(2) + "\n";
}

std::string summary_csv(const RunArtifact& a) {
  std::ostringstream os;
  os << "scenario,schedule,tau,volume_mwh,status,objective_eur,additional_cost_eur,"
        "additional_cost_eur_per_mwh,take_off_price_eur_per_mwh,feed_variance,feed_max_mw,"
        "delivered_mwh,iterations,primal_residual,relative_gap,complementarity\n";
  for (const auto& c : a.cells) {
    os << a.scenario_id << ',' << tau_label(c.tau) << ',' << num(c.tau) << ',' << num(c.volume_q) << ','
       << to_string(c.status);
    if (c.status == SolveStatus::optimal) {
      os << ',' << num(c.objective) << ',' << num(c.additional_cost) << ',' << num(c.additional_cost_per_mwh)
         << ',' << (c.price ? num(c.price->take_off_price) : "") << ','
         << (c.schedule ? num(c.schedule->variance) : "") << ',' << (c.schedule ? num(c.schedule->max) : "")
         << ',' << (c.schedule ? num(c.schedule->delivered_mwh) : "") << ',' << c.iterations << ','
         << num(c.quality.primal_residual) << ',' << num(c.quality.relative_gap) << ','
         << num(c.quality.complementarity);
    } else {
      os << ",,,,,,,," << c.iterations << ",,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string breakdown_csv(const RunArtifact& a) {
  std::ostringstream os;
  os << "scenario,schedule,volume_mwh,class,capex_delta_eur,opex_delta_eur,capex_eur_per_mwh,opex_eur_per_mwh\n";
  for (const auto& c : a.cells) {
    if (!c.breakdown) continue;
    for (const auto& [name, d] : c.breakdown->classes)
      os << a.scenario_id << ',' << tau_label(c.tau) << ',' << num(c.volume_q) << ',' << name << ','
         << num(d.capex_delta) << ',' << num(d.opex_delta) << ',' << num(d.capex_per_mwh) << ','
         << num(d.opex_per_mwh) << '\n';
  }
  return os.str();
}

std::string price_table_csv(const RunArtifact& a) {
  std::ostringstream os;
  os << "country,delivery_schedule";
  for (double q : a.volumes) os << ",price_eur_per_mwh_" << volume_label(q);
  os << '\n';
  for (double t : a.taus) {
    os << a.scenario_id << ',' << tau_label(t);
    for (double q : a.volumes) {
      os << ',';
      for (const auto& c : a.cells)
        if (c.tau == t && c.volume_q == q && c.price) os << num(c.price->take_off_price);
    }
    os << '\n';
  }
  return os.str();
}

std::string schedule_csv(const CellResult& c) {
  std::ostringstream os;
  os << "snapshot,feed_mw,buffer_mwh,price_eur_per_mwh\n";
  if (!c.schedule) return os.str();
  const auto& s = *c.schedule;
  for (std::size_t t = 0; t < s.feed_mw.size(); ++t) {
    os << t << ',' << num(s.feed_mw[t]) << ',' << (t < s.buffer_mwh.size() ? num(s.buffer_mwh[t]) : "") << ','
       << (c.price && t < c.price->time_series_price.size() ? num(c.price->time_series_price[t]) : "") << '\n';
  }
  return os.str();
}

void write_artifact(const RunArtifact& a, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "cells");
  fs::create_directories(dir / "schedules");
  for (const char* sub : {"cells", "schedules"})
    for (const auto& entry : fs::directory_iterator(dir / sub)) fs::remove(entry.path());
  write_text(dir / "artifact.json", artifact_json(a));
  write_text(dir / "reference.json", reference_json(a));
  write_text(dir / "summary.csv", summary_csv(a));
  write_text(dir / "breakdown.csv", breakdown_csv(a));
  write_text(dir / "prices.csv", price_table_csv(a));
  for (const auto& c : a.cells) {
    const std::string key = cell_key(c.tau, c.volume_q);
    write_text(dir / "cells" / (key + ".json"), cell_json(a, c));
    if (c.schedule) write_text(dir / "schedules" / (key + ".csv"), schedule_csv(c));
  }
}

RunArtifact read_artifact(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "artifact.json" : path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + file.string() + "'");
  try {
    const ordered_json j = ordered_json::parse(in);
    RunArtifact a;
    a.scenario_id = j.at("scenario").get<std::string>();
    a.config_hash = j.at("provenance").at("config_hash").get<std::string>();
    a.tool_version = j.at("provenance").at("tool_version").get<std::string>();
    a.solves = j.at("solves").get<std::size_t>();
    a.taus = j.at("taus").get<std::vector<double>>();
    a.volumes = j.at("volumes_mwh").get<std::vector<double>>();
    const auto& r = j.at("reference");
    a.reference.status = status_from(r.at("status").get<std::string>());
    a.reference.objective = r.at("objective").get<double>();
    a.reference.iterations = r.at("iterations").get<int>();
    a.reference.quality = quality_from(r.at("quality"));
    a.reference.profile.electrolyzer_mwh = r.at("electrolyzer_mwh").get<std::array<double, 12>>();
    a.reference.profile.renewable_mwh = r.at("renewable_mwh").get<std::array<double, 12>>();
    for (const auto& c : j.at("cells")) a.cells.push_back(cell_from_json(c));
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "table") return ReportFormat::table;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string render_report(const RunArtifact& a, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return summary_csv(a);
    case ReportFormat::json: return artifact_json(a);
    case ReportFormat::table: return price_table_csv(a);
  }
  return {};
}

}  // namespace flexport
