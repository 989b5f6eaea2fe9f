#include "flexport/cli.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "flexport/kv_document.hpp"
#include "flexport/mps.hpp"
#include "flexport/reports.hpp"
#include "flexport/runner.hpp"
#include "flexport/system_io.hpp"
#include "json.hpp"

namespace flexport {
namespace {

using nlohmann::ordered_json;

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                ordered_json extra = ordered_json::object()) {
  ordered_json j{{"error", kind}, {"message", message}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

std::pair<double, double> parse_cell(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--cell expects <tau,Q>");
  const double tau = parse_tau(text.substr(0, comma));
  const std::string q_text = text.substr(comma + 1);
  double q = 0.0;
  auto res = std::from_chars(q_text.data(), q_text.data() + q_text.size(), q);
  if (res.ec != std::errc() || res.ptr != q_text.data() + q_text.size() || !(q > 0.0))
    throw std::invalid_argument("export volume '" + q_text + "' must be a positive number");
  return {tau, q};
}

int cmd_validate(const std::string& system, const std::string& timeseries, std::ostream& out,
                 std::ostream& err) {
  SystemOptions opts;
  if (!timeseries.empty()) opts.timeseries_dir = timeseries;
  const NetworkData data = load_system_data(system, opts);
  const ValidationReport report = validate_network(data);
  if (!report.ok()) {
    ordered_json v = ordered_json::array();
    for (const auto& x : report.violations) v.push_back({{"component", x.component}, {"message", x.message}});
    emit_error(err, "validation_error", "network has " + std::to_string(report.violations.size()) + " violation(s)",
               {{"violations", v}});
    return kExitFailure;
  }
  ordered_json j{{"ok", true},
                 {"name", data.name},
                 {"snapshots", data.snapshots.count},
                 {"buses", data.buses.size()},
                 {"generators", data.generators.size()},
                 {"links", data.links.size()},
                 {"stores", data.stores.size()},
                 {"loads", data.loads.size()}};
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& output, int workers, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (!output.empty()) cfg.output_dir = output;
  if (workers > 0) cfg.workers = static_cast<unsigned>(workers);
  const RunArtifact art = run_matrix(cfg);
  write_artifact(art, cfg.output_dir);
  std::size_t failed = 0;
  for (const auto& c : art.cells) failed += c.status == SolveStatus::optimal ? 0 : 1;
  out << ordered_json{{"output", cfg.output_dir.string()}, {"solves", art.solves}, {"failed_cells", failed},
                      {"config_hash", art.config_hash}}
             .dump()
      << '\n';
  if (failed) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : art.cells)
      if (c.status != SolveStatus::optimal) cells.push_back({{"cell", cell_key(c.tau, c.volume_q)}, {"message", c.error}});
    emit_error(err, "cell_failure", std::to_string(failed) + " cell(s) failed", {{"cells", cells}});
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_report(const std::string& artifact, const std::string& format, std::ostream& out) {
  const ReportFormat fmt = parse_report_format(format);
  out << render_report(read_artifact(artifact), fmt);
  return kExitOk;
}

int cmd_lpwrite(const std::string& config_path, const std::string& cell, const std::string& path,
                std::ostream& out) {
  const auto [tau, q] = parse_cell(cell);
  const ScenarioConfig cfg = load_scenario(config_path);
  const Network net = load_scenario_network(cfg);
  ReferenceProfile profile;
  if (cfg.temporal_matching) profile = run_reference(net, cfg.emission_cap, cfg.tolerances).profile;
  const AssembledLp lp = assemble_lp(net, cell_options(cfg, net, profile, tau, q));
  write_mps(lp.problem, std::filesystem::path(path));
  out << ordered_json{{"path", path},
                      {"cell", cell_key(tau, q)},
                      {"rows", lp.problem.num_rows()},
                      {"columns", lp.problem.num_cols()},
                      {"nonzeros", lp.problem.entries.size()}}
             .dump()
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hydrogen export flexibility LP engine", "flexport"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string system, timeseries;
  auto* validate = app.add_subcommand("validate", "Load and validate a system file");
  validate->add_option("system", system, "System file")->required()->check(CLI::ExistingFile);
  validate->add_option("--timeseries", timeseries, "Directory of profile CSVs");

  std::string config, output;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Solve the reference and every tau x Q cell");
  run->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "Artifact directory (overrides the config)");
  run->add_option("--workers", workers, "Concurrent cell solves")->check(CLI::Range(1, 256));

  std::string artifact, format = "csv";
  auto* report = app.add_subcommand("report", "Print reports of a finished run");
  report->add_option("artifact", artifact, "Artifact directory or artifact.json")->required()->check(CLI::ExistingPath);
  report->add_option("--format", format, "csv, json or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  std::string lp_config, cell, path;
  auto* lpwrite = app.add_subcommand("lpwrite", "Write one cell LP as fixed-layout MPS");
  lpwrite->add_option("config", lp_config, "Scenario file")->required()->check(CLI::ExistingFile);
  lpwrite->add_option("--cell", cell, "tau,Q e.g. stable,8760")->required();
  lpwrite->add_option("path", path, "Output MPS file")->required();

  std::vector<const char*> argv{"flexport"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = nullptr;
    for (auto* s : {validate, run, report, lpwrite})
      if (s->parsed()) sub = s;
    err << (sub ? sub->help() : app.help());
    emit_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(system, timeseries, out, err);
    if (run->parsed()) return cmd_run(config, output, workers, out, err);
    if (report->parsed()) return cmd_report(artifact, format, out);
    if (lpwrite->parsed()) return cmd_lpwrite(lp_config, cell, path, out);
  } catch (const ParseError& e) {
    emit_error(err, "parse_error", e.what(), {{"line", e.line()}, {"column", e.column()}});
    return kExitFailure;
  } catch (const ValidationError& e) {
    ordered_json v = ordered_json::array();
    for (const auto& x : e.report().violations) v.push_back({{"component", x.component}, {"message", x.message}});
    emit_error(err, "validation_error", e.what(), {{"violations", v}});
    return kExitFailure;
  } catch (const std::exception& e) {
    emit_error(err, "error", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace flexport
