#include "flexport/runner.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <thread>

#include "flexport/kv_document.hpp"
#include "flexport/system_io.hpp"

#ifndef FLEXPORT_VERSION
#define FLEXPORT_VERSION "0.0.0"
#endif

namespace flexport {
namespace {

class Fnv1a {
 public:
  void bytes(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 1099511628211ULL;
    }
  }
  void number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    bytes(buf);
  }
  void text(std::string_view s) {
    bytes(s);
    bytes("\x1f");
  }
  void flag(bool b) { bytes(b ? "1" : "0"); }
  [[nodiscard]] std::string hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h_);
    return buf;
  }

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

const char* tool_version() { return FLEXPORT_VERSION; }

void ScenarioConfig::check() const {
  for (double q : volumes)
    if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("export volumes must be > 0");
  for (double t : taus)
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("tau values must lie in (0,1]");
  if (wacc && (!(*wacc >= 0.0) || !std::isfinite(*wacc))) throw std::invalid_argument("wacc must be >= 0");
  if (emission_cap.limit && !(*emission_cap.limit >= 0.0))
    throw std::invalid_argument("emission limit must be >= 0");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  if (!(tolerances.feasibility > 0.0) || !(tolerances.optimality > 0.0) || tolerances.max_iterations <= 0)
    throw std::invalid_argument("solver tolerances must be positive");
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const KvDocument doc = KvDocument::load(path);
  doc.reject_unknown_tables({"scenario", "solver"}, {});
  doc.root().reject_unused();
  const KvTable* sc = doc.table("scenario");
  if (!sc) throw ParseError(doc.source(), 1, 1, "missing [scenario] table");
  const std::filesystem::path base = path.parent_path();

  ScenarioConfig cfg;
  cfg.id = sc->get_string("id", "scenario");
  cfg.system_file = resolve(base, sc->get_string("system"));
  if (sc->has("timeseries")) cfg.timeseries_dir = resolve(base, sc->get_string("timeseries"));
  if (sc->has("volumes")) cfg.volumes = sc->get_numbers("volumes");
  if (sc->has("taus")) {
    for (const auto& item : sc->find("taus")->items) {
      try {
        if (item.type == KvValue::Type::string)
          cfg.taus.push_back(parse_tau(item.string));
        else if (item.type == KvValue::Type::number && item.number > 0.0 && item.number <= 1.0)
          cfg.taus.push_back(item.number);
        else
          throw std::invalid_argument("tau must be a schedule label or a number in (0,1]");
      } catch (const std::invalid_argument& e) {
        throw ParseError(doc.source(), item.line, item.column, e.what());
      }
    }
  } else {
    cfg.taus = {tau::flexible, tau::weekly, tau::daily, tau::stable};
  }
  if (sc->has("ports")) cfg.ports = sc->get_strings("ports");
  cfg.temporal_matching = sc->get_bool("temporal_matching", false);
  if (sc->has("emission_limit")) cfg.emission_cap.limit = sc->get_number("emission_limit");
  if (sc->has("wacc")) cfg.wacc = sc->get_number("wacc");
  cfg.output_dir = resolve(base, sc->get_string("output", "out"));
  const double workers = sc->get_number("workers", 1.0);
  if (!(workers >= 1.0) || workers != std::floor(workers) || workers > 256.0)
    sc->fail_at("workers", "workers must be an integer in 1..256");
  cfg.workers = static_cast<unsigned>(workers);
  sc->reject_unused();

  if (const KvTable* solver = doc.table("solver")) {
    cfg.tolerances.feasibility = solver->get_number("feasibility", cfg.tolerances.feasibility);
    cfg.tolerances.optimality = solver->get_number("optimality", cfg.tolerances.optimality);
    const double iters = solver->get_number("max_iterations", cfg.tolerances.max_iterations);
    if (!(iters >= 1.0) || iters != std::floor(iters) || iters > 1e6)
      solver->fail_at("max_iterations", "max_iterations must be a positive integer");
    cfg.tolerances.max_iterations = static_cast<int>(iters);
    solver->reject_unused();
  }
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    sc->fail(e.what());
  }
  return cfg;
}

Network load_scenario_network(const ScenarioConfig& config) {
  SystemOptions opts;
  opts.timeseries_dir = config.timeseries_dir;
  opts.wacc = config.wacc;
  return load_system(config.system_file, opts);
}

ReferenceRun run_reference(const Network& network, const EmissionCap& cap, const Tolerances& tol) {
  FormulationOptions opts;
  opts.emission_cap = cap;
  AssembledLp lp = assemble_lp(network, opts);
  LpSolution sol = solve(lp.problem, tol);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error(std::string("reference run is ") + to_string(sol.status) +
                             (sol.status == SolveStatus::infeasible
                                  ? "; check loads against capacity limits and the emission cap"
                                  : ""));
  ReferenceProfile profile = reference_profile(lp.network, lp.index, sol.primal);
  return ReferenceRun{std::move(lp), std::move(sol), profile};
}

std::vector<std::string> export_ports(const ScenarioConfig& config, const Network& network) {
  if (!config.ports.empty()) return config.ports;
  std::vector<std::string> ports;
  for (const auto& b : network.buses())
    if (b.export_port) ports.push_back(b.id);
  return ports;
}

FormulationOptions cell_options(const ScenarioConfig& config, const Network& network,
                                const ReferenceProfile& reference, double tau, double volume_q) {
  FormulationOptions opts;
  opts.export_spec = ExportSpec{export_ports(config, network), volume_q, tau};
  opts.temporal_matching = config.temporal_matching;
  if (config.temporal_matching) opts.reference = reference;
  opts.emission_cap = config.emission_cap;
  return opts;
}

double max_row_violation(const LpProblem& problem, const std::vector<double>& primal, RowKind kind) {
  std::vector<double> activity(problem.num_rows(), 0.0);
  for (const auto& e : problem.entries) activity[e.row] += e.value * primal[e.col];
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    if (problem.row_tags[i].kind != kind) continue;
    const double d = activity[i] - problem.rhs[i];
    switch (problem.row_sense[i]) {
      case RowSense::equal:
        worst = std::max(worst, std::abs(d));
        break;
      case RowSense::less_equal:
        worst = std::max(worst, d);
        break;
      case RowSense::greater_equal:
        worst = std::max(worst, -d);
        break;
    }
  }
  return worst;
}

double max_balance_residual(const LpProblem& problem, const std::vector<double>& primal) {
  return max_row_violation(problem, primal, RowKind::balance);
}

CellResult solve_cell(const ScenarioConfig& config, const Network& network, const ReferenceRun& reference,
                      double tau, double volume_q) {
  CellResult cell;
  cell.tau = tau;
  cell.volume_q = volume_q;
  try {
    const AssembledLp lp = assemble_lp(network, cell_options(config, network, reference.profile, tau, volume_q));
    const LpSolution sol = solve(lp.problem, config.tolerances);
    cell.status = sol.status;
    cell.iterations = sol.iterations;
    if (sol.status != SolveStatus::optimal) {
      cell.error = std::string("solve ended ") + to_string(sol.status);
      return cell;
    }
    cell.objective = sol.objective;
    cell.quality = sol.quality;
    cell.additional_cost = sol.objective - reference.solution.objective;
    cell.additional_cost_per_mwh = cell.additional_cost / volume_q;
    cell.max_balance_residual = max_balance_residual(lp.problem, sol.primal);
    cell.max_matching_violation = max_row_violation(lp.problem, sol.primal, RowKind::matching);
    cell.price = take_off_price(sol, lp);
    cell.schedule = delivery_schedule(sol, lp);
    cell.breakdown = cost_breakdown(sol, lp, reference.solution, reference.lp);
  } catch (const std::exception& e) {
    cell.status = SolveStatus::numerical_error;
    cell.error = e.what();
  }
  return cell;
}

RunArtifact run_matrix(const ScenarioConfig& config, const Network& network) {
  config.check();
  RunArtifact art;
  art.scenario_id = config.id;
  art.config_hash = config_hash(config, network.data());
  art.tool_version = tool_version();
  art.taus = config.taus;
  art.volumes = config.volumes;

  const ReferenceRun ref = run_reference(network, config.emission_cap, config.tolerances);
  art.solves = 1;
  art.reference = {ref.solution.status, ref.solution.objective, ref.solution.iterations, ref.solution.quality,
                   ref.profile};

  struct Job {
    double tau, q;
  };
  std::vector<Job> jobs;
  for (double t : config.taus)
    for (double q : config.volumes) jobs.push_back({t, q});
  art.cells.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++)
      art.cells[k] = solve_cell(config, network, ref, jobs[k].tau, jobs[k].q);
  };
  const unsigned n = std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  art.solves += jobs.size();
  return art;
}

RunArtifact run_matrix(const ScenarioConfig& config) {
  return run_matrix(config, load_scenario_network(config));
}

std::string config_hash(const ScenarioConfig& c, const NetworkData& n) {
  Fnv1a h;
  h.text(c.id);
  for (double v : c.volumes) h.number(v);
  h.text("taus");
  for (double v : c.taus) h.number(v);
  h.text("ports");
  for (const auto& p : c.ports) h.text(p);
  h.flag(c.temporal_matching);
  h.flag(c.emission_cap.enabled());
  h.number(c.emission_cap.limit.value_or(0.0));
  h.number(c.tolerances.feasibility);
  h.number(c.tolerances.optimality);
  h.number(c.tolerances.max_iterations);

  h.text(n.name);
  for (const auto& x : n.carriers) {
    h.text(x.name);
    h.number(x.co2_factor);
    h.flag(x.renewable);
  }
  h.number(static_cast<double>(n.snapshots.count));
  h.number(n.snapshots.weight);
  for (int m : n.snapshots.month) h.number(m);
  for (const auto& b : n.buses) {
    h.text(b.id);
    h.text(b.carrier);
    h.flag(b.export_port);
  }
  for (const auto& g : n.generators) {
    for (const auto* s : {&g.id, &g.bus, &g.carrier, &g.tech_class}) h.text(*s);
    for (double v : {g.p_existing, g.p_max_build, g.capex_annual, g.marginal_cost, g.efficiency}) h.number(v);
    h.flag(g.extendable);
    for (double v : g.availability) h.number(v);
  }
  for (const auto& l : n.links) {
    for (const auto* s : {&l.id, &l.from_bus, &l.to_bus, &l.tech_class}) h.text(*s);
    for (double v : {l.efficiency, l.p_existing, l.p_max_build, l.capex_annual, l.marginal_cost}) h.number(v);
    h.flag(l.extendable);
    h.flag(l.electrolyzer);
  }
  for (const auto& s : n.stores) {
    for (const auto* t : {&s.id, &s.bus, &s.tech_class}) h.text(*t);
    for (double v : {s.e_existing, s.e_max_build, s.capex_annual}) h.number(v);
    h.flag(s.extendable);
    h.flag(s.cyclic);
    h.flag(s.fictional);
  }
  for (const auto& d : n.loads) {
    for (const auto* t : {&d.id, &d.bus, &d.sector}) h.text(*t);
    for (double v : d.profile) h.number(v);
  }
  return h.hex();
}

}  // namespace flexport
