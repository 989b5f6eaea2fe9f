#include "flexport/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flexport/solver.hpp"

namespace flexport {
namespace {

std::size_t hub_index(const AssembledLp& lp) {
  if (!lp.export_spec) throw std::invalid_argument("LP has no export spec");
  const auto hub = lp.network.find_bus(kExportHub);
  if (!hub) throw std::invalid_argument("LP has no export hub");
  return *hub;
}

std::string class_of(const std::string& tech_class, const char* fallback) {
  return tech_class.empty() ? fallback : tech_class;
}

// Annual capex and opex per component id of one solved LP.
struct ComponentCost {
  std::string tech_class;
  double capex = 0.0;
  double opex = 0.0;
};

std::map<std::string, ComponentCost> component_costs(const LpSolution& sol, const AssembledLp& lp) {
  const Network& net = lp.network;
  const VariableIndex& idx = lp.index;
  const std::size_t T = net.num_snapshots();
  const double w = net.weight();
  const auto& x = sol.primal;
  if (x.size() != idx.num_columns()) throw std::invalid_argument("solution does not match the LP");

  std::map<std::string, ComponentCost> out;
  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const Generator& gen = net.generators()[g];
    ComponentCost c{class_of(gen.tech_class, "generator")};
    for (std::size_t t = 0; t < T; ++t) c.opex += gen.marginal_cost * w * x[idx.generator_dispatch(g, t)];
    if (gen.extendable) c.capex = gen.capex_annual * x[idx.generator_capacity(g)];
    out.emplace(gen.id, c);
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    ComponentCost c{class_of(link.tech_class, "link")};
    for (std::size_t t = 0; t < T; ++t) c.opex += link.marginal_cost * w * x[idx.link_dispatch(l, t)];
    if (link.extendable) c.capex = link.capex_annual * x[idx.link_capacity(l)];
    out.emplace(link.id, c);
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s) {
    const Store& store = net.stores()[s];
    ComponentCost c{class_of(store.tech_class, "store")};
    if (store.extendable) c.capex = store.capex_annual * x[idx.store_capacity(s)];
    out.emplace(store.id, c);
  }
  return out;
}

}  // namespace

PriceReport take_off_price(const LpSolution& solution, const AssembledLp& lp) {
  const std::size_t hub = hub_index(lp);
  const TaggedDuals duals = extract_duals(solution, lp.problem.row_tags);
  const Network& net = lp.network;
  const std::size_t T = net.num_snapshots();
  const double w = net.weight();
  const ExportSpec& spec = *lp.export_spec;
  const auto it = std::find_if(net.loads().begin(), net.loads().end(),
                               [](const Load& d) { return d.id == kExportOfftake; });
  if (it == net.loads().end()) throw std::invalid_argument("LP has no export offtake");
  const Load& offtake = *it;
  if (duals.balance.size() <= hub || duals.balance[hub].size() != T)
    throw std::invalid_argument("LP has no hub balance rows");

  PriceReport report;
  report.tau = spec.tau;
  report.volume_q = spec.volume_q;
  report.time_series_price.resize(T);
  report.offtake_mwh.resize(T);
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double y = duals.balance[hub][t];
    report.time_series_price[t] = y / w;
    report.offtake_mwh[t] = offtake.profile[t] * w;
    weighted += y * offtake.profile[t];
  }
  report.take_off_price = weighted / spec.volume_q;
  return report;
}

FiniteDifferencePrice finite_difference_price(const Network& network, const FormulationOptions& options,
                                              double relative_delta, const Tolerances& tol) {
  if (!options.export_spec) throw std::invalid_argument("finite difference needs an export spec");
  if (!(relative_delta > 0.0)) throw std::invalid_argument("relative_delta must be positive");
  const AssembledLp base = assemble_lp(network, options);
  const LpSolution s0 = solve(base.problem, tol);
  ExportSpec spec = *options.export_spec;
  spec.volume_q *= 1.0 + relative_delta;
  FormulationOptions bumped = options;
  bumped.export_spec = spec;
  const AssembledLp plus = assemble_lp(network, bumped);
  const LpSolution s1 = solve(plus.problem, tol);
  if (s0.status != SolveStatus::optimal || s1.status != SolveStatus::optimal)
    throw std::runtime_error("finite difference solve not optimal");

  FiniteDifferencePrice fd;
  fd.objective = s0.objective;
  fd.objective_plus = s1.objective;
  fd.delta_q = spec.volume_q - options.export_spec->volume_q;
  fd.fd_price = (s1.objective - s0.objective) / fd.delta_q;
  fd.dual_price = take_off_price(s0, base).take_off_price;
  fd.relative_error = std::abs(fd.dual_price - fd.fd_price) / std::max(std::abs(fd.fd_price), 1e-300);
  return fd;
}

DeliverySchedule delivery_schedule(const LpSolution& solution, const AssembledLp& lp) {
  const std::size_t hub = hub_index(lp);
  const Network& net = lp.network;
  const std::size_t T = net.num_snapshots();
  if (solution.primal.size() != lp.index.num_columns())
    throw std::invalid_argument("solution does not match the LP");

  DeliverySchedule sch;
  sch.weight = net.weight();
  sch.feed_mw.assign(T, 0.0);
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    if (net.link_to(l) != hub) continue;
    for (std::size_t t = 0; t < T; ++t) sch.feed_mw[t] += solution.primal[lp.index.link_dispatch(l, t)];
  }
  if (const auto buf = net.find_store(kExportBuffer)) {
    sch.buffer_mwh.resize(T);
    for (std::size_t t = 0; t < T; ++t) sch.buffer_mwh[t] = solution.primal[lp.index.store_soc(*buf, t)];
  }
  sch.offtake_mw = lp.export_spec->volume_q / (static_cast<double>(T) * sch.weight);

  double sum = 0.0;
  for (double f : sch.feed_mw) {
    sum += f;
    sch.max = std::max(sch.max, f);
  }
  sch.mean = sum / static_cast<double>(T);
  sch.delivered_mwh = sum * sch.weight;
  double ss = 0.0;
  for (double f : sch.feed_mw) ss += (f - sch.mean) * (f - sch.mean);
  sch.variance = ss / static_cast<double>(T);
  return sch;
}

CostBreakdown cost_breakdown(const LpSolution& export_solution, const AssembledLp& export_lp,
                             const LpSolution& reference_solution, const AssembledLp& reference_lp) {
  const SnapshotSet& a = export_lp.network.snapshots();
  const SnapshotSet& b = reference_lp.network.snapshots();
  if (a.count != b.count || a.weight != b.weight || a.month != b.month)
    throw std::invalid_argument("export and reference runs use different snapshot sets");

  const auto exp = component_costs(export_solution, export_lp);
  const auto ref = component_costs(reference_solution, reference_lp);
  CostBreakdown out;
  out.volume_q = export_lp.export_spec ? export_lp.export_spec->volume_q : 0.0;
  for (const auto& [id, c] : exp) {
    ClassDelta& d = out.classes[c.tech_class];
    d.capex_delta += c.capex;
    d.opex_delta += c.opex;
  }
  for (const auto& [id, c] : ref) {
    ClassDelta& d = out.classes[c.tech_class];
    d.capex_delta -= c.capex;
    d.opex_delta -= c.opex;
  }
  for (auto& [name, d] : out.classes) {
    out.total_delta += d.capex_delta + d.opex_delta;
    if (out.volume_q > 0.0) {
      d.capex_per_mwh = d.capex_delta / out.volume_q;
      d.opex_per_mwh = d.opex_delta / out.volume_q;
    }
  }
  return out;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const VerificationCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_solution(const LpProblem& problem, const std::vector<double>& x,
                                   const std::vector<double>& y, const VerificationLimits& limits) {
  const std::size_t n = problem.num_cols();
  const std::size_t m = problem.num_rows();
  if (x.size() != n || y.size() != m) throw std::invalid_argument("solution size does not match the problem");

  std::vector<double> activity(m, 0.0);
  std::vector<double> d = problem.cost;
  for (const auto& e : problem.entries) {
    activity[e.row] += e.value * x[e.col];
    d[e.col] -= e.value * y[e.row];
  }

  VerificationReport rep;
  double primal = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal += problem.cost[j] * x[j];

  double residual = 0.0;
  double sign = 0.0;
  double dual = 0.0;
  std::vector<double> cs_products;
  cs_products.reserve(n + m);
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = activity[i] - problem.rhs[i];
    double viol = 0.0;
    switch (problem.row_sense[i]) {
      case RowSense::equal: viol = std::abs(gap); break;
      case RowSense::less_equal: viol = std::max(gap, 0.0); sign = std::max(sign, y[i]); break;
      case RowSense::greater_equal: viol = std::max(-gap, 0.0); sign = std::max(sign, -y[i]); break;
    }
    if (viol > residual) {
      residual = viol;
      rep.worst_row = i;
      rep.worst_row_kind = i < problem.row_tags.size() ? problem.row_tags[i].kind : RowKind::generic;
    }
    dual += problem.rhs[i] * y[i];
    if (problem.row_sense[i] != RowSense::equal) cs_products.push_back(std::abs(y[i] * gap));
  }

  double bound = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = problem.col_lower[j];
    const double up = problem.col_upper[j];
    bound = std::max({bound, lo - x[j], x[j] - up});
    if (d[j] > 0.0) {
      if (std::isfinite(lo)) {
        dual += lo * d[j];
        cs_products.push_back(d[j] * std::abs(x[j] - lo));
      } else {
        sign = std::max(sign, d[j]);
        dual += x[j] * d[j];
      }
    } else if (d[j] < 0.0) {
      if (std::isfinite(up)) {
        dual += up * d[j];
        cs_products.push_back(-d[j] * std::abs(up - x[j]));
      } else {
        sign = std::max(sign, -d[j]);
        dual += x[j] * d[j];
      }
    }
  }
  double cmax = 0.0;
  for (double c : problem.cost) cmax = std::max(cmax, std::abs(c));
  const double scale = 1.0 + std::abs(primal);
  double cs = 0.0;
  for (double p : cs_products) cs = std::max(cs, p);

  rep.primal_objective = primal;
  rep.dual_objective = dual;
  auto add = [&](std::string name, double value, double limit) {
    rep.checks.push_back({std::move(name), value, limit, value <= limit});
  };
  add("row_residual", residual, limits.residual);
  add("bound_violation", std::max(bound, 0.0), limits.residual);
  add("dual_sign", sign / (1.0 + cmax), limits.dual_sign);
  add("relative_gap", std::abs(primal - dual) / scale, limits.gap);
  add("complementarity", cs / scale, limits.complementarity);
  return rep;
}

VerificationReport verify_solution(const LpSolution& solution, const LpProblem& problem,
                                   const VerificationLimits& limits) {
  return verify_solution(problem, solution.primal, solution.dual, limits);
}

}  // namespace flexport
