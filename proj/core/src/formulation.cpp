#include "flexport/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace flexport {
namespace {

bool is_export_hub(const Bus& bus) { return bus.id == kExportHub; }

void append(std::vector<LpRow>& dst, std::vector<LpRow>&& src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

// Accumulates coefficients so repeated columns merge into one entry.
class RowAccumulator {
 public:
  void add(std::size_t col, double value) { terms_.emplace_back(col, value); }

  LpRow finish(RowSense sense, double rhs, RowTag tag) {
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    LpRow row{sense, rhs, tag, {}};
    for (const auto& [col, value] : terms_) {
      if (!row.coeffs.empty() && row.coeffs.back().first == col)
        row.coeffs.back().second += value;
      else
        row.coeffs.emplace_back(col, value);
    }
    std::erase_if(row.coeffs, [](const auto& c) { return c.second == 0.0; });
    terms_.clear();
    return row;
  }

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
};

// Balance rows of bus `b` across all snapshots.
void balance_rows_for(const Network& net, const VariableIndex& idx, std::size_t b,
                      std::vector<LpRow>& out) {
  const std::size_t T = net.num_snapshots();
  std::vector<std::size_t> gens, outgoing, incoming, stores, loads;
  for (std::size_t g = 0; g < net.generators().size(); ++g)
    if (net.generator_bus(g) == b) gens.push_back(g);
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    if (net.link_from(l) == b) outgoing.push_back(l);
    if (net.link_to(l) == b) incoming.push_back(l);
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s)
    if (net.store_bus(s) == b) stores.push_back(s);
  for (std::size_t d = 0; d < net.loads().size(); ++d)
    if (net.load_bus(d) == b) loads.push_back(d);

  RowAccumulator acc;
  for (std::size_t t = 0; t < T; ++t) {
    for (auto g : gens) acc.add(idx.generator_dispatch(g, t), 1.0);
    for (auto l : incoming) acc.add(idx.link_dispatch(l, t), net.links()[l].efficiency);
    for (auto l : outgoing) acc.add(idx.link_dispatch(l, t), -1.0);
    for (auto s : stores) {
      acc.add(idx.store_discharge(s, t), 1.0);
      acc.add(idx.store_charge(s, t), -1.0);
    }
    double demand = 0.0;
    for (auto d : loads) demand += net.loads()[d].profile[t];
    out.push_back(acc.finish(RowSense::equal, demand, {RowKind::balance, b, t}));
  }
}

void soc_rows_for(const Network& net, const VariableIndex& idx, std::size_t s, RowKind kind,
                  std::vector<LpRow>& out) {
  const std::size_t T = net.num_snapshots();
  const double w = net.weight();
  const Store& store = net.stores()[s];
  RowAccumulator acc;
  for (std::size_t t = 0; t < T; ++t) {
    acc.add(idx.store_soc(s, t), 1.0);
    if (t > 0)
      acc.add(idx.store_soc(s, t - 1), -1.0);
    else if (store.cyclic)
      acc.add(idx.store_soc(s, T - 1), -1.0);
    acc.add(idx.store_charge(s, t), -w);
    acc.add(idx.store_discharge(s, t), w);
    out.push_back(acc.finish(RowSense::equal, 0.0, {kind, s, t}));
  }
}

}  // namespace

std::size_t VariableIndex::block(ColumnKind kind, std::size_t component, std::size_t count) {
  const std::size_t first = lower_.size();
  for (std::size_t t = 0; t < count; ++t) {
    lower_.push_back(0.0);
    upper_.push_back(kInf);
    tags_.push_back({kind, component, t});
  }
  return first;
}

std::size_t VariableIndex::single(ColumnKind kind, std::size_t component, double upper) {
  lower_.push_back(0.0);
  upper_.push_back(upper);
  tags_.push_back({kind, component, 0});
  return lower_.size() - 1;
}

VariableIndex build_variables(const Network& net) {
  VariableIndex idx;
  const std::size_t T = net.num_snapshots();
  idx.num_snapshots_ = T;

  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const Generator& gen = net.generators()[g];
    const std::size_t first = idx.block(ColumnKind::generator_dispatch, g, T);
    idx.gen_dispatch_.push_back(first);
    if (!gen.extendable)
      for (std::size_t t = 0; t < T; ++t) idx.upper_[first + t] = gen.availability[t] * gen.p_existing;
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    const std::size_t first = idx.block(ColumnKind::link_dispatch, l, T);
    idx.link_dispatch_.push_back(first);
    if (!link.extendable)
      for (std::size_t t = 0; t < T; ++t) idx.upper_[first + t] = link.p_existing;
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s) {
    const Store& store = net.stores()[s];
    const std::size_t soc = idx.block(ColumnKind::store_soc, s, T);
    idx.store_soc_.push_back(soc);
    idx.store_charge_.push_back(idx.block(ColumnKind::store_charge, s, T));
    idx.store_discharge_.push_back(idx.block(ColumnKind::store_discharge, s, T));
    if (!store.extendable)
      for (std::size_t t = 0; t < T; ++t) idx.upper_[soc + t] = store.e_existing;
  }

  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const Generator& gen = net.generators()[g];
    idx.gen_capacity_.push_back(gen.extendable
                                    ? idx.single(ColumnKind::generator_capacity, g, gen.p_max_build)
                                    : VariableIndex::npos);
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    idx.link_capacity_.push_back(link.extendable
                                     ? idx.single(ColumnKind::link_capacity, l, link.p_max_build)
                                     : VariableIndex::npos);
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s) {
    const Store& store = net.stores()[s];
    idx.store_capacity_.push_back(store.extendable
                                      ? idx.single(ColumnKind::store_capacity, s, store.e_max_build)
                                      : VariableIndex::npos);
  }
  return idx;
}

std::vector<LpRow> nodal_balance_rows(const Network& net, const VariableIndex& idx) {
  std::vector<LpRow> rows;
  for (std::size_t b = 0; b < net.buses().size(); ++b)
    if (!is_export_hub(net.buses()[b])) balance_rows_for(net, idx, b, rows);
  return rows;
}

std::vector<LpRow> storage_dynamics_rows(const Network& net, const VariableIndex& idx) {
  std::vector<LpRow> rows;
  for (std::size_t s = 0; s < net.stores().size(); ++s)
    if (!net.stores()[s].fictional) soc_rows_for(net, idx, s, RowKind::storage, rows);
  return rows;
}

std::vector<LpRow> capacity_rows(const Network& net, const VariableIndex& idx) {
  const std::size_t T = net.num_snapshots();
  std::vector<LpRow> rows;
  RowAccumulator acc;
  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const Generator& gen = net.generators()[g];
    if (!gen.extendable) continue;
    for (std::size_t t = 0; t < T; ++t) {
      const double a = gen.availability[t];
      acc.add(idx.generator_dispatch(g, t), 1.0);
      acc.add(idx.generator_capacity(g), -a);
      rows.push_back(acc.finish(RowSense::less_equal, a * gen.p_existing, {RowKind::generator_cap, g, t}));
    }
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    if (!link.extendable) continue;
    for (std::size_t t = 0; t < T; ++t) {
      acc.add(idx.link_dispatch(l, t), 1.0);
      acc.add(idx.link_capacity(l), -1.0);
      rows.push_back(acc.finish(RowSense::less_equal, link.p_existing, {RowKind::link_cap, l, t}));
    }
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s) {
    const Store& store = net.stores()[s];
    if (!store.extendable) continue;
    for (std::size_t t = 0; t < T; ++t) {
      acc.add(idx.store_soc(s, t), 1.0);
      acc.add(idx.store_capacity(s), -1.0);
      rows.push_back(acc.finish(RowSense::less_equal, store.e_existing, {RowKind::store_cap, s, t}));
    }
  }
  return rows;
}

Network attach_export(const Network& network, const ExportSpec& spec) {
  spec.check();
  NetworkData data = network.data();
  const std::size_t T = network.num_snapshots();
  for (const auto& port : spec.ports) {
    const auto b = network.find_bus(port);
    if (!b) throw std::invalid_argument("export port '" + port + "' is not a bus");
    if (!network.buses()[*b].export_port)
      throw std::invalid_argument("bus '" + port + "' is not an export port");
  }
  if (!network.find_carrier(kHydrogen))
    throw std::invalid_argument("network has no hydrogen carrier");

  data.buses.push_back({std::string(kExportHub), std::string(kHydrogen), false});
  for (const auto& port : spec.ports) {
    Link feed;
    feed.id = std::string(kExportFeedPrefix) + port;
    feed.from_bus = port;
    feed.to_bus = std::string(kExportHub);
    feed.efficiency = 1.0;
    feed.p_existing = kInf;
    feed.tech_class = "export";
    data.links.push_back(std::move(feed));
  }
  Store buffer;
  buffer.id = std::string(kExportBuffer);
  buffer.bus = std::string(kExportHub);
  buffer.e_existing = buffer_capacity(spec);
  buffer.cyclic = true;
  buffer.fictional = true;
  buffer.tech_class = "export";
  data.stores.push_back(std::move(buffer));

  Load offtake;
  offtake.id = std::string(kExportOfftake);
  offtake.bus = std::string(kExportHub);
  offtake.profile.assign(T, spec.volume_q / (static_cast<double>(T) * network.weight()));
  offtake.sector = "export";
  data.loads.push_back(std::move(offtake));
  return Network(std::move(data));
}

std::vector<LpRow> export_buffer_rows(const Network& net, const VariableIndex& idx, const ExportSpec& spec) {
  spec.check();
  const auto hub = net.find_bus(kExportHub);
  const auto buffer = net.find_store(kExportBuffer);
  if (!hub || !buffer) throw std::invalid_argument("network has no export hub; use attach_export");
  std::vector<LpRow> rows;
  balance_rows_for(net, idx, *hub, rows);
  soc_rows_for(net, idx, *buffer, RowKind::buffer, rows);
  return rows;
}

std::vector<LpRow> temporal_matching_rows(const Network& net, const VariableIndex& idx,
                                          const ReferenceProfile& ref) {
  const double w = net.weight();
  const auto& months = net.snapshots().month;
  std::vector<std::size_t> electrolyzers, renewables;
  for (std::size_t l = 0; l < net.links().size(); ++l)
    if (net.links()[l].electrolyzer) electrolyzers.push_back(l);
  for (std::size_t g = 0; g < net.generators().size(); ++g)
    if (net.generator_carrier(g).renewable) renewables.push_back(g);

  std::vector<LpRow> rows;
  RowAccumulator acc;
  for (std::size_t m = 0; m < 12; ++m) {
    for (std::size_t t = 0; t < net.num_snapshots(); ++t) {
      if (months[t] != static_cast<int>(m + 1)) continue;
      for (auto l : electrolyzers) acc.add(idx.link_dispatch(l, t), w);
      for (auto g : renewables) acc.add(idx.generator_dispatch(g, t), -w);
    }
    rows.push_back(acc.finish(RowSense::less_equal, ref.electrolyzer_mwh[m] - ref.renewable_mwh[m],
                              {RowKind::matching, 0, m}));
  }
  return rows;
}

LpRow emission_cap_row(const Network& net, const VariableIndex& idx, double limit) {
  if (!(limit >= 0.0) || !std::isfinite(limit)) throw std::invalid_argument("emission limit must be >= 0");
  const double w = net.weight();
  RowAccumulator acc;
  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const double co2 = net.generator_carrier(g).co2_factor;
    if (co2 == 0.0) continue;
    const double per_mwh = w * co2 / net.generators()[g].efficiency;
    for (std::size_t t = 0; t < net.num_snapshots(); ++t) acc.add(idx.generator_dispatch(g, t), per_mwh);
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const double co2 = net.bus_carrier(net.link_from(l)).co2_factor;
    if (co2 == 0.0) continue;
    for (std::size_t t = 0; t < net.num_snapshots(); ++t) acc.add(idx.link_dispatch(l, t), w * co2);
  }
  return acc.finish(RowSense::less_equal, limit, {RowKind::emission, 0, 0});
}

std::vector<double> objective(const Network& net, const VariableIndex& idx) {
  std::vector<double> cost(idx.num_columns(), 0.0);
  const double w = net.weight();
  const std::size_t T = net.num_snapshots();
  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const Generator& gen = net.generators()[g];
    for (std::size_t t = 0; t < T; ++t) cost[idx.generator_dispatch(g, t)] = gen.marginal_cost * w;
    if (gen.extendable) cost[idx.generator_capacity(g)] = gen.capex_annual;
  }
  for (std::size_t l = 0; l < net.links().size(); ++l) {
    const Link& link = net.links()[l];
    for (std::size_t t = 0; t < T; ++t) cost[idx.link_dispatch(l, t)] = link.marginal_cost * w;
    if (link.extendable) cost[idx.link_capacity(l)] = link.capex_annual;
  }
  for (std::size_t s = 0; s < net.stores().size(); ++s) {
    const Store& store = net.stores()[s];
    if (store.extendable && !store.fictional) cost[idx.store_capacity(s)] = store.capex_annual;
  }
  return cost;
}

AssembledLp assemble_lp(const Network& network, const FormulationOptions& options) {
  if (options.temporal_matching && !options.reference)
    throw std::invalid_argument("temporal matching needs a reference profile");
  Network net = options.export_spec ? attach_export(network, *options.export_spec) : network;
  VariableIndex idx = build_variables(net);

  std::vector<LpRow> rows = nodal_balance_rows(net, idx);
  append(rows, storage_dynamics_rows(net, idx));
  append(rows, capacity_rows(net, idx));
  if (options.export_spec) append(rows, export_buffer_rows(net, idx, *options.export_spec));
  if (options.temporal_matching) append(rows, temporal_matching_rows(net, idx, *options.reference));
  if (options.emission_cap.enabled()) rows.push_back(emission_cap_row(net, idx, *options.emission_cap.limit));

  LpProblem lp;
  lp.name = net.data().name.empty() ? "FLEXPORT" : net.data().name;
  lp.cost = objective(net, idx);
  lp.col_lower = idx.lower();
  lp.col_upper = idx.upper();
  lp.col_tags = idx.tags();
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.coeffs.size();
  lp.entries.reserve(nnz);
  for (const auto& r : rows) {
    const std::size_t i = lp.add_row(r.sense, r.rhs, r.tag);
    for (const auto& [col, value] : r.coeffs) lp.add_entry(i, col, value);
  }
  return AssembledLp{std::move(net), std::move(idx), std::move(lp), options.export_spec};
}

std::size_t expected_row_count(const Network& network, const FormulationOptions& options) {
  std::size_t per_snapshot = network.buses().size() + network.stores().size();
  for (const auto& g : network.generators()) per_snapshot += g.extendable ? 1 : 0;
  for (const auto& l : network.links()) per_snapshot += l.extendable ? 1 : 0;
  for (const auto& s : network.stores()) per_snapshot += s.extendable ? 1 : 0;
  if (options.export_spec) per_snapshot += 2;
  return per_snapshot * network.num_snapshots() + (options.temporal_matching ? 12 : 0) +
         (options.emission_cap.enabled() ? 1 : 0);
}

ReferenceProfile reference_profile(const Network& net, const VariableIndex& idx,
                                   const std::vector<double>& primal) {
  ReferenceProfile ref;
  const double w = net.weight();
  const auto& months = net.snapshots().month;
  for (std::size_t t = 0; t < net.num_snapshots(); ++t) {
    const std::size_t m = static_cast<std::size_t>(months[t] - 1);
    for (std::size_t l = 0; l < net.links().size(); ++l)
      if (net.links()[l].electrolyzer) ref.electrolyzer_mwh[m] += w * primal[idx.link_dispatch(l, t)];
    for (std::size_t g = 0; g < net.generators().size(); ++g)
      if (net.generator_carrier(g).renewable) ref.renewable_mwh[m] += w * primal[idx.generator_dispatch(g, t)];
  }
  return ref;
}

}  // namespace flexport
