#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "flexport/formulation.hpp"
#include "flexport/solver.hpp"
#include "support/fixtures.hpp"
#include "support/vertex_oracle.hpp"

using namespace flexport;

namespace {

double activity(const LpRow& row, const std::vector<double>& x) {
  double ax = 0.0;
  for (const auto& [col, v] : row.coeffs) ax += v * x[col];
  return ax;
}

double coeff(const LpRow& row, std::size_t col) {
  for (const auto& [c, v] : row.coeffs)
    if (c == col) return v;
  return 0.0;
}

LpSolution solve_ok(const AssembledLp& lp) {
  const LpSolution sol = solve(lp.problem);
  EXPECT_EQ(sol.status, SolveStatus::optimal);
  return sol;
}

ExportSpec spec(double q, double tau_value) { return ExportSpec{{"h2"}, q, tau_value}; }

// Network with an electricity bus, a solar generator with the given profile,
// a gas generator and an electrolyzer feeding the export port.
NetworkData solar_gas_port(const std::vector<double>& solar, double gas_mc, double solar_capex) {
  const std::size_t T = solar.size();
  NetworkData d = fixtures::electrolysis_port(T, gas_mc);
  d.generators[0].id = "gas";
  d.generators[0].carrier = "gas";
  d.generators[0].efficiency = 0.5;
  Generator pv = fixtures::generator("pv", "el", "solar", 0.0, 0.0, T);
  pv.availability = solar;
  pv.extendable = true;
  pv.capex_annual = solar_capex;
  d.generators.push_back(pv);
  return d;
}

}  // namespace

TEST(Variables, FixedGeneratorHasOneColumnPerSnapshot) {
  const Network net(fixtures::single_bus(2, 30.0, 5.0));
  const VariableIndex idx = build_variables(net);
  EXPECT_EQ(idx.num_columns(), 2u);
  EXPECT_EQ(idx.generator_capacity(0), VariableIndex::npos);
  EXPECT_EQ(idx.upper()[idx.generator_dispatch(0, 1)], 100.0);
}

TEST(Variables, ExtendableGeneratorAddsCapacityColumn) {
  NetworkData d = fixtures::single_bus(2, 30.0, 5.0);
  d.generators[0].extendable = true;
  d.generators[0].p_max_build = 50.0;
  const VariableIndex idx = build_variables(Network(d));
  EXPECT_EQ(idx.num_columns(), 3u);
  EXPECT_EQ(idx.upper()[idx.generator_capacity(0)], 50.0);
  EXPECT_EQ(idx.upper()[idx.generator_dispatch(0, 0)], kInf);
}

TEST(Variables, ExtendableStoreHasThreeBlocksAndCapacity) {
  NetworkData d = fixtures::empty_system(3);
  d.buses = {{"el", "electricity", false}};
  Store s;
  s.id = "battery";
  s.bus = "el";
  s.extendable = true;
  d.stores = {s};
  const VariableIndex idx = build_variables(Network(d));
  EXPECT_EQ(idx.num_columns(), 10u);
  EXPECT_EQ(idx.tags()[idx.store_capacity(0)].kind, ColumnKind::store_capacity);
  EXPECT_EQ(idx.tags()[idx.store_discharge(0, 2)], (ColumnTag{ColumnKind::store_discharge, 0, 2}));
}

TEST(Variables, AvailabilityScalesFixedBound) {
  NetworkData d = fixtures::single_bus(2, 30.0, 5.0);
  d.generators[0].availability = {0.25, 0.0};
  const VariableIndex idx = build_variables(Network(d));
  EXPECT_EQ(idx.upper()[0], 25.0);
  EXPECT_EQ(idx.upper()[1], 0.0);
}

TEST(Balance, GeneratorMeetsLoad) {
  const Network net(fixtures::single_bus(1, 30.0, 5.0));
  const auto rows = nodal_balance_rows(net, build_variables(net));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].sense, RowSense::equal);
  EXPECT_EQ(rows[0].rhs, 5.0);
  EXPECT_EQ(coeff(rows[0], 0), 1.0);
  EXPECT_EQ(rows[0].tag, (RowTag{RowKind::balance, 0, 0}));
}

TEST(Balance, ElectrolyzerEntersBothBuses) {
  const Network net(fixtures::electrolysis_port(1, 30.0));
  const VariableIndex idx = build_variables(net);
  const auto rows = nodal_balance_rows(net, idx);
  ASSERT_EQ(rows.size(), 2u);
  const std::size_t x = idx.link_dispatch(0, 0);
  EXPECT_EQ(coeff(rows[0], x), -1.0);
  EXPECT_EQ(coeff(rows[1], x), 0.68);
}

TEST(Balance, LosslessTwoBusCaseMatchesOracle) {
  NetworkData d = fixtures::empty_system(2);
  d.buses = {{"a", "electricity", false}, {"b", "electricity", false}};
  d.generators = {fixtures::generator("cheap", "a", "electricity", 5.0, 10.0, 2),
                  fixtures::generator("dear", "b", "electricity", 100.0, 50.0, 2)};
  d.links = {fixtures::link("line", "a", "b", 1.0, 4.0)};
  d.loads = {fixtures::load("demand", "b", {8.0, 3.0})};
  const AssembledLp lp = assemble_lp(Network(d), {});
  ASSERT_LE(lp.problem.num_cols(), 8u);
  const auto ref = oracle::solve(lp.problem);
  ASSERT_TRUE(ref.has_value());
  const LpSolution sol = solve_ok(lp);
  EXPECT_NEAR(sol.objective, ref->objective, 1e-6);
  EXPECT_NEAR(sol.objective, 4 * 10 + 4 * 50 + 3 * 10, 1e-6);
  // balance dual at b: dear plant at t0, line-limited cheap plant at t1
  EXPECT_NEAR(sol.dual[2], 50.0, 1e-6);
  EXPECT_NEAR(sol.dual[3], 10.0, 1e-6);
}

TEST(Storage, ChargingOneMegawattForThreeHours) {
  NetworkData d = fixtures::empty_system(1, 3.0);
  d.buses = {{"el", "electricity", false}};
  Store s;
  s.id = "battery";
  s.bus = "el";
  s.e_existing = 10.0;
  s.cyclic = false;
  d.stores = {s};
  const Network net(d);
  const VariableIndex idx = build_variables(net);
  const auto rows = storage_dynamics_rows(net, idx);
  ASSERT_EQ(rows.size(), 1u);
  std::vector<double> x(idx.num_columns(), 0.0);
  x[idx.store_charge(0, 0)] = 1.0;
  x[idx.store_soc(0, 0)] = 3.0;
  EXPECT_DOUBLE_EQ(activity(rows[0], x), rows[0].rhs);
  x[idx.store_soc(0, 0)] = 2.0;
  EXPECT_NE(activity(rows[0], x), rows[0].rhs);
}

TEST(Storage, CyclicStoreWrapsAround) {
  NetworkData d = fixtures::empty_system(3);
  d.buses = {{"el", "electricity", false}};
  Store s;
  s.id = "battery";
  s.bus = "el";
  s.e_existing = 10.0;
  d.stores = {s};
  const Network net(d);
  const VariableIndex idx = build_variables(net);
  const auto rows = storage_dynamics_rows(net, idx);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(coeff(rows[0], idx.store_soc(0, 2)), -1.0);
  EXPECT_EQ(coeff(rows[1], idx.store_soc(0, 0)), -1.0);

  d.stores[0].cyclic = false;
  const Network open(d);
  const auto open_rows = storage_dynamics_rows(open, build_variables(open));
  EXPECT_EQ(coeff(open_rows[0], idx.store_soc(0, 2)), 0.0);
}

TEST(Storage, CyclicSolutionReturnsToStart) {
  NetworkData d = fixtures::single_bus(4, 0.0, 0.0);
  d.generators[0].marginal_cost = 0.0;
  d.generators = {fixtures::generator("gen", "el", "electricity", 10.0, 5.0, 4)};
  d.generators[0].availability = {1.0, 0.0, 1.0, 0.0};
  d.loads[0].profile = {2.0, 6.0, 2.0, 6.0};
  Store s;
  s.id = "battery";
  s.bus = "el";
  s.e_existing = 8.0;
  d.stores = {s};
  const AssembledLp lp = assemble_lp(Network(d), {});
  const LpSolution sol = solve_ok(lp);
  double net_charge = 0.0;
  for (std::size_t t = 0; t < 4; ++t)
    net_charge += sol.primal[lp.index.store_charge(0, t)] - sol.primal[lp.index.store_discharge(0, t)];
  EXPECT_NEAR(net_charge, 0.0, 1e-7);
  EXPECT_NEAR(sol.objective, 5.0 * 16.0, 1e-6);
}

TEST(Storage, ThreeSnapshotArbitrageMatchesOracle) {
  NetworkData d = fixtures::empty_system(3);
  d.buses = {{"el", "electricity", false}};
  Generator g = fixtures::generator("gen", "el", "electricity", 10.0, 20.0, 3);
  d.generators = {g};
  d.loads = {fixtures::load("demand", "el", {1.0, 4.0, 7.0})};
  Store s;
  s.id = "battery";
  s.bus = "el";
  s.e_existing = 3.0;
  d.stores = {s};
  // price rises over the day so the store carries cheap energy forward
  d.generators[0].marginal_cost = 0.0;
  Generator peak = fixtures::generator("peak", "el", "electricity", 10.0, 80.0, 3);
  d.generators[0].availability = {1.0, 0.5, 0.2};
  d.generators.push_back(peak);
  const AssembledLp lp = assemble_lp(Network(d), {});
  const LpSolution sol = solve_ok(lp);
  // hand oracle: charge 3 MWh of surplus at t0, discharge at t2, peak covers 2 MWh
  EXPECT_NEAR(sol.objective, 2.0 * 80.0, 1e-6);
  EXPECT_NEAR(sol.primal[lp.index.store_discharge(0, 2)], 3.0, 1e-6);
  // without the store the peak plant covers 5 MWh in the last snapshot
  EXPECT_LT(sol.objective, 5.0 * 80.0);
}

TEST(Export, HubGetsBufferAndConstantOfftake) {
  const Network base(fixtures::electrolysis_port(4, 30.0));
  const Network net = attach_export(base, spec(400.0, tau::weekly));
  ASSERT_TRUE(net.find_bus(kExportHub));
  ASSERT_TRUE(net.find_link("export_feed:h2"));
  const auto buffer = net.find_store(kExportBuffer);
  ASSERT_TRUE(buffer);
  EXPECT_DOUBLE_EQ(net.stores()[*buffer].e_existing, 400.0 / 52.0);
  EXPECT_TRUE(net.stores()[*buffer].fictional);
  EXPECT_EQ(net.loads().back().profile, std::vector<double>(4, 100.0));
  EXPECT_THROW((void)attach_export(base, ExportSpec{{"el"}, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW((void)attach_export(base, ExportSpec{{"nowhere"}, 1.0, 1.0}), std::invalid_argument);
}

TEST(Export, FullFlexibilityAcceptsAllInOneDelivery) {
  const Network base(fixtures::electrolysis_port(4, 30.0));
  AssembledLp lp = assemble_lp(base, {spec(400.0, tau::flexible), false, std::nullopt, {}});
  const std::size_t feed = *lp.network.find_link("export_feed:h2");
  for (std::size_t t = 0; t < 4; ++t) {
    const double v = t == 0 ? 400.0 : 0.0;
    lp.problem.col_lower[lp.index.link_dispatch(feed, t)] = v;
    lp.problem.col_upper[lp.index.link_dispatch(feed, t)] = v;
  }
  const LpSolution sol = solve_ok(lp);
  EXPECT_NEAR(sol.objective, 30.0 * 400.0 / 0.68, 1e-4);
}

TEST(Export, StableScheduleStaysInOneHourBand) {
  // horizon of T snapshots with tau = 1/T: the buffer holds one hour of offtake
  const std::size_t T = 48;
  const Network base(fixtures::electrolysis_port(T, 30.0));
  const double q = static_cast<double>(T);
  auto with_first_feed = [&](double v) {
    AssembledLp lp = assemble_lp(base, {spec(q, 1.0 / q), false, std::nullopt, {}});
    const std::size_t col = lp.index.link_dispatch(*lp.network.find_link("export_feed:h2"), 0);
    lp.problem.col_lower[col] = v;
    lp.problem.col_upper[col] = v;
    return solve(lp.problem).status;
  };
  EXPECT_EQ(with_first_feed(1.0), SolveStatus::optimal);
  EXPECT_EQ(with_first_feed(2.0), SolveStatus::optimal);
  EXPECT_EQ(with_first_feed(0.0), SolveStatus::optimal);
  EXPECT_EQ(with_first_feed(2.5), SolveStatus::infeasible);
}

TEST(Matching, ZeroReferenceNeedsRenewableCover) {
  NetworkData d = solar_gas_port(std::vector<double>(12, 1.0), 1.0, 0.0);
  fixtures::monthly(d);
  const Network net(d);
  const VariableIndex idx = build_variables(net);
  const auto rows = temporal_matching_rows(net, idx, ReferenceProfile{});
  ASSERT_EQ(rows.size(), 12u);
  std::vector<double> x(idx.num_columns(), 0.0);
  x[idx.link_dispatch(0, 0)] = 100.0;
  x[idx.generator_dispatch(1, 0)] = 99.0;
  EXPECT_GT(activity(rows[0], x), rows[0].rhs);
  x[idx.generator_dispatch(1, 0)] = 100.0;
  EXPECT_LE(activity(rows[0], x), rows[0].rhs);
  EXPECT_EQ(rows[0].tag, (RowTag{RowKind::matching, 0, 0}));
  EXPECT_EQ(rows[11].tag.period, 11u);
}

TEST(Matching, ReferenceDispatchHasZeroSlack) {
  std::vector<double> solar(12);
  for (int m = 0; m < 12; ++m) solar[m] = 0.2 + 0.05 * m;
  NetworkData d = solar_gas_port(solar, 40.0, 0.0);
  d.generators[1].extendable = false;
  d.generators[1].p_existing = 30.0;
  d.loads = {fixtures::load("h2_demand", "h2", std::vector<double>(12, 10.0)),
             fixtures::load("demand", "el", std::vector<double>(12, 5.0))};
  fixtures::monthly(d);
  const Network net(d);
  const AssembledLp ref = assemble_lp(net, {});
  const LpSolution sol = solve_ok(ref);
  const ReferenceProfile profile = reference_profile(ref.network, ref.index, sol.primal);
  EXPECT_GT(profile.electrolyzer_mwh[0], 0.0);
  const auto rows = temporal_matching_rows(ref.network, ref.index, profile);
  for (const auto& row : rows) EXPECT_NEAR(activity(row, sol.primal), row.rhs, 1e-9);
}

TEST(Matching, PolicyRaisesCostWithCheapFossil) {
  std::vector<double> solar(12);
  for (int m = 0; m < 12; ++m) solar[m] = 0.1 + 0.07 * m;
  NetworkData d = solar_gas_port(solar, 5.0, 2000.0);
  fixtures::monthly(d);
  const Network net(d);
  const AssembledLp ref = assemble_lp(net, {});
  const LpSolution ref_sol = solve_ok(ref);
  const ReferenceProfile profile = reference_profile(ref.network, ref.index, ref_sol.primal);

  const AssembledLp off = assemble_lp(net, {spec(1200.0, tau::flexible), false, profile, {}});
  const AssembledLp on = assemble_lp(net, {spec(1200.0, tau::flexible), true, profile, {}});
  EXPECT_EQ(on.problem.num_rows(), off.problem.num_rows() + 12);
  const LpSolution a = solve_ok(off);
  const LpSolution b = solve_ok(on);
  EXPECT_GT(b.objective, a.objective + 1.0);
  for (std::size_t i = 0; i < on.problem.num_rows(); ++i) {
    if (on.problem.row_tags[i].kind != RowKind::matching) continue;
    double ax = 0.0;
    for (const auto& e : on.problem.entries)
      if (e.row == i) ax += e.value * b.primal[e.col];
    EXPECT_LE(ax, on.problem.rhs[i] + 1e-6);
  }
  EXPECT_THROW((void)assemble_lp(net, {std::nullopt, true, std::nullopt, {}}), std::invalid_argument);
}

TEST(Emission, AllRenewableEmitsNothing) {
  NetworkData d = fixtures::single_bus(2, 0.0, 5.0);
  d.generators[0].carrier = "solar";
  const Network net(d);
  const VariableIndex idx = build_variables(net);
  const LpRow row = emission_cap_row(net, idx, 0.0);
  EXPECT_TRUE(row.coeffs.empty());
  EXPECT_LE(activity(row, std::vector<double>(idx.num_columns(), 5.0)), row.rhs);
}

TEST(Emission, FuelInputScalesWithInverseEfficiency) {
  NetworkData d = fixtures::single_bus(1, 0.0, 1.0);
  d.generators[0].carrier = "gas";
  d.generators[0].efficiency = 0.4;
  const Network net(d);
  const VariableIndex idx = build_variables(net);
  const LpRow row = emission_cap_row(net, idx, 100.0);
  EXPECT_DOUBLE_EQ(activity(row, {1.0}), 2.5 * 0.2);
  EXPECT_EQ(row.sense, RowSense::less_equal);
  EXPECT_THROW((void)emission_cap_row(net, idx, -1.0), std::invalid_argument);
}

TEST(Emission, BindingCapHasNonzeroDual) {
  NetworkData d = fixtures::single_bus(2, 10.0, 5.0);
  d.generators[0].carrier = "gas";
  d.generators.push_back(fixtures::generator("clean", "el", "solar", 100.0, 50.0, 2));
  const Network net(d);
  const AssembledLp loose = assemble_lp(net, {std::nullopt, false, std::nullopt, EmissionCap{100.0}});
  const AssembledLp tight = assemble_lp(net, {std::nullopt, false, std::nullopt, EmissionCap{1.0}});
  const LpSolution a = solve_ok(loose);
  const LpSolution b = solve_ok(tight);
  EXPECT_NEAR(a.dual.back(), 0.0, 1e-7);
  EXPECT_LT(b.dual.back(), -1e-3);
  // one tonne less gas output replaces 5 MWh at 40 EUR/MWh more
  EXPECT_NEAR(b.dual.back(), -40.0 / 0.2, 1e-5);
}

TEST(Objective, MarginalCostTimesEnergy) {
  const AssembledLp lp = assemble_lp(Network(fixtures::single_bus(1, 30.0, 10.0)), {});
  EXPECT_EQ(lp.problem.cost, std::vector<double>{30.0});
  EXPECT_NEAR(solve_ok(lp).objective, 300.0, 1e-6);
}

TEST(Objective, WeightScalesDispatchCost) {
  const AssembledLp lp = assemble_lp(Network(fixtures::single_bus(2, 30.0, 10.0, 3.0)), {});
  EXPECT_EQ(lp.problem.cost, (std::vector<double>{90.0, 90.0}));
}

TEST(Objective, CapexOnBuiltCapacity) {
  NetworkData d = fixtures::single_bus(2, 30.0, 5.0);
  d.generators[0].extendable = true;
  d.generators[0].p_existing = 2.0;
  d.generators[0].capex_annual = 1000.0;
  const AssembledLp lp = assemble_lp(Network(d), {});
  const LpSolution sol = solve_ok(lp);
  EXPECT_NEAR(sol.primal[lp.index.generator_capacity(0)], 3.0, 1e-6);
  EXPECT_NEAR(sol.objective, 1000.0 * 3.0 + 30.0 * 10.0, 1e-5);
}

TEST(Objective, ElectrolysisOnlyClosedForm) {
  const Network net(fixtures::electrolysis_port(6, 30.0));
  for (double tau_value : {tau::flexible, 0.5, 1.0 / 6.0}) {
    const AssembledLp lp = assemble_lp(net, {spec(600.0, tau_value), false, std::nullopt, {}});
    EXPECT_NEAR(solve_ok(lp).objective, 30.0 * 600.0 / 0.68, 1e-5) << tau_value;
  }
}

TEST(Rows, SingleBusHasOneRowPerSnapshot) {
  const Network net(fixtures::single_bus(2, 30.0, 5.0));
  const AssembledLp lp = assemble_lp(net, {});
  EXPECT_EQ(lp.problem.num_rows(), 2u);
  EXPECT_EQ(expected_row_count(net, {}), 2u);
}

TEST(Rows, ExportAddsHubAndBufferRows) {
  const std::size_t T = 5;
  const Network net(fixtures::electrolysis_port(T, 30.0));
  const FormulationOptions opt{spec(100.0, tau::weekly), false, std::nullopt, {}};
  const AssembledLp plain = assemble_lp(net, {});
  const AssembledLp lp = assemble_lp(net, opt);
  EXPECT_EQ(lp.problem.num_rows(), plain.problem.num_rows() + 2 * T);
  EXPECT_EQ(lp.problem.num_rows(), expected_row_count(net, opt));
}

TEST(Rows, CountFormulaOnMixedSystem) {
  std::vector<double> solar(12, 0.5);
  NetworkData d = solar_gas_port(solar, 20.0, 500.0);
  d.links[0].extendable = true;
  d.links[0].p_existing = 0.0;
  d.links[0].capex_annual = 100.0;
  Store s;
  s.id = "tank";
  s.bus = "h2";
  s.extendable = true;
  s.capex_annual = 10.0;
  d.stores = {s};
  fixtures::monthly(d);
  const Network net(d);
  const AssembledLp ref = assemble_lp(net, {});
  const ReferenceProfile profile = reference_profile(ref.network, ref.index, solve_ok(ref).primal);
  const FormulationOptions opt{spec(100.0, tau::daily), true, profile, EmissionCap{1e6}};
  const AssembledLp lp = assemble_lp(net, opt);
  EXPECT_EQ(lp.problem.num_rows(), expected_row_count(net, opt));
  // buses 2+1, stores 1+1, extendable pv, electrolyzer, tank
  EXPECT_EQ(lp.problem.num_rows(), (3u + 2u + 3u) * 12u + 12u + 1u);
  EXPECT_NO_THROW(lp.problem.check());
}

TEST(Reference, NoElectrolyzerGivesZeroProfile) {
  const AssembledLp lp = assemble_lp(Network(fixtures::single_bus(3, 30.0, 5.0)), {});
  const ReferenceProfile p = reference_profile(lp.network, lp.index, solve_ok(lp).primal);
  for (double v : p.electrolyzer_mwh) EXPECT_EQ(v, 0.0);
}

TEST(Reference, AllRenewableProfileEqualsGeneration) {
  NetworkData d = fixtures::single_bus(12, 0.0, 5.0, 2.0);
  d.generators[0].carrier = "solar";
  for (int m = 0; m < 12; ++m) d.loads[0].profile[m] = 1.0 + m;
  fixtures::monthly(d);
  const AssembledLp lp = assemble_lp(Network(d), {});
  const LpSolution sol = solve_ok(lp);
  const ReferenceProfile p = reference_profile(lp.network, lp.index, sol.primal);
  for (int m = 0; m < 12; ++m) EXPECT_NEAR(p.renewable_mwh[m], 2.0 * (1.0 + m), 1e-7);
}
