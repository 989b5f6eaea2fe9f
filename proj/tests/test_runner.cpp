#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flexport/kv_document.hpp"
#include "flexport/reports.hpp"
#include "flexport/runner.hpp"
#include "support/mini_system.hpp"

using namespace flexport;
namespace fs = std::filesystem;

namespace {

const fs::path kDemo = fs::path(FLEXPORT_SOURCE_DIR) / "data" / "demo";

class MiniRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "flexport_runner_mini";
    fs::remove_all(dir_);
    mini::write_inputs(dir_);
    config_ = new ScenarioConfig(load_scenario(dir_ / "scenario.toml"));
    network_ = new Network(load_scenario_network(*config_));
    artifact_ = new RunArtifact(run_matrix(*config_, *network_));
  }
  static void TearDownTestSuite() {
    delete artifact_;
    delete network_;
    delete config_;
    fs::remove_all(dir_);
  }

  static const CellResult& cell(double tau, double q) {
    for (const auto& c : artifact_->cells)
      if (c.tau == tau && c.volume_q == q) return c;
    throw std::out_of_range("no cell");
  }

  static inline fs::path dir_;
  static inline ScenarioConfig* config_ = nullptr;
  static inline Network* network_ = nullptr;
  static inline RunArtifact* artifact_ = nullptr;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, DemoConfigResolvesPaths) {
  const ScenarioConfig c = load_scenario(kDemo / "scenario.toml");
  EXPECT_EQ(c.id, "desk");
  EXPECT_EQ(c.volumes, (std::vector<double>{1e6, 4e6, 16e6}));
  EXPECT_EQ(c.taus, (std::vector<double>{tau::flexible, tau::weekly, tau::daily, tau::stable}));
  EXPECT_TRUE(c.temporal_matching);
  EXPECT_EQ(c.emission_cap.limit, 800000.0);
  EXPECT_EQ(c.system_file, kDemo / "system.toml");
  EXPECT_EQ(c.tolerances.max_iterations, 300);
}

TEST(Scenario, BadValuesNameTheKey) {
  const auto dir = fs::temp_directory_path() / "flexport_bad_scenario";
  fs::create_directories(dir);
  std::ofstream(dir / "s.toml") << "[scenario]\nsystem = \"x.toml\"\nworkers = 0\n";
  try {
    (void)load_scenario(dir / "s.toml");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::ofstream(dir / "s.toml") << "[scenario]\nsystem = \"x.toml\"\ntaus = [\"hourly\"]\n";
  EXPECT_THROW((void)load_scenario(dir / "s.toml"), ParseError);
  std::ofstream(dir / "s.toml") << "[scenario]\nsystem = \"x.toml\"\nvolumes = [-1]\n";
  EXPECT_THROW((void)load_scenario(dir / "s.toml"), ParseError);
  fs::remove_all(dir);
}

TEST(Scenario, DemoRowCountMatchesFormula) {
  const ScenarioConfig c = load_scenario(kDemo / "scenario.toml");
  const Network net = load_scenario_network(c);
  const FormulationOptions opt = cell_options(c, net, ReferenceProfile{}, tau::weekly, 4e6);
  const AssembledLp lp = assemble_lp(net, opt);
  EXPECT_EQ(lp.problem.num_rows(), expected_row_count(net, opt));
  // 5 buses + hub, 2 stores + buffer, 3 generators, 6 links and 2 stores extendable
  EXPECT_EQ(lp.problem.num_rows(), (6u + 3u + 3u + 6u + 2u) * 2920u + 12u + 1u);
}

TEST(Scenario, DemoReferenceProfileMatchesAggregation) {
  const ScenarioConfig c = load_scenario(kDemo / "scenario.toml");
  const Network net = load_scenario_network(c);
  const ReferenceRun ref = run_reference(net, c.emission_cap, c.tolerances);
  std::array<double, 12> el{}, res{};
  const auto& tags = ref.lp.problem.col_tags;
  for (std::size_t j = 0; j < tags.size(); ++j) {
    const auto m = static_cast<std::size_t>(net.snapshots().month[tags[j].period] - 1);
    if (tags[j].kind == ColumnKind::link_dispatch && net.links()[tags[j].component].electrolyzer)
      el[m] += net.weight() * ref.solution.primal[j];
    if (tags[j].kind == ColumnKind::generator_dispatch && net.generator_carrier(tags[j].component).renewable)
      res[m] += net.weight() * ref.solution.primal[j];
  }
  for (std::size_t m = 0; m < 12; ++m) {
    EXPECT_NEAR(ref.profile.electrolyzer_mwh[m], el[m], 1e-6 * (1.0 + el[m]));
    EXPECT_NEAR(ref.profile.renewable_mwh[m], res[m], 1e-6 * (1.0 + res[m]));
    EXPECT_GT(res[m], 0.0);
  }
}

TEST_F(MiniRun, ThirteenSolves) {
  EXPECT_EQ(artifact_->solves, 13u);
  ASSERT_EQ(artifact_->cells.size(), 12u);
  EXPECT_EQ(artifact_->reference.status, SolveStatus::optimal);
  for (const auto& c : artifact_->cells) {
    EXPECT_EQ(c.status, SolveStatus::optimal) << cell_key(c.tau, c.volume_q) << ' ' << c.error;
    EXPECT_LE(c.quality.relative_gap, 1e-6);
    EXPECT_LE(c.quality.complementarity, 1e-7);
    EXPECT_LE(c.max_balance_residual, 1e-6);
    EXPECT_LE(c.max_matching_violation, 1e-6);
  }
  EXPECT_EQ(artifact_->cells.front().tau, tau::flexible);
  EXPECT_EQ(artifact_->cells[1].volume_q, 400000.0);
}

TEST_F(MiniRun, CostPerMwhFallsWithFlexibility) {
  for (double q : config_->volumes) {
    double prev = -1e300;
    for (double t : {tau::flexible, tau::weekly, tau::daily, tau::stable}) {
      const double v = cell(t, q).additional_cost_per_mwh;
      EXPECT_GE(v, prev - 1e-6 * std::abs(v)) << tau_label(t) << ' ' << q;
      prev = v;
    }
  }
}

TEST_F(MiniRun, BreakdownSumsToAdditionalCost) {
  for (const auto& c : artifact_->cells) {
    ASSERT_TRUE(c.breakdown);
    EXPECT_NEAR(c.breakdown->total_delta, c.additional_cost, 1e-6 * std::abs(c.additional_cost));
  }
}

TEST_F(MiniRun, RerunIsBitIdentical) {
  const RunArtifact again = run_matrix(*config_, *network_);
  EXPECT_EQ(artifact_json(again), artifact_json(*artifact_));
  for (std::size_t k = 0; k < again.cells.size(); ++k)
    EXPECT_EQ(schedule_csv(again.cells[k]), schedule_csv(artifact_->cells[k]));
}

TEST_F(MiniRun, CellsIndependentOfOrderAndWorkers) {
  ScenarioConfig shuffled = *config_;
  std::reverse(shuffled.taus.begin(), shuffled.taus.end());
  std::reverse(shuffled.volumes.begin(), shuffled.volumes.end());
  shuffled.workers = 3;
  const RunArtifact other = run_matrix(shuffled, *network_);
  ASSERT_EQ(other.cells.size(), artifact_->cells.size());
  for (const auto& c : other.cells) {
    const CellResult& base = cell(c.tau, c.volume_q);
    EXPECT_EQ(c.objective, base.objective);
    EXPECT_EQ(c.iterations, base.iterations);
    EXPECT_EQ(schedule_csv(c), schedule_csv(base));
  }
}

TEST_F(MiniRun, ReferenceIsolation) {
  const ReferenceRun ref = run_reference(*network_, config_->emission_cap, config_->tolerances);
  FormulationOptions opt = cell_options(*config_, *network_, ref.profile, tau::daily, 1e5);
  opt.export_spec.reset();
  opt.temporal_matching = false;
  const LpSolution sol = solve(assemble_lp(*network_, opt).problem, config_->tolerances);
  EXPECT_EQ(sol.objective, artifact_->reference.objective);
  EXPECT_EQ(ref.solution.objective, artifact_->reference.objective);
}

TEST_F(MiniRun, ArtifactRoundTripsThroughDisk) {
  const fs::path out = dir_ / "artifact";
  write_artifact(*artifact_, out);
  EXPECT_TRUE(fs::exists(out / "cells" / "stable_1600000.json"));
  EXPECT_TRUE(fs::exists(out / "schedules" / "weekly_100000.csv"));
  const RunArtifact back = read_artifact(out);
  EXPECT_EQ(back.solves, 13u);
  EXPECT_EQ(back.config_hash, artifact_->config_hash);
  ASSERT_EQ(back.cells.size(), 12u);
  EXPECT_EQ(back.cells[5].objective, artifact_->cells[5].objective);
  EXPECT_EQ(summary_csv(back), summary_csv(*artifact_));

  const std::string first = read_text(out / "artifact.json");
  write_artifact(*artifact_, out);
  EXPECT_EQ(read_text(out / "artifact.json"), first);
}

TEST_F(MiniRun, PriceTableLayout) {
  const std::string table = price_table_csv(*artifact_);
  std::istringstream in(table);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0],
            "country,delivery_schedule,price_eur_per_mwh_100 GWh,price_eur_per_mwh_400 GWh,"
            "price_eur_per_mwh_1.6 TWh");
  EXPECT_EQ(lines[1].rfind("mini,flexible,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("mini,stable,", 0), 0u);
  EXPECT_EQ(std::count(lines[2].begin(), lines[2].end(), ','), 4);
  EXPECT_EQ(render_report(*artifact_, ReportFormat::table), table);
}

TEST_F(MiniRun, ConfigHashTracksInputs) {
  ScenarioConfig other = *config_;
  EXPECT_EQ(config_hash(other, network_->data()), artifact_->config_hash);
  other.volumes.push_back(1.0);
  EXPECT_NE(config_hash(other, network_->data()), artifact_->config_hash);
}

TEST(Reports, KeysAndLabels) {
  EXPECT_EQ(cell_key(tau::stable, 8760.0), "stable_8760");
  EXPECT_EQ(cell_key(0.5, 1e6), "0.5_1000000");
  EXPECT_EQ(volume_label(1e7), "10 TWh");
  EXPECT_EQ(volume_label(5e5), "500 GWh");
  EXPECT_EQ(volume_label(8760.0), "8.76 GWh");
  EXPECT_EQ(volume_label(876.0), "876 MWh");
  EXPECT_EQ(parse_report_format("table"), ReportFormat::table);
  EXPECT_THROW((void)parse_report_format("xml"), std::invalid_argument);
}

TEST(Reports, FailedCellKeepsStatus) {
  RunArtifact a;
  a.scenario_id = "x";
  a.taus = {1.0};
  a.volumes = {10.0};
  CellResult c;
  c.tau = 1.0;
  c.volume_q = 10.0;
  c.status = SolveStatus::infeasible;
  c.error = "solve ended infeasible";
  a.cells = {c};
  const std::string csv = summary_csv(a);
  EXPECT_NE(csv.find("x,flexible,1,10,infeasible"), std::string::npos);
  EXPECT_NE(cell_json(a, c).find("\"error\": \"solve ended infeasible\""), std::string::npos);
}
