#include <benchmark/benchmark.h>

#include <filesystem>

#include "flexport/formulation.hpp"
#include "flexport/runner.hpp"
#include "flexport/solver.hpp"

using namespace flexport;

namespace {

const std::filesystem::path kScenario = std::filesystem::path(FLEXPORT_SOURCE_DIR) / "data" / "demo" / "scenario.toml";

struct Desk {
  ScenarioConfig config = load_scenario(kScenario);
  Network network = load_scenario_network(config);
};

const Desk& desk() {
  static const Desk d;
  return d;
}

// reference profile left empty: the matching rows still get built
FormulationOptions options(double tau) {
  return cell_options(desk().config, desk().network, ReferenceProfile{}, tau, 4e6);
}

void BM_AssembleDesk(benchmark::State& state) {
  const FormulationOptions opt = options(tau::weekly);
  for (auto _ : state) {
    AssembledLp lp = assemble_lp(desk().network, opt);
    benchmark::DoNotOptimize(lp.problem.num_rows());
  }
}
BENCHMARK(BM_AssembleDesk)->Unit(benchmark::kMillisecond);

void BM_SolveDeskCell(benchmark::State& state) {
  FormulationOptions opt = options(tau::stable);
  opt.temporal_matching = false;
  const AssembledLp lp = assemble_lp(desk().network, opt);
  for (auto _ : state) {
    LpSolution sol = solve(lp.problem, desk().config.tolerances);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_SolveDeskCell)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
