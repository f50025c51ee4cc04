#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "cohrel/data.hpp"
#include "cohrel/masked.hpp"
#include "cohrel/npbayes.hpp"
#include "cohrel/structure.hpp"
#include "cohrel/weibull.hpp"

using namespace cohrel;

namespace {

std::string fixture(const char* name) { return std::string(COHREL_FIXTURE_DIR) + "/" + name; }

void BM_Simpson(benchmark::State& st) {
    const int panels = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(simpson([](double x) { return std::exp(-x * x); }, 0, 3, panels));
}
BENCHMARK(BM_Simpson)->Arg(64)->Arg(1024);

void BM_BridgeLifetime(benchmark::State& st) {
    const auto e = parse_structure("max(min(1,4),min(2,5),min(1,3,5),min(2,3,4))");
    const std::vector<double> x{1.3, 2.2, 0.7, 4.1, 3.3};
    for (auto _ : st) benchmark::DoNotOptimize(lifetime(e, x));
}
BENCHMARK(BM_BridgeLifetime);

void BM_MinimalCutSets(benchmark::State& st) {
    const auto e = StructureExpr::k_out_of_m(3, 6);
    for (auto _ : st) benchmark::DoNotOptimize(minimal_cut_sets(e));
}
BENCHMARK(BM_MinimalCutSets);

void BM_EstimateComponent(benchmark::State& st) {
    const auto recs = load_system_csv(fixture("sps4_sample.csv"));
    const auto e = parse_structure("min(max(1,2),max(3,4))");
    const std::array<DistributionGuess, 3> g{exponential_guess(1), exponential_guess(1), exponential_guess(1)};
    EstimatorOptions opt;
    opt.grid_points = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(estimate_component(e, recs, g, ComponentId{1}, opt));
}
BENCHMARK(BM_EstimateComponent)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_WeibullLogLikelihood(benchmark::State& st) {
    const auto rows = load_component_csv(fixture("device_g.csv")).column(1);
    const WeibullParams th{2.5, 320, 1};
    for (auto _ : st) benchmark::DoNotOptimize(log_likelihood(th, rows));
}
BENCHMARK(BM_WeibullLogLikelihood);

void BM_WeibullFit(benchmark::State& st) {
    const auto rows = load_component_csv(fixture("device_g.csv")).column(1);
    for (auto _ : st) benchmark::DoNotOptimize(fit(rows, McmcConfig::weibull_default()));
}
BENCHMARK(BM_WeibullFit)->Unit(benchmark::kMillisecond);

void BM_MaskedGibbs(benchmark::State& st) {
    const auto rows = rows_for_component(load_masked_csv(fixture("two_of_three_masked.csv")), 2);
    McmcConfig c;
    c.iterations = 5000;
    c.burn_in = 1000;
    c.thin = 4;
    for (auto _ : st) benchmark::DoNotOptimize(gibbs_fit(rows, {}, c, {true, false, true}));
}
BENCHMARK(BM_MaskedGibbs)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
