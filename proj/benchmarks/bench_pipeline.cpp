#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "alluvial/bayes.hpp"
#include "alluvial/generator.hpp"
#include "alluvial/layout.hpp"
#include "alluvial/render.hpp"
#include "alluvial/rng.hpp"
#include "alluvial/scoring.hpp"
#include "alluvial/stats.hpp"

namespace {

alluvial::AlluvialDataset sample_chart(std::uint64_t seed) {
    alluvial::GeneratorConfig config;
    config.seed = seed;
    return alluvial::generate(config, "bench");
}

void BM_Generate(benchmark::State& state) {
    alluvial::GeneratorConfig config;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        config.seed = seed++;
        benchmark::DoNotOptimize(alluvial::generate(config));
    }
}
BENCHMARK(BM_Generate);

void BM_OrderColumns(benchmark::State& state) {
    const auto chart = sample_chart(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(alluvial::order_columns(chart));
}
BENCHMARK(BM_OrderColumns)->Arg(7)->Arg(23);

void BM_CountCrossings(benchmark::State& state) {
    const auto chart = sample_chart(static_cast<std::uint64_t>(state.range(0)));
    const auto orderings = alluvial::order_columns(chart);
    for (auto _ : state) benchmark::DoNotOptimize(alluvial::count_crossings(chart, orderings));
}
BENCHMARK(BM_CountCrossings)->Arg(7)->Arg(23);

void BM_RenderSvg(benchmark::State& state) {
    const auto chart = sample_chart(11);
    const auto geometry = alluvial::assign_geometry(chart, alluvial::order_columns(chart));
    for (auto _ : state) benchmark::DoNotOptimize(alluvial::render_svg(geometry));
}
BENCHMARK(BM_RenderSvg);

void BM_Ols(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    alluvial::SplitMix64 rng(42);
    alluvial::Matrix x(n, std::vector<double>(4));
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        for (auto& v : x[i]) v = rng.next_unit();
        y[i] = 0.3 * x[i][0] + 0.7 * x[i][1] + 0.1 * rng.next_unit();
    }
    for (auto _ : state) benchmark::DoNotOptimize(alluvial::ols(y, x));
}
BENCHMARK(BM_Ols)->Arg(50)->Arg(500);

void BM_BayesEvaluate(benchmark::State& state) {
    alluvial::GeneratorConfig config;
    std::vector<alluvial::ChartFeatures> corpus;
    const auto charts = alluvial::generate_corpus(config, 45);
    for (const auto& chart : charts)
        corpus.push_back({chart.id(),
                          alluvial::extract_features(chart, alluvial::order_columns(chart))});
    const auto weights = alluvial::published_weights(alluvial::WeightLabel::Sa);
    for (auto _ : state)
        benchmark::DoNotOptimize(alluvial::evaluate(corpus, weights, 5, 10, 1));
}
BENCHMARK(BM_BayesEvaluate);

} // namespace
