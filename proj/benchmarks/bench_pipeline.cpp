#include <benchmark/benchmark.h>

#include <random>

#include "crowdrank/corpus.hpp"
#include "crowdrank/density.hpp"
#include "crowdrank/features.hpp"
#include "crowdrank/ltr.hpp"

using namespace crowdrank;

namespace {

TemporalSignal random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> t(1.0, 59.0), w(0.1, 3.0);
    TemporalSignal s{SourceKind::TwitterFeedback, "q", {}};
    for (std::size_t i = 0; i < n; ++i) {
        s.points.push_back({static_cast<Timestamp>(t(gen) * kSecondsPerDay), w(gen)});
    }
    return s;
}

std::vector<QueryFeatureSet> random_sets(std::size_t queries, std::size_t rows) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<QueryFeatureSet> sets;
    for (std::size_t q = 0; q < queries; ++q) {
        QueryFeatureSet set{"Q" + std::to_string(q), {}};
        for (std::size_t i = 0; i < rows; ++i) {
            FeatureRow row;
            row.doc_id = "d" + std::to_string(i);
            for (auto& v : row.normalized.values) v = u(gen);
            row.label = u(gen) < 0.1 + 0.3 * row.normalized[Feature::News] ? 1 : 0;
            set.rows.push_back(row);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace

static void BM_DensityFeatures(benchmark::State& state) {
    const auto points = static_cast<std::size_t>(state.range(0));
    const auto est = build_density(random_signal(points, 3), {0.0, 60.0});
    std::vector<Timestamp> times;
    for (int i = 0; i < 500; ++i) times.push_back(static_cast<Timestamp>(i) * 10000);
    for (auto _ : state) benchmark::DoNotOptimize(temporal_features(&est, times));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(times.size()));
}
BENCHMARK(BM_DensityFeatures)->Arg(10)->Arg(100)->Arg(1000);

static void BM_TrainingMap(benchmark::State& state) {
    const auto sets = random_sets(100, static_cast<std::size_t>(state.range(0)));
    const auto model = LinearModel::uniform(all_features());
    for (auto _ : state) benchmark::DoNotOptimize(training_map(model, sets));
}
BENCHMARK(BM_TrainingMap)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Train(benchmark::State& state) {
    const auto sets = random_sets(50, 200);
    TrainConfig cfg;
    cfg.restarts = 2;
    for (auto _ : state) benchmark::DoNotOptimize(train(sets, all_features(), cfg));
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

static void BM_Retrieve(benchmark::State& state) {
    std::mt19937_64 gen(9);
    std::vector<Document> docs;
    const auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (int w = 0; w < 10; ++w) text += "w" + std::to_string(gen() % 2000) + " ";
        docs.push_back(make_document("d" + std::to_string(i), static_cast<Timestamp>(i), text));
    }
    const auto index = build_index(std::move(docs));
    const Query q{"q", "w1 w2 w3", static_cast<Timestamp>(n)};
    for (auto _ : state) benchmark::DoNotOptimize(retrieve_candidates(q, index));
}
BENCHMARK(BM_Retrieve)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
