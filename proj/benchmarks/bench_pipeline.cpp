#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "cstream/classifier.hpp"
#include "cstream/features.hpp"
#include "cstream/generator.hpp"
#include "cstream/graph.hpp"
#include "cstream/stats.hpp"

using namespace cstream;

namespace {

GeneratedTrace trace_of(std::size_t n_browsers) {
  GenConfig config;
  config.seed = 4242;
  config.n_browsers = n_browsers;
  return generate(config);
}

void BM_Generate(benchmark::State& state) {
  GenConfig config;
  config.seed = 4242;
  config.n_browsers = static_cast<std::size_t>(state.range(0));
  std::size_t records = 0;
  for (auto _ : state) {
    const auto trace = generate(config);
    records = trace.records.size();
    benchmark::DoNotOptimize(trace.records.data());
  }
  state.counters["records"] = static_cast<double>(records);
}
BENCHMARK(BM_Generate)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_LinkAndExtract(benchmark::State& state) {
  const auto trace = trace_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto vectors =
        extract_features_from_log(trace.records, default_ad_blacklist(), 30.0, nullptr, 1);
    benchmark::DoNotOptimize(vectors.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(trace.records.size()));
}
BENCHMARK(BM_LinkAndExtract)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ParseLogLine(benchmark::State& state) {
  const auto trace = trace_of(2);
  std::vector<std::string> lines;
  lines.reserve(trace.records.size());
  for (const auto& r : trace.records) lines.push_back(format_log_line(r));
  std::size_t at = 0;
  for (auto _ : state) {
    const auto r = parse_log_line(lines[at], LogSchema{}, 1);
    benchmark::DoNotOptimize(r.timestamp_ms);
    if (++at == lines.size()) at = 0;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ParseLogLine);

void BM_TrainTree(benchmark::State& state) {
  auto trace = trace_of(static_cast<std::size_t>(state.range(0)));
  const auto examples =
      extract_features_from_log(trace.records, default_ad_blacklist(), 30.0, &trace.labels, 1);
  for (auto _ : state) {
    const TreeModel tree = train_tree(examples);
    benchmark::DoNotOptimize(tree.nodes.data());
  }
  state.counters["examples"] = static_cast<double>(examples.size());
}
BENCHMARK(BM_TrainTree)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  auto trace = trace_of(4);
  const auto examples =
      extract_features_from_log(trace.records, default_ad_blacklist(), 30.0, &trace.labels, 1);
  const TreeModel tree = train_tree(examples);
  std::size_t at = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(tree, examples[at]).label);
    if (++at == examples.size()) at = 0;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Predict);

void BM_GraphMetrics(benchmark::State& state) {
  auto trace = trace_of(8);
  std::vector<HttpRecord> actions;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    if (trace.labels[i] == Label::user_action) actions.push_back(trace.records[i]);
  }
  const auto graphs = build_daily_graphs(std::move(actions), 1);
  for (auto _ : state) {
    std::size_t total = 0;
    for (const auto& g : graphs) {
      total += longest_path_length(g).length;
      if (g.vertex_count() > 0) total += wcc_partition(g).size();
    }
    benchmark::DoNotOptimize(total);
  }
  state.counters["graphs"] = static_cast<double>(graphs.size());
}
BENCHMARK(BM_GraphMetrics)->Unit(benchmark::kMicrosecond);

void BM_KsTwoSample(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::lognormal_distribution<double> dist(3.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size());
  for (auto& v : a) v = dist(rng);
  for (auto& v : b) v = dist(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::ks_two_sample(a, b).statistic);
  }
}
BENCHMARK(BM_KsTwoSample)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMicrosecond);

}  // namespace
