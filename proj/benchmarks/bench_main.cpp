#include <benchmark/benchmark.h>

#include <algorithm>
#include <set>

#include "hgcf/dataset.hpp"
#include "hgcf/eval.hpp"
#include "hgcf/hetgraph.hpp"
#include "hgcf/model.hpp"
#include "hgcf/random.hpp"
#include "hgcf/similarity.hpp"
#include "hgcf/training.hpp"

namespace {

using namespace hgcf;

// Roughly MovieLens-100k shaped: popularity-skewed items, ~70 train items per user.
InteractionDataset synthetic(Index n_users, Index n_items, int per_user, std::uint64_t seed) {
  InteractionDataset ds;
  ds.n_users = n_users;
  ds.n_items = n_items;
  ds.train.resize(static_cast<std::size_t>(n_users));
  ds.validation.resize(static_cast<std::size_t>(n_users));
  ds.test.resize(static_cast<std::size_t>(n_users));
  Rng rng(seed);
  for (Index u = 0; u < n_users; ++u) {
    std::set<Index> items;
    while (static_cast<int>(items.size()) < per_user) {
      const auto a = rng.uniform_index(static_cast<std::uint64_t>(n_items));
      const auto b = rng.uniform_index(static_cast<std::uint64_t>(n_items));
      items.insert(static_cast<Index>(std::min(a, b)));
    }
    ds.train[static_cast<std::size_t>(u)].assign(items.begin(), items.end());
    const Index held = ds.train[static_cast<std::size_t>(u)].back();
    ds.train[static_cast<std::size_t>(u)].pop_back();
    ds.test[static_cast<std::size_t>(u)] = {held};
  }
  return ds;
}

const InteractionDataset& dataset() {
  static const auto ds = synthetic(943, 1152, 70, 1);
  return ds;
}

const PropagationGraphs& graphs() {
  static const auto g = propagation_graphs(build_adjacency(dataset(), GraphConfig{}));
  return g;
}

void BM_UserCooccurrence(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(user_cooccurrence(dataset()));
}
BENCHMARK(BM_UserCooccurrence)->Unit(benchmark::kMillisecond);

void BM_BuildAdjacency(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_adjacency(dataset(), GraphConfig{}));
}
BENCHMARK(BM_BuildAdjacency)->Unit(benchmark::kMillisecond);

void BM_SpMM(benchmark::State& state) {
  const auto& a = graphs().full.matrix;
  Matrix in = Matrix::Random(a.n_nodes(), state.range(0));
  Matrix out;
  for (auto _ : state) {
    a.multiply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["nnz"] = static_cast<double>(a.entries().size());
}
BENCHMARK(BM_SpMM)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  ModelConfig cfg;
  cfg.layers = static_cast<int>(state.range(0));
  const auto params = init_params(cfg, dataset().n_users + dataset().n_items, 3);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(params, graphs().layer1, graphs().full, cfg));
}
BENCHMARK(BM_Propagate)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  ModelConfig cfg;
  const auto params = init_params(cfg, dataset().n_users + dataset().n_items, 3);
  TripleSampler sampler(dataset());
  Rng rng(4);
  const auto batch = sampler.sample(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    const auto trace = propagate(params, graphs().layer1, graphs().full, cfg);
    benchmark::DoNotOptimize(backward(trace, batch, params, cfg, 1e-5));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_EvaluateFullRanking(benchmark::State& state) {
  ModelConfig cfg;
  const auto params = init_params(cfg, dataset().n_users + dataset().n_items, 3);
  const auto fe = embed(params, graphs(), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(fe, dataset(), EvalConfig{{20}}));
}
BENCHMARK(BM_EvaluateFullRanking)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
