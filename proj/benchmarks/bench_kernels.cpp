#include <benchmark/benchmark.h>

#include <random>

#include "runq/kernels.hpp"
#include "runq/primitives.hpp"

using namespace runq;

namespace {

PosVec sorted_uniform(std::mt19937_64& rng, int64_t count, int64_t domain) {
  std::uniform_int_distribution<int64_t> d(0, domain - 1);
  PosVec v(static_cast<size_t>(count));
  for (auto& x : v) x = d(rng);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::pair<PosVec, PosVec> runs_over(std::mt19937_64& rng, int64_t domain, int64_t avg_run) {
  std::uniform_int_distribution<int64_t> seg(1, 2 * avg_run);
  PosVec s, e;
  int64_t at = 0;
  bool in = true;
  while (at < domain) {
    int64_t len = std::min(seg(rng), domain - at);
    if (in) {
      s.push_back(at);
      e.push_back(at + len - 1);
    }
    at += len;
    in = !in;
  }
  return {std::move(s), std::move(e)};
}

}  // namespace

static void BM_bucketize(benchmark::State& state) {
  std::mt19937_64 rng(1);
  int64_t n = state.range(0);
  PosVec bounds = sorted_uniform(rng, n / 4, 1 << 24);
  std::uniform_int_distribution<int64_t> d(0, (1 << 24) - 1);
  PosVec probes(static_cast<size_t>(n));
  for (auto& x : probes) x = d(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::bucketize(probes, bounds, true));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_bucketize)->Range(1 << 12, 1 << 20);

static void BM_range_arange(benchmark::State& state) {
  std::mt19937_64 rng(2);
  auto [s, e] = runs_over(rng, state.range(0) * 8, 8);
  PosVec l(s.size());
  for (size_t i = 0; i < s.size(); ++i) l[i] = e[i] - s[i] + 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::range_arange(s, l));
  }
}
BENCHMARK(BM_range_arange)->Range(1 << 12, 1 << 18);

static void BM_range_intersect(benchmark::State& state) {
  std::mt19937_64 rng(3);
  int64_t domain = state.range(0);
  auto [s1, e1] = runs_over(rng, domain, 64);
  auto [s2, e2] = runs_over(rng, domain, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc::range_intersect(s1, e1, s2, e2));
  }
}
BENCHMARK(BM_range_intersect)->Range(1 << 14, 1 << 22);

static void BM_scatter_sum(benchmark::State& state) {
  std::mt19937_64 rng(4);
  int64_t n = state.range(0);
  std::uniform_int_distribution<int64_t> g(0, 63);
  TrackedVec<int64_t> vals(static_cast<size_t>(n), 3);
  PosVec idx(static_cast<size_t>(n));
  for (auto& x : idx) x = g(rng);
  Array values = Array::from(vals);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::scatter_reduce(values, idx, 64, kernels::Reduce::Sum));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_scatter_sum)->Range(1 << 12, 1 << 20);
