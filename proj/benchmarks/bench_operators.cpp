#include <benchmark/benchmark.h>

#include <random>

#include "runq/align.hpp"
#include "runq/groupby.hpp"
#include "runq/join.hpp"
#include "runq/mask_ops.hpp"
#include "runq/primitives.hpp"

using namespace runq;

namespace {

// sorted column with the given number of distinct values, as Plain
PlainColumn sorted_column(int64_t rows, int64_t distinct) {
  TrackedVec<int64_t> v(static_cast<size_t>(rows));
  for (int64_t i = 0; i < rows; ++i) v[static_cast<size_t>(i)] = i / (rows / distinct);
  return PlainColumn(Array::from(v));
}

}  // namespace

// the core claim: operating on runs beats scanning rows when data is runny
static void BM_sum_groupby_rle(benchmark::State& state) {
  int64_t rows = state.range(0);
  Column keys(enc::plain_to_rle(sorted_column(rows, 16)));
  Column data(enc::plain_to_rle(sorted_column(rows, 64)));
  std::vector<Column> kv{keys};
  std::vector<Column> dv{data};
  std::vector<agg::AggFn> fns{agg::AggFn::Sum};
  for (auto _ : state) {
    benchmark::DoNotOptimize(agg::group_aggregate(kv, dv, fns));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_sum_groupby_rle)->Range(1 << 16, 1 << 22);

static void BM_sum_groupby_plain(benchmark::State& state) {
  int64_t rows = state.range(0);
  Column keys(sorted_column(rows, 16));
  Column data(sorted_column(rows, 64));
  std::vector<Column> kv{keys};
  std::vector<Column> dv{data};
  std::vector<agg::AggFn> fns{agg::AggFn::Sum};
  for (auto _ : state) {
    benchmark::DoNotOptimize(agg::group_aggregate(kv, dv, fns));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_sum_groupby_plain)->Range(1 << 16, 1 << 20);

static void BM_and_rle_masks(benchmark::State& state) {
  int64_t domain = state.range(0);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int64_t> seg(16, 256);
  auto make = [&]() {
    RleMask m;
    m.total_size = domain;
    int64_t at = 0;
    bool in = true;
    while (at < domain) {
      int64_t len = std::min(seg(rng), domain - at);
      if (in) {
        m.s.push_back(at);
        m.e.push_back(at + len - 1);
      }
      at += len;
      in = !in;
    }
    return MaskColumn(m);
  };
  MaskColumn a = make(), b = make();
  for (auto _ : state) {
    benchmark::DoNotOptimize(masks::and_mask(a, b));
  }
}
BENCHMARK(BM_and_rle_masks)->Range(1 << 16, 1 << 22);

static void BM_join_rle_plain(benchmark::State& state) {
  int64_t rows = state.range(0);
  Column left(enc::plain_to_rle(sorted_column(rows, 256)));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int64_t> d(0, 255);
  TrackedVec<int64_t> probe(1024);
  for (auto& x : probe) x = d(rng);
  Column right(PlainColumn(Array::from(probe)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(joins::get_join_index(right, left));
  }
}
BENCHMARK(BM_join_rle_plain)->Range(1 << 14, 1 << 18);

BENCHMARK_MAIN();
