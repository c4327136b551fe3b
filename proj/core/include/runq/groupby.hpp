#pragma once

#include "runq/align.hpp"

namespace runq::agg {

enum class AggFn { Sum, Count, Min, Max, Avg, Std, Var };

AggFn agg_from_name(std::string_view name);
std::string_view agg_name(AggFn fn);

struct GroupingResult {
  PosVec inverse;            // group id per value slot of `shape`
  int64_t n_groups = 0;
  std::vector<Array> keys;   // one array per group-by column, length n_groups
  compute::Shape shape;      // the aligned positional structure
  int64_t total_size = 0;
};

// Grouping phase: aligns the key columns, then assigns one inverse entry per
// value slot. RLE shapes keep one entry per run, never one per row.
GroupingResult group(std::span<const Column> keys);

// Low-level entry for callers that already aligned their columns.
GroupingResult group_on_arrays(compute::Shape shape, std::span<const Array> key_values,
                               int64_t total_size);

// Aggregation phase. `data` must carry exactly the grouping shape. For run
// shapes COUNT scatters run lengths and SUM scatters value*length; AVG, STD
// and VAR post-process SUM/COUNT (population variance). Empty groups yield
// NaN for AVG/STD/VAR.
Array aggregate(const Column& data, const GroupingResult& g, AggFn fn);

Array aggregate_array(const compute::Shape& shape, const Array& values,
                      const GroupingResult& g, AggFn fn);

struct GroupAggregateResult {
  std::vector<Array> keys;
  std::vector<Array> values;  // one per (data, fn) pair
  int64_t n_groups = 0;
};

// Joint path used by the query runner: aligns keys and aggregation inputs
// together so both phases see the same shape.
GroupAggregateResult group_aggregate(std::span<const Column> keys,
                                     std::span<const Column> data,
                                     std::span<const AggFn> fns);

// Global aggregate with no keys: a single group covering every slot.
Array aggregate_all(const Column& data, AggFn fn);

}  // namespace runq::agg
