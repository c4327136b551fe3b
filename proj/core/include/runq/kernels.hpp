#pragma once

#include <algorithm>
#include <span>

#include "runq/array.hpp"

namespace runq::kernels {

// Batched binary search. right=false counts boundaries strictly below each
// probe, right=true counts boundaries at or below. Boundaries must be sorted
// non-decreasing; probes may be in any order.
PosVec bucketize(std::span<const int64_t> x, std::span<const int64_t> boundaries,
                 bool right);

// Overflow-checked running sum. Exclusive form prepends 0 and drops the last
// partial sum, so the output length equals the input length.
PosVec cumsum(std::span<const int64_t> x, bool exclusive);

int64_t checked_sum(std::span<const int64_t> x);

template <class T>
TrackedVec<T> repeat_interleave(std::span<const T> values,
                                std::span<const int64_t> counts) {
  require(values.size() == counts.size(), "repeat_interleave: length mismatch");
  int64_t total = 0;
  for (auto c : counts) {
    require(c >= 0, "repeat_interleave: negative count");
    total += c;
  }
  TrackedVec<T> out;
  out.reserve(static_cast<size_t>(total));
  for (size_t i = 0; i < values.size(); ++i)
    out.insert(out.end(), static_cast<size_t>(counts[i]), values[i]);
  return out;
}

Array repeat_interleave(const Array& values, std::span<const int64_t> counts);

// Concatenation of the sequences [start_i, start_i + length_i) — the batched
// arange used to expand run ranges into row positions.
PosVec range_arange(std::span<const int64_t> start, std::span<const int64_t> length);

enum class Reduce { Sum, Min, Max, Count };

// Grouped reduction. Empty groups take the identity: 0 for sum/count and the
// +/- infinity sentinel of the output type for min/max. Deterministic: values
// fold in input order within each group.
Array scatter_reduce(const Array& values, std::span<const int64_t> index,
                     int64_t n_groups, Reduce op);

struct UniqueResult {
  std::vector<Array> keys;  // one array per input column, length n_groups
  PosVec inverse;           // group id per input row
  int64_t n_groups = 0;
};

// Composite-key deduplication. Keys come out in ascending lexicographic
// order; inverse maps each row to its key's group id.
UniqueResult unique_with_inverse(std::span<const Array> columns);

Array gather(const Array& values, std::span<const int64_t> idx);
PosVec gather(std::span<const int64_t> values, std::span<const int64_t> idx);

struct SortResult {
  Array sorted;
  PosVec perm;  // sorted[i] == values[perm[i]]
};
SortResult sort_with_perm(const Array& values);

// True where x[i] != x[i-1]; element 0 is always true.
std::vector<uint8_t> adjacent_ne(const Array& x);

inline PosVec iota(int64_t n) {
  PosVec v(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
  return v;
}

}  // namespace runq::kernels
