#pragma once

#include <span>

#include "runq/column.hpp"

// Fundamental operations on encoded positional structures: intersections,
// unions, complements, compaction, and conversions between encodings.
namespace runq::enc {

// Expansion guard for decompressing conversions.
inline constexpr int64_t kDefaultElementBudget = int64_t{1} << 33;

struct RangeSet {
  PosVec s, e;
};

struct RangeIntersection {
  PosVec s, e;     // sorted, pairwise disjoint output fragments
  PosVec idx1;     // source run of each fragment in the first input
  PosVec idx2;     // source run of each fragment in the second input
};

// Positional intersection of two sorted run lists. Fragments are not
// adjacency-merged: each one maps to exactly one run per input so value
// tensors can be gathered through idx1/idx2. Internally the input with
// fewer runs drives the bucketization; idx outputs are swapped back.
RangeIntersection range_intersect(std::span<const int64_t> s1, std::span<const int64_t> e1,
                                  std::span<const int64_t> s2, std::span<const int64_t> e2);

struct IndexRleIntersection {
  PosVec p_out;    // surviving positions, sorted
  PosVec run_of;   // containing run per survivor
  PosVec idx_of;   // index of each survivor in the input position list
};

// Positions of `p` contained in some run. Preferred when |p| is small
// relative to the run count.
IndexRleIntersection idx_in_rle(std::span<const int64_t> p, std::span<const int64_t> s,
                                std::span<const int64_t> e);

// Same result set as idx_in_rle, bucketizing the runs against the positions
// instead. Preferred when runs are few relative to |p|.
IndexRleIntersection rle_contain_idx(std::span<const int64_t> p, std::span<const int64_t> s,
                                     std::span<const int64_t> e);

struct IndexIntersection {
  PosVec p_out;
  PosVec idx1, idx2;  // per survivor: index into each input list
};

IndexIntersection idx_in_idx(std::span<const int64_t> p1, std::span<const int64_t> p2);

// Canonical (sorted, disjoint, adjacency-merged) union of two run lists.
RangeSet range_union(std::span<const int64_t> s1, std::span<const int64_t> e1,
                     std::span<const int64_t> s2, std::span<const int64_t> e2);

PosVec merge_sorted_idx(std::span<const int64_t> p1, std::span<const int64_t> p2);
PosVec concat_sort_idx(std::span<const int64_t> p1, std::span<const int64_t> p2);

// Gaps between consecutive runs: candidate starts concat([-1], e) + 1,
// candidate ends concat(s, [total]) - 1, kept where start <= end.
RangeSet complement_rle(std::span<const int64_t> s, std::span<const int64_t> e, int64_t total);

// Complement of sparse positions; the result is RLE (the gaps are runs).
RangeSet complement_index(std::span<const int64_t> p, int64_t total);

// --- conversions -------------------------------------------------------

IndexColumn rle_to_index(const RleColumn& c, int64_t budget = kDefaultElementBudget);
IndexMask rle_to_index(const RleMask& m, int64_t budget = kDefaultElementBudget);

// Gap positions take `fill` for data columns and False for masks.
PlainColumn rle_to_plain(const RleColumn& c, double fill = 0.0,
                         int64_t budget = kDefaultElementBudget);
PlainMask rle_to_plain(const RleMask& m, int64_t budget = kDefaultElementBudget);

RleColumn plain_to_rle(const PlainColumn& c);
RlePlusIndexColumn plain_to_rle_index(const PlainColumn& c, int64_t min_run = 2);

// Splits off values that keep the rest from fitting a narrower type.
// trim_fraction trims floor(trim*n) extremes per side before sizing the
// narrow type; values that happen to fit rejoin the base. Floating-point
// columns are never narrowed (the outlier list comes back empty).
PlainPlusIndexColumn plain_to_plain_index(const PlainColumn& c, double trim_fraction);

RleMask plain_mask_to_rle(const PlainMask& m);
IndexMask plain_mask_to_index(const PlainMask& m);

// Remaps covered rows to a dense 0..k-1 row space, preserving value order.
RleColumn compact_rle(const RleColumn& c);
Column compact_rle_index(const RlePlusIndexColumn& c);

}  // namespace runq::enc
