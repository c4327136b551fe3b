#pragma once

#include "runq/column.hpp"

namespace runq::joins {

// Row references of one join side, in pairing order. Unsorted and possibly
// duplicated; RLE-shaped references carry their source run in v.
struct UnsortedIndexJoin {
  PosVec rows;
};
struct UnsortedRleJoin {
  PosVec v;  // source run reference per entry
  PosVec s, e;
};

class JoinIndex {
public:
  JoinIndex() : rep_(UnsortedIndexJoin{}) {}
  JoinIndex(UnsortedIndexJoin j) : rep_(std::move(j)) {}
  JoinIndex(UnsortedRleJoin j) : rep_(std::move(j)) {}

  bool is_rle() const { return std::holds_alternative<UnsortedRleJoin>(rep_); }
  const UnsortedIndexJoin& index() const { return std::get<UnsortedIndexJoin>(rep_); }
  const UnsortedRleJoin& rle() const { return std::get<UnsortedRleJoin>(rep_); }

  int64_t expanded_rows() const;

private:
  std::variant<UnsortedIndexJoin, UnsortedRleJoin> rep_;
};

// Flat row list of a join index, in pairing order.
PosVec expand_join_index(const JoinIndex& j);

struct JoinResult {
  JoinIndex left, right;
  int64_t cardinality = 0;  // matched pair count
};

struct ProbeHits {
  PosVec build_pos, probe_pos;  // matching pairs, probe-major
};

// Hash join of two value arrays: builds on `build_values`, probes in order,
// chains duplicate keys in entry order.
ProbeHits hash_build_probe(const Array& build_values, const Array& probe_values);

// Equi-join index generation. Runs join as single hash entries; matched runs
// re-expand by run length (many-to-many pairs by the product of lengths).
// Each side's index is RLE-shaped iff that side's column is RLE.
JoinResult get_join_index(const Column& left, const Column& right);

// Applies one side's join index to any column of that table. When the index
// is unsorted the column's sorted positions are bucketized per reference.
Column apply_join_index(const Column& col, const JoinIndex& jidx);

// Probe-side mask of rows with at least one match; used for semi-joins.
MaskColumn semi_join_mask(const Column& probe, const Column& build);

}  // namespace runq::joins
