#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "runq/array.hpp"

namespace runq {

enum class Encoding : uint8_t { Plain, Rle, Index, PlainPlusIndex, RlePlusIndex };
enum class MaskEncoding : uint8_t { Plain, Rle, Index, Composite };

std::string_view encoding_name(Encoding e);
std::string_view mask_encoding_name(MaskEncoding e);

// 1:1 position-to-row mapping, no gaps. Values may be stored at a narrower
// width than the logical type; `center` is the mid-range offset added back
// at decode time.
struct PlainColumn {
  Array values;
  DType logical = DType::I64;
  std::optional<int64_t> center;

  PlainColumn() = default;
  explicit PlainColumn(Array v) : values(std::move(v)), logical(values.dtype()) {}
  PlainColumn(Array v, DType logical_type, std::optional<int64_t> c = std::nullopt)
      : values(std::move(v)), logical(logical_type), center(c) {}

  int64_t size() const { return values.size(); }
};

// Sorted, non-overlapping runs [s_i, e_i] (closed intervals) with one value
// each. total_size is the logical row count of the parent domain; runs may
// leave gaps after filtering.
struct RleColumn {
  Array v;
  PosVec s, e;
  int64_t total_size = 0;

  int64_t run_count() const { return static_cast<int64_t>(s.size()); }
  int64_t run_length(int64_t i) const {
    return e[static_cast<size_t>(i)] - s[static_cast<size_t>(i)] + 1;
  }
  PosVec run_lengths() const;
  int64_t covered_rows() const;
};

// Sparse (value, position) pairs with strictly increasing positions.
struct IndexColumn {
  Array v;
  PosVec p;
  int64_t total_size = 0;

  int64_t point_count() const { return static_cast<int64_t>(p.size()); }
};

// Narrow base array covering every row plus wide outliers that shadow the
// base at their positions. The base stores 0 at outlier positions.
struct PlainPlusIndexColumn {
  PlainColumn base;
  IndexColumn outliers;

  int64_t size() const { return base.size(); }
  DType logical() const { return outliers.v.dtype(); }
};

// Long runs in RLE plus impure segments as points; coverages are disjoint.
struct RlePlusIndexColumn {
  RleColumn runs;
  IndexColumn points;

  int64_t total_size() const { return runs.total_size; }
};

class Column {
public:
  Column() : rep_(PlainColumn{}) {}
  Column(PlainColumn c) : rep_(std::move(c)) {}
  Column(RleColumn c) : rep_(std::move(c)) {}
  Column(IndexColumn c) : rep_(std::move(c)) {}
  Column(PlainPlusIndexColumn c) : rep_(std::move(c)) {}
  Column(RlePlusIndexColumn c) : rep_(std::move(c)) {}

  Encoding encoding() const;
  int64_t total_size() const;
  int64_t covered_rows() const;
  DType value_type() const;

  const PlainColumn& plain() const { return std::get<PlainColumn>(rep_); }
  const RleColumn& rle() const { return std::get<RleColumn>(rep_); }
  const IndexColumn& index() const { return std::get<IndexColumn>(rep_); }
  const PlainPlusIndexColumn& plain_index() const { return std::get<PlainPlusIndexColumn>(rep_); }
  const RlePlusIndexColumn& rle_index() const { return std::get<RlePlusIndexColumn>(rep_); }

  template <class V>
  decltype(auto) visit(V&& v) const {
    return std::visit(std::forward<V>(v), rep_);
  }

private:
  std::variant<PlainColumn, RleColumn, IndexColumn, PlainPlusIndexColumn,
               RlePlusIndexColumn>
      rep_;
};

// Masks track the boolean domain; position-explicit encodings store only the
// True positions and carry no value array.
struct PlainMask {
  TrackedVec<uint8_t> bits;
  int64_t size() const { return static_cast<int64_t>(bits.size()); }
};
struct RleMask {
  PosVec s, e;
  int64_t total_size = 0;
  int64_t run_count() const { return static_cast<int64_t>(s.size()); }
  int64_t covered_rows() const;
};
struct IndexMask {
  PosVec p;
  int64_t total_size = 0;
};
struct CompositeMask {
  RleMask runs;
  IndexMask points;
  int64_t total_size() const { return runs.total_size; }
};

class MaskColumn {
public:
  MaskColumn() : rep_(PlainMask{}) {}
  MaskColumn(PlainMask m) : rep_(std::move(m)) {}
  MaskColumn(RleMask m) : rep_(std::move(m)) {}
  MaskColumn(IndexMask m) : rep_(std::move(m)) {}
  MaskColumn(CompositeMask m) : rep_(std::move(m)) {}

  MaskEncoding encoding() const;
  int64_t total_size() const;
  int64_t true_count() const;

  const PlainMask& plain() const { return std::get<PlainMask>(rep_); }
  const RleMask& rle() const { return std::get<RleMask>(rep_); }
  const IndexMask& index() const { return std::get<IndexMask>(rep_); }
  const CompositeMask& composite() const { return std::get<CompositeMask>(rep_); }

  template <class V>
  decltype(auto) visit(V&& v) const {
    return std::visit(std::forward<V>(v), rep_);
  }

private:
  std::variant<PlainMask, RleMask, IndexMask, CompositeMask> rep_;
};

// Diagnostic invariant check; returns one message per violation, naming the
// invariant and the offending index. Empty means valid.
std::vector<std::string> validate(const Column& col);
std::vector<std::string> validate(const MaskColumn& mask);

struct ColumnStats {
  int64_t n_runs = 0;
  double avg_run_length = 0.0;
  int64_t encoded_bytes = 0;
  int64_t plain_bytes = 0;
  double compression_ratio = 0.0;  // plain_bytes / encoded_bytes
};

// Byte accounting: every value array at its storage width, every position
// array at 8 bytes per entry, so an RLE run with 4-byte values costs
// 4 + 8 + 8 = 20 bytes.
ColumnStats stats(const Column& col);

// --- decode helpers ---------------------------------------------------

// Widened, centered value array; no position materialization.
Array decode_values(const PlainColumn& c);
Array decode_values(const PlainPlusIndexColumn& c);

// Decoded value array of a gap-free column (throws if the column has gaps).
Array decode_full(const Column& col);

struct RowsView {
  PosVec positions;  // ascending covered positions
  Array values;      // decoded values, conformal to positions
};
// Decoded (position, value) pairs over the covered rows, in row order.
RowsView to_rows(const Column& col);

// Byte-per-row bitmap of a mask's True set.
TrackedVec<uint8_t> decode_mask(const MaskColumn& m);

PosVec mask_true_positions(const MaskColumn& m);

// --- canonical form ----------------------------------------------------

// Merges adjacent runs: equal-value adjacency for data, any adjacency for
// masks. Needed so structural equality is well-defined after conversions.
Column canonical(const Column& col);
MaskColumn canonical(const MaskColumn& m);
RleColumn canonical_rle(const RleColumn& c);
RleMask canonical_rle_mask(const RleMask& m);

bool columns_equal(const Column& a, const Column& b);

// --- construction helpers ----------------------------------------------

MaskColumn full_mask(int64_t total_size);   // single run covering every row
MaskColumn empty_rle_mask(int64_t total_size);
PlainMask make_plain_mask(std::vector<uint8_t> bits);

// --- debug dump ----------------------------------------------------------
// One-line JSON header {encoding, total_size, widths, ...} followed by the
// raw little-endian arrays. Diagnostic format, not a compatibility promise.
void dump_column(const Column& col, std::ostream& os);

}  // namespace runq
