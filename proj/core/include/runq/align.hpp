#pragma once

#include <variant>

#include "runq/column.hpp"

// Positional alignment of heterogeneous encodings plus the point-wise
// operator family built on it: binary arithmetic, comparisons, scalar
// expressions, and predicate selection.
namespace runq::compute {

struct DenseShape {
  int64_t n = 0;
};
struct RunShape {
  PosVec s, e;
};
struct PointShape {
  PosVec p;
};

// The positional structure shared by aligned value arrays. A run shape has
// one value slot per run, a point shape one per position, a dense shape one
// per row.
using Shape = std::variant<DenseShape, RunShape, PointShape>;

int64_t shape_slots(const Shape& sh);
int64_t shape_covered_rows(const Shape& sh);
bool shapes_identical(const Shape& a, const Shape& b);

// Rows per value slot: run lengths for run shapes, ones otherwise.
PosVec shape_weights(const Shape& sh);

Column column_from_shape(const Shape& sh, Array values, int64_t total_size);

struct Decomposed {
  Shape shape;
  Array values;
};
// Shape/value split of a basic-encoded column. Plain+Index decodes to a
// dense shape; RLE+Index has no single shape and must be distributed by the
// caller (binary_op and filter do this).
Decomposed decompose(const Column& col);

// Rewrites composites as a basic encoding: Plain+Index decodes to Plain,
// RLE+Index expands to Index (or Plain when it covers every row). Used where
// an operator needs a single positional structure.
Column normalize_basic(const Column& col);

struct AlignedPair {
  Shape shape;
  Array v1, v2;
  int64_t total_size = 0;
};

// Rewrites both columns onto the positional intersection of their coverages.
// Split ranges duplicate their value; the dispatch mirrors the AND table
// with values carried along.
AlignedPair align(const Column& a, const Column& b);

struct MultiAligned {
  Shape shape;
  std::vector<Array> values;  // one per input column, conformal to shape
  int64_t total_size = 0;
};

// Left-fold alignment of any number of columns onto one shared shape.
MultiAligned align_many(std::span<const Column> cols);

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Ge, Gt };

constexpr bool is_comparison(BinOp op) { return op >= BinOp::Lt; }
BinOp binop_from_name(std::string_view name);
std::string_view binop_name(BinOp op);

using Scalar = std::variant<int64_t, double>;
using OpResult = std::variant<Column, MaskColumn>;

// Aligns, then applies the operator point-wise on the value arrays.
// Arithmetic keeps the aligned shape; comparisons keep only True positions
// for position-explicit shapes.
OpResult binary_op(const Column& a, const Column& b, BinOp op);
Column arith(const Column& a, const Column& b, BinOp op);
MaskColumn compare(const Column& a, const Column& b, BinOp op);

// Scalar operand: no alignment, the operation runs over the value tensor
// only. `reversed` computes (k op a) instead of (a op k).
OpResult scalar_op(const Column& a, Scalar k, BinOp op, bool reversed = false);
Column arith_scalar(const Column& a, Scalar k, BinOp op, bool reversed = false);
MaskColumn compare_scalar(const Column& a, Scalar k, BinOp op, bool reversed = false);

// Selection: coverage becomes covered(a) ∩ true(m). Position-explicit
// results fall out of alignment itself; the output is not compacted. A
// full-cover mask returns the input unchanged.
Column filter(const Column& a, const MaskColumn& m);

}  // namespace runq::compute
