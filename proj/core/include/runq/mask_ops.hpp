#pragma once

#include "runq/column.hpp"

// AND/OR/NOT over MaskColumns. The physical algorithm and the output
// encoding are both chosen by the input encoding pair; composite masks are
// rewritten through Boolean algebra over their RLE and Index parts.
namespace runq::masks {

// An RLE mask covering less than this fraction of its domain converts to
// Index rather than Plain when paired with a Plain mask.
inline constexpr double kSparseFraction = 0.05;

// Below this length, OR of two Index masks concatenates and sorts instead
// of merging.
inline constexpr int64_t kConcatSortLimit = 4096;

MaskColumn and_mask(const MaskColumn& m1, const MaskColumn& m2);
MaskColumn or_mask(const MaskColumn& m1, const MaskColumn& m2);
MaskColumn not_mask(const MaskColumn& m);

}  // namespace runq::masks
