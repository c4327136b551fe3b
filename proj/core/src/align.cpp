#include "runq/align.hpp"

#include "runq/kernels.hpp"
#include "runq/mask_ops.hpp"
#include "runq/primitives.hpp"

namespace runq::compute {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

int64_t shape_slots(const Shape& sh) {
  return std::visit(overloaded{
                        [](const DenseShape& d) { return d.n; },
                        [](const RunShape& r) { return static_cast<int64_t>(r.s.size()); },
                        [](const PointShape& p) { return static_cast<int64_t>(p.p.size()); },
                    },
                    sh);
}

int64_t shape_covered_rows(const Shape& sh) {
  return std::visit(overloaded{
                        [](const DenseShape& d) { return d.n; },
                        [](const RunShape& r) {
                          int64_t n = 0;
                          for (size_t i = 0; i < r.s.size(); ++i) n += r.e[i] - r.s[i] + 1;
                          return n;
                        },
                        [](const PointShape& p) { return static_cast<int64_t>(p.p.size()); },
                    },
                    sh);
}

bool shapes_identical(const Shape& a, const Shape& b) {
  if (a.index() != b.index()) return false;
  return std::visit(overloaded{
                        [&](const DenseShape& d) { return d.n == std::get<DenseShape>(b).n; },
                        [&](const RunShape& r) {
                          const auto& o = std::get<RunShape>(b);
                          return r.s == o.s && r.e == o.e;
                        },
                        [&](const PointShape& p) { return p.p == std::get<PointShape>(b).p; },
                    },
                    a);
}

PosVec shape_weights(const Shape& sh) {
  return std::visit(overloaded{
                        [](const DenseShape& d) {
                          return PosVec(static_cast<size_t>(d.n), 1);
                        },
                        [](const RunShape& r) {
                          PosVec l(r.s.size());
                          for (size_t i = 0; i < r.s.size(); ++i) l[i] = r.e[i] - r.s[i] + 1;
                          return l;
                        },
                        [](const PointShape& p) {
                          return PosVec(p.p.size(), 1);
                        },
                    },
                    sh);
}

Column column_from_shape(const Shape& sh, Array values, int64_t total_size) {
  return std::visit(
      overloaded{
          [&](const DenseShape&) -> Column { return PlainColumn(std::move(values)); },
          [&](const RunShape& r) -> Column {
            return RleColumn{std::move(values), r.s, r.e, total_size};
          },
          [&](const PointShape& p) -> Column {
            return IndexColumn{std::move(values), p.p, total_size};
          },
      },
      sh);
}

Decomposed decompose(const Column& col) {
  switch (col.encoding()) {
    case Encoding::Plain:
      return {DenseShape{col.total_size()}, decode_values(col.plain())};
    case Encoding::Rle:
      return {RunShape{col.rle().s, col.rle().e}, col.rle().v};
    case Encoding::Index:
      return {PointShape{col.index().p}, col.index().v};
    case Encoding::PlainPlusIndex:
      return {DenseShape{col.total_size()}, decode_values(col.plain_index())};
    case Encoding::RlePlusIndex:
      fail("decompose: rle+index has two positional parts; distribute first");
  }
  fail("decompose: unknown encoding");
}

Column normalize_basic(const Column& col) {
  switch (col.encoding()) {
    case Encoding::PlainPlusIndex:
      return PlainColumn(decode_values(col.plain_index()));
    case Encoding::RlePlusIndex: {
      auto rows = to_rows(col);
      if (static_cast<int64_t>(rows.positions.size()) == col.total_size())
        return PlainColumn(std::move(rows.values));
      return IndexColumn{std::move(rows.values), std::move(rows.positions),
                         col.total_size()};
    }
    default: return col;
  }
}

// --- shape alignment -------------------------------------------------------

namespace {

struct ShapeAlign {
  Shape shape;
  // per output slot, the source slot in each input; empty means identity
  PosVec take1, take2;
};

ShapeAlign align_run_dense(const RunShape& r, int64_t n) {
  ShapeAlign out;
  PosVec lens(r.s.size());
  for (size_t i = 0; i < r.s.size(); ++i) lens[i] = r.e[i] - r.s[i] + 1;
  PosVec positions = kernels::range_arange(r.s, lens);
  PosVec run_idx = kernels::iota(static_cast<int64_t>(r.s.size()));
  out.take1 = kernels::repeat_interleave(std::span<const int64_t>(run_idx),
                                         std::span<const int64_t>(lens));
  bool full = static_cast<int64_t>(positions.size()) == n;
  if (full) {
    out.shape = DenseShape{n};
  } else {
    out.take2 = positions;
    out.shape = PointShape{std::move(positions)};
  }
  return out;
}

ShapeAlign align_shapes(const Shape& a, const Shape& b) {
  ShapeAlign out;
  if (std::holds_alternative<DenseShape>(a) && std::holds_alternative<DenseShape>(b)) {
    out.shape = a;
    return out;
  }
  if (std::holds_alternative<RunShape>(a) && std::holds_alternative<RunShape>(b)) {
    const auto& ra = std::get<RunShape>(a);
    const auto& rb = std::get<RunShape>(b);
    auto r = enc::range_intersect(ra.s, ra.e, rb.s, rb.e);
    out.shape = RunShape{std::move(r.s), std::move(r.e)};
    out.take1 = std::move(r.idx1);
    out.take2 = std::move(r.idx2);
    return out;
  }
  if (std::holds_alternative<RunShape>(a) && std::holds_alternative<PointShape>(b)) {
    const auto& ra = std::get<RunShape>(a);
    const auto& pb = std::get<PointShape>(b);
    // bucketize the smaller side
    auto r = (pb.p.size() <= ra.s.size()) ? enc::idx_in_rle(pb.p, ra.s, ra.e)
                                          : enc::rle_contain_idx(pb.p, ra.s, ra.e);
    out.shape = PointShape{std::move(r.p_out)};
    out.take1 = std::move(r.run_of);
    out.take2 = std::move(r.idx_of);
    return out;
  }
  if (std::holds_alternative<PointShape>(a) && std::holds_alternative<RunShape>(b)) {
    ShapeAlign sw = align_shapes(b, a);
    out.shape = std::move(sw.shape);
    out.take1 = std::move(sw.take2);
    out.take2 = std::move(sw.take1);
    return out;
  }
  if (std::holds_alternative<PointShape>(a) && std::holds_alternative<PointShape>(b)) {
    const auto& pa = std::get<PointShape>(a);
    const auto& pb = std::get<PointShape>(b);
    auto r = enc::idx_in_idx(pa.p, pb.p);
    out.shape = PointShape{std::move(r.p_out)};
    out.take1 = std::move(r.idx1);
    out.take2 = std::move(r.idx2);
    return out;
  }
  if (std::holds_alternative<RunShape>(a) && std::holds_alternative<DenseShape>(b)) {
    ShapeAlign r = align_run_dense(std::get<RunShape>(a), std::get<DenseShape>(b).n);
    return r;
  }
  if (std::holds_alternative<DenseShape>(a) && std::holds_alternative<RunShape>(b)) {
    ShapeAlign sw = align_run_dense(std::get<RunShape>(b), std::get<DenseShape>(a).n);
    std::swap(sw.take1, sw.take2);
    return sw;
  }
  if (std::holds_alternative<PointShape>(a) && std::holds_alternative<DenseShape>(b)) {
    const auto& pa = std::get<PointShape>(a);
    out.shape = a;
    out.take2 = pa.p;  // dense side gathered at the points
    return out;
  }
  // Dense x Point
  ShapeAlign sw = align_shapes(b, a);
  out.shape = std::move(sw.shape);
  out.take1 = std::move(sw.take2);
  out.take2 = std::move(sw.take1);
  return out;
}

// An empty take vector means identity, which is ambiguous when the output
// really has zero slots; resolve by slot count.
Array take_checked(const Array& v, const PosVec& idx, int64_t slots) {
  if (idx.empty() && v.size() == slots) return v;
  return kernels::gather(v, idx);
}

}  // namespace

AlignedPair align(const Column& a, const Column& b) {
  require(a.total_size() == b.total_size(), "align: total_size mismatch");
  Decomposed da = decompose(a);
  Decomposed db = decompose(b);
  ShapeAlign sa = align_shapes(da.shape, db.shape);
  int64_t slots = shape_slots(sa.shape);
  AlignedPair out;
  out.v1 = take_checked(da.values, sa.take1, slots);
  out.v2 = take_checked(db.values, sa.take2, slots);
  out.shape = std::move(sa.shape);
  out.total_size = a.total_size();
  return out;
}

MultiAligned align_many(std::span<const Column> cols) {
  require(!cols.empty(), "align_many: no columns");
  int64_t total = cols[0].total_size();
  for (const auto& c : cols)
    require(c.total_size() == total, "align_many: total_size mismatch");

  MultiAligned acc;
  Decomposed d0 = decompose(cols[0]);
  acc.shape = std::move(d0.shape);
  acc.values.push_back(std::move(d0.values));
  acc.total_size = total;

  for (size_t i = 1; i < cols.size(); ++i) {
    Decomposed di = decompose(cols[i]);
    ShapeAlign sa = align_shapes(acc.shape, di.shape);
    int64_t slots = shape_slots(sa.shape);
    for (auto& v : acc.values) v = take_checked(v, sa.take1, slots);
    acc.values.push_back(take_checked(di.values, sa.take2, slots));
    acc.shape = std::move(sa.shape);
  }
  return acc;
}

// --- operators ----------------------------------------------------------------

BinOp binop_from_name(std::string_view name) {
  if (name == "+") return BinOp::Add;
  if (name == "-") return BinOp::Sub;
  if (name == "*") return BinOp::Mul;
  if (name == "/") return BinOp::Div;
  if (name == "<") return BinOp::Lt;
  if (name == "<=") return BinOp::Le;
  if (name == "==" || name == "=") return BinOp::Eq;
  if (name == "!=" || name == "<>") return BinOp::Ne;
  if (name == ">=") return BinOp::Ge;
  if (name == ">") return BinOp::Gt;
  fail("unknown operator: " + std::string(name));
}

std::string_view binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Ge: return ">=";
    case BinOp::Gt: return ">";
  }
  return "?";
}

namespace {

template <class T>
T apply_arith(T x, T y, BinOp op) {
  switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Div:
      if constexpr (std::is_integral_v<T>) {
        require(y != 0, "integer division by zero");
        return x / y;
      } else {
        return x / y;  // IEEE semantics propagate inf/nan
      }
    default: fail("apply_arith: not an arithmetic op");
  }
}

template <class T>
bool apply_cmp(T x, T y, BinOp op) {
  switch (op) {
    case BinOp::Lt: return x < y;
    case BinOp::Le: return x <= y;
    case BinOp::Eq: return x == y;
    case BinOp::Ne: return x != y;
    case BinOp::Ge: return x >= y;
    case BinOp::Gt: return x > y;
    default: fail("apply_cmp: not a comparison");
  }
}

Array arith_values(const Array& a, const Array& b, BinOp op) {
  require(a.size() == b.size(), "arith: value length mismatch");
  if (dtype_is_float(a.dtype()) || dtype_is_float(b.dtype())) {
    auto xa = a.to_f64();
    auto xb = b.to_f64();
    TrackedVec<double> out(xa.size());
    for (size_t i = 0; i < xa.size(); ++i) out[i] = apply_arith(xa[i], xb[i], op);
    return Array::from(out);
  }
  auto xa = a.to_i64();
  auto xb = b.to_i64();
  TrackedVec<int64_t> out(xa.size());
  for (size_t i = 0; i < xa.size(); ++i) out[i] = apply_arith(xa[i], xb[i], op);
  return Array::from(out);
}

std::vector<uint8_t> cmp_values(const Array& a, const Array& b, BinOp op) {
  require(a.size() == b.size(), "compare: value length mismatch");
  std::vector<uint8_t> out(static_cast<size_t>(a.size()));
  if (dtype_is_float(a.dtype()) || dtype_is_float(b.dtype())) {
    auto xa = a.to_f64();
    auto xb = b.to_f64();
    for (size_t i = 0; i < xa.size(); ++i) out[i] = apply_cmp(xa[i], xb[i], op);
  } else {
    auto xa = a.to_i64();
    auto xb = b.to_i64();
    for (size_t i = 0; i < xa.size(); ++i) out[i] = apply_cmp(xa[i], xb[i], op);
  }
  return out;
}

// Build a mask from the slots of `sh` whose flag is set.
MaskColumn mask_from_shape(const Shape& sh, const std::vector<uint8_t>& flags,
                           int64_t total_size) {
  return std::visit(
      overloaded{
          [&](const DenseShape&) -> MaskColumn {
            PlainMask m;
            m.bits.assign(flags.begin(), flags.end());
            return m;
          },
          [&](const RunShape& r) -> MaskColumn {
            RleMask m;
            m.total_size = total_size;
            for (size_t i = 0; i < flags.size(); ++i) {
              if (flags[i]) {
                m.s.push_back(r.s[i]);
                m.e.push_back(r.e[i]);
              }
            }
            return m;
          },
          [&](const PointShape& p) -> MaskColumn {
            IndexMask m;
            m.total_size = total_size;
            for (size_t i = 0; i < flags.size(); ++i)
              if (flags[i]) m.p.push_back(p.p[i]);
            return m;
          },
      },
      sh);
}

std::pair<Column, Column> composite_parts(const RlePlusIndexColumn& c) {
  return {Column(c.runs), Column(c.points)};
}

IndexColumn merge_disjoint_points(const IndexColumn& ia, const IndexColumn& ib) {
  IndexColumn out;
  out.total_size = ia.total_size;
  size_t n = ia.p.size() + ib.p.size();
  out.p.resize(n);
  Array vb_arr = ib.v.cast(ia.v.dtype());
  dtype_dispatch(ia.v.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto va = ia.v.template as<T>();
    auto vb = vb_arr.template as<T>();
    TrackedVec<T> merged(n);
    size_t i = 0, j = 0, k = 0;
    while (i < va.size() || j < vb.size()) {
      bool from_a = j >= vb.size() || (i < va.size() && ia.p[i] < ib.p[j]);
      if (from_a) {
        out.p[k] = ia.p[i];
        merged[k++] = va[i++];
      } else {
        out.p[k] = ib.p[j];
        merged[k++] = vb[j++];
      }
    }
    out.v = Array::from(merged);
  });
  return out;
}

RleColumn merge_disjoint_runs(const RleColumn& ra, const RleColumn& rb) {
  RleColumn out;
  out.total_size = ra.total_size;
  size_t n = ra.s.size() + rb.s.size();
  out.s.resize(n);
  out.e.resize(n);
  Array vb_arr = rb.v.cast(ra.v.dtype());
  dtype_dispatch(ra.v.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto va = ra.v.template as<T>();
    auto vb = vb_arr.template as<T>();
    TrackedVec<T> merged(n);
    size_t i = 0, j = 0, k = 0;
    while (i < va.size() || j < vb.size()) {
      bool from_a = j >= vb.size() || (i < va.size() && ra.s[i] < rb.s[j]);
      if (from_a) {
        out.s[k] = ra.s[i];
        out.e[k] = ra.e[i];
        merged[k++] = va[i++];
      } else {
        out.s[k] = rb.s[j];
        out.e[k] = rb.e[j];
        merged[k++] = vb[j++];
      }
    }
    out.v = Array::from(merged);
  });
  return out;
}

// Reassemble results whose coverages are disjoint (from distributing an op
// over composite parts). Either input may itself be composite.
Column combine_disjoint(Column a, Column b) {
  require(a.encoding() != Encoding::Plain && b.encoding() != Encoding::Plain,
          "combine_disjoint: plain parts cannot carry gaps");
  int64_t total = a.total_size();

  auto parts = [&](const Column& c, std::optional<RleColumn>& runs,
                   std::optional<IndexColumn>& points) {
    switch (c.encoding()) {
      case Encoding::Rle: runs = c.rle(); break;
      case Encoding::Index: points = c.index(); break;
      case Encoding::RlePlusIndex:
        runs = c.rle_index().runs;
        points = c.rle_index().points;
        break;
      default: break;
    }
  };
  std::optional<RleColumn> runs_a, runs_b;
  std::optional<IndexColumn> pts_a, pts_b;
  parts(a, runs_a, pts_a);
  parts(b, runs_b, pts_b);

  std::optional<RleColumn> runs = runs_a;
  if (runs_b) runs = runs ? std::optional(merge_disjoint_runs(*runs, *runs_b)) : runs_b;
  std::optional<IndexColumn> pts = pts_a;
  if (pts_b) pts = pts ? std::optional(merge_disjoint_points(*pts, *pts_b)) : pts_b;

  bool have_runs = runs && runs->run_count() > 0;
  bool have_pts = pts && pts->point_count() > 0;
  if (have_runs && have_pts) return RlePlusIndexColumn{std::move(*runs), std::move(*pts)};
  if (have_runs) return std::move(*runs);
  if (have_pts) return std::move(*pts);
  if (runs) return std::move(*runs);  // empty, keep a consistent carrier
  IndexColumn empty;
  empty.total_size = total;
  empty.v = Array::empty(a.value_type());
  return empty;
}

MaskColumn combine_disjoint_masks(MaskColumn a, MaskColumn b) {
  if (a.encoding() == MaskEncoding::Rle && b.encoding() == MaskEncoding::Index)
    return CompositeMask{a.rle(), b.index()};
  return masks::or_mask(a, b);
}

bool is_composite_data(const Column& c) { return c.encoding() == Encoding::RlePlusIndex; }

}  // namespace

Column arith(const Column& a, const Column& b, BinOp op) {
  require(!is_comparison(op), "arith: comparison operator");
  if (is_composite_data(a)) {
    auto [runs, points] = composite_parts(a.rle_index());
    return combine_disjoint(arith(runs, b, op), arith(points, b, op));
  }
  if (is_composite_data(b)) {
    auto [runs, points] = composite_parts(b.rle_index());
    return combine_disjoint(arith(a, runs, op), arith(a, points, op));
  }
  AlignedPair ap = align(a, b);
  Array vals = arith_values(ap.v1, ap.v2, op);
  return column_from_shape(ap.shape, std::move(vals), ap.total_size);
}

MaskColumn compare(const Column& a, const Column& b, BinOp op) {
  require(is_comparison(op), "compare: arithmetic operator");
  if (is_composite_data(a)) {
    auto [runs, points] = composite_parts(a.rle_index());
    return combine_disjoint_masks(compare(runs, b, op), compare(points, b, op));
  }
  if (is_composite_data(b)) {
    auto [runs, points] = composite_parts(b.rle_index());
    return combine_disjoint_masks(compare(a, runs, op), compare(a, points, op));
  }
  AlignedPair ap = align(a, b);
  auto flags = cmp_values(ap.v1, ap.v2, op);
  return mask_from_shape(ap.shape, flags, ap.total_size);
}

OpResult binary_op(const Column& a, const Column& b, BinOp op) {
  if (is_comparison(op)) return compare(a, b, op);
  return arith(a, b, op);
}

namespace {

Array scalar_arith_values(const Array& v, Scalar k, BinOp op, bool reversed) {
  bool flt = dtype_is_float(v.dtype()) || std::holds_alternative<double>(k);
  if (flt) {
    double kv = std::holds_alternative<double>(k) ? std::get<double>(k)
                                                  : static_cast<double>(std::get<int64_t>(k));
    auto x = v.to_f64();
    TrackedVec<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i)
      out[i] = reversed ? apply_arith(kv, x[i], op) : apply_arith(x[i], kv, op);
    return Array::from(out);
  }
  int64_t kv = std::get<int64_t>(k);
  auto x = v.to_i64();
  TrackedVec<int64_t> out(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = reversed ? apply_arith(kv, x[i], op) : apply_arith(x[i], kv, op);
  return Array::from(out);
}

std::vector<uint8_t> scalar_cmp_values(const Array& v, Scalar k, BinOp op, bool reversed) {
  std::vector<uint8_t> out(static_cast<size_t>(v.size()));
  bool flt = dtype_is_float(v.dtype()) || std::holds_alternative<double>(k);
  if (flt) {
    double kv = std::holds_alternative<double>(k) ? std::get<double>(k)
                                                  : static_cast<double>(std::get<int64_t>(k));
    auto x = v.to_f64();
    for (size_t i = 0; i < x.size(); ++i)
      out[i] = reversed ? apply_cmp(kv, x[i], op) : apply_cmp(x[i], kv, op);
  } else {
    int64_t kv = std::get<int64_t>(k);
    auto x = v.to_i64();
    for (size_t i = 0; i < x.size(); ++i)
      out[i] = reversed ? apply_cmp(kv, x[i], op) : apply_cmp(x[i], kv, op);
  }
  return out;
}

}  // namespace

Column arith_scalar(const Column& a, Scalar k, BinOp op, bool reversed) {
  switch (a.encoding()) {
    case Encoding::Plain: {
      Array decoded = decode_full(a);
      return PlainColumn(scalar_arith_values(decoded, k, op, reversed));
    }
    case Encoding::Rle: {
      const auto& c = a.rle();
      return RleColumn{scalar_arith_values(c.v, k, op, reversed), c.s, c.e, c.total_size};
    }
    case Encoding::Index: {
      const auto& c = a.index();
      return IndexColumn{scalar_arith_values(c.v, k, op, reversed), c.p, c.total_size};
    }
    case Encoding::PlainPlusIndex: {
      Array decoded = decode_full(a);
      return PlainColumn(scalar_arith_values(decoded, k, op, reversed));
    }
    case Encoding::RlePlusIndex: {
      auto [runs, points] = composite_parts(a.rle_index());
      return combine_disjoint(arith_scalar(runs, k, op, reversed),
                              arith_scalar(points, k, op, reversed));
    }
  }
  fail("arith_scalar: unknown encoding");
}

MaskColumn compare_scalar(const Column& a, Scalar k, BinOp op, bool reversed) {
  switch (a.encoding()) {
    case Encoding::Plain: {
      Array decoded = decode_full(a);
      PlainMask m;
      auto flags = scalar_cmp_values(decoded, k, op, reversed);
      m.bits.assign(flags.begin(), flags.end());
      return m;
    }
    case Encoding::Rle: {
      const auto& c = a.rle();
      auto flags = scalar_cmp_values(c.v, k, op, reversed);
      RleMask m;
      m.total_size = c.total_size;
      for (size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) {
          m.s.push_back(c.s[i]);
          m.e.push_back(c.e[i]);
        }
      }
      return m;
    }
    case Encoding::Index: {
      const auto& c = a.index();
      auto flags = scalar_cmp_values(c.v, k, op, reversed);
      IndexMask m;
      m.total_size = c.total_size;
      for (size_t i = 0; i < flags.size(); ++i)
        if (flags[i]) m.p.push_back(c.p[i]);
      return m;
    }
    case Encoding::PlainPlusIndex: {
      // distribute: compare the narrow base, void the outlier slots, then
      // OR in the outliers that pass
      const auto& c = a.plain_index();
      Array base = decode_values(c.base);
      auto flags = scalar_cmp_values(base, k, op, reversed);
      for (auto p : c.outliers.p) flags[static_cast<size_t>(p)] = 0;
      PlainMask bm;
      bm.bits.assign(flags.begin(), flags.end());
      auto oflags = scalar_cmp_values(c.outliers.v, k, op, reversed);
      IndexMask om;
      om.total_size = c.size();
      for (size_t i = 0; i < oflags.size(); ++i)
        if (oflags[i]) om.p.push_back(c.outliers.p[i]);
      return masks::or_mask(bm, om);
    }
    case Encoding::RlePlusIndex: {
      auto [runs, points] = composite_parts(a.rle_index());
      return combine_disjoint_masks(compare_scalar(runs, k, op, reversed),
                                    compare_scalar(points, k, op, reversed));
    }
  }
  fail("compare_scalar: unknown encoding");
}

OpResult scalar_op(const Column& a, Scalar k, BinOp op, bool reversed) {
  if (is_comparison(op)) return compare_scalar(a, k, op, reversed);
  return arith_scalar(a, k, op, reversed);
}

// --- filter --------------------------------------------------------------------

namespace {

Column filter_rle(const RleColumn& c, const MaskColumn& m);
Column filter_index(const IndexColumn& c, const MaskColumn& m);
Column filter_plain(const PlainColumn& c, const MaskColumn& m);

Column filter_rle(const RleColumn& c, const MaskColumn& m) {
  switch (m.encoding()) {
    case MaskEncoding::Rle: {
      auto r = enc::range_intersect(c.s, c.e, m.rle().s, m.rle().e);
      return RleColumn{kernels::gather(c.v, r.idx1), std::move(r.s), std::move(r.e),
                       c.total_size};
    }
    case MaskEncoding::Index: {
      const auto& idx = m.index();
      auto r = (idx.p.size() <= c.s.size()) ? enc::idx_in_rle(idx.p, c.s, c.e)
                                            : enc::rle_contain_idx(idx.p, c.s, c.e);
      return IndexColumn{kernels::gather(c.v, r.run_of), std::move(r.p_out), c.total_size};
    }
    case MaskEncoding::Plain: {
      // convert the mask to match: sparse plain masks go through Index,
      // dense ones through an RLE view of their true runs
      const auto& pm = m.plain();
      if (m.true_count() <
          static_cast<int64_t>(masks::kSparseFraction * static_cast<double>(pm.size())))
        return filter_rle(c, MaskColumn(enc::plain_mask_to_index(pm)));
      return filter_rle(c, MaskColumn(enc::plain_mask_to_rle(pm)));
    }
    case MaskEncoding::Composite: {
      const auto& cm = m.composite();
      return combine_disjoint(filter_rle(c, MaskColumn(cm.runs)),
                              filter_rle(c, MaskColumn(cm.points)));
    }
  }
  fail("filter_rle: unknown mask encoding");
}

Column filter_index(const IndexColumn& c, const MaskColumn& m) {
  switch (m.encoding()) {
    case MaskEncoding::Rle: {
      auto r = (c.p.size() <= m.rle().s.size())
                   ? enc::idx_in_rle(c.p, m.rle().s, m.rle().e)
                   : enc::rle_contain_idx(c.p, m.rle().s, m.rle().e);
      return IndexColumn{kernels::gather(c.v, r.idx_of), std::move(r.p_out), c.total_size};
    }
    case MaskEncoding::Index: {
      auto r = enc::idx_in_idx(c.p, m.index().p);
      return IndexColumn{kernels::gather(c.v, r.idx1), std::move(r.p_out), c.total_size};
    }
    case MaskEncoding::Plain: {
      const auto& bits = m.plain().bits;
      IndexColumn out;
      out.total_size = c.total_size;
      PosVec keep;
      for (size_t i = 0; i < c.p.size(); ++i) {
        if (bits[static_cast<size_t>(c.p[i])]) {
          out.p.push_back(c.p[i]);
          keep.push_back(static_cast<int64_t>(i));
        }
      }
      out.v = kernels::gather(c.v, keep);
      return out;
    }
    case MaskEncoding::Composite: {
      const auto& cm = m.composite();
      return combine_disjoint(filter_index(c, MaskColumn(cm.runs)),
                              filter_index(c, MaskColumn(cm.points)));
    }
  }
  fail("filter_index: unknown mask encoding");
}

Column filter_plain(const PlainColumn& c, const MaskColumn& m) {
  // gather the storage first, decode only the survivors (decode is affine,
  // so it commutes with the gather)
  auto take = [&](PosVec pos) -> Column {
    PlainColumn gathered{kernels::gather(c.values, pos), c.logical, c.center};
    return IndexColumn{decode_values(gathered), std::move(pos), c.size()};
  };
  switch (m.encoding()) {
    case MaskEncoding::Rle: return take(std::move(enc::rle_to_index(m.rle()).p));
    case MaskEncoding::Index: return take(m.index().p);
    case MaskEncoding::Plain: return take(std::move(enc::plain_mask_to_index(m.plain()).p));
    case MaskEncoding::Composite: {
      const auto& cm = m.composite();
      return combine_disjoint(filter_plain(c, MaskColumn(cm.runs)),
                              filter_plain(c, MaskColumn(cm.points)));
    }
  }
  fail("filter_plain: unknown mask encoding");
}

}  // namespace

Column filter(const Column& a, const MaskColumn& m) {
  require(a.total_size() == m.total_size(), "filter: total_size mismatch");
  if (m.true_count() == m.total_size()) return a;  // full cover selects everything

  switch (a.encoding()) {
    case Encoding::Plain: return filter_plain(a.plain(), m);
    case Encoding::Rle: return filter_rle(a.rle(), m);
    case Encoding::Index: return filter_index(a.index(), m);
    case Encoding::PlainPlusIndex:
      return filter_plain(PlainColumn(decode_values(a.plain_index())), m);
    case Encoding::RlePlusIndex: {
      auto [runs, points] = composite_parts(a.rle_index());
      return combine_disjoint(filter(runs, m), filter(points, m));
    }
  }
  fail("filter: unknown encoding");
}

}  // namespace runq::compute
