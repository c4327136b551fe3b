#include "runq/mask_ops.hpp"

#include "runq/primitives.hpp"

namespace runq::masks {

namespace {

using enc::idx_in_rle;
using enc::range_intersect;
using enc::rle_contain_idx;

bool is_sparse(const RleMask& m) {
  if (m.total_size == 0) return false;
  return static_cast<double>(m.covered_rows()) <
         kSparseFraction * static_cast<double>(m.total_size);
}

// --- AND building blocks ---------------------------------------------------

RleMask and_rle_rle(const RleMask& a, const RleMask& b) {
  auto r = range_intersect(a.s, a.e, b.s, b.e);
  return RleMask{std::move(r.s), std::move(r.e), a.total_size};
}

IndexMask and_rle_index(const RleMask& rle, const IndexMask& idx) {
  // bucketize whichever side is smaller
  if (static_cast<int64_t>(idx.p.size()) <= rle.run_count()) {
    auto r = idx_in_rle(idx.p, rle.s, rle.e);
    return IndexMask{std::move(r.p_out), idx.total_size};
  }
  auto r = rle_contain_idx(idx.p, rle.s, rle.e);
  return IndexMask{std::move(r.p_out), idx.total_size};
}

PlainMask and_plain_plain(const PlainMask& a, const PlainMask& b) {
  PlainMask out;
  out.bits.resize(a.bits.size());
  for (size_t i = 0; i < a.bits.size(); ++i) out.bits[i] = (a.bits[i] && b.bits[i]) ? 1 : 0;
  return out;
}

IndexMask and_plain_index(const PlainMask& plain, const IndexMask& idx) {
  IndexMask out;
  out.total_size = idx.total_size;
  for (auto p : idx.p)
    if (plain.bits[static_cast<size_t>(p)]) out.p.push_back(p);
  return out;
}

IndexMask and_index_index(const IndexMask& a, const IndexMask& b) {
  // bucketize the larger list into the smaller
  const IndexMask& big = a.p.size() >= b.p.size() ? a : b;
  const IndexMask& small = a.p.size() >= b.p.size() ? b : a;
  auto r = enc::idx_in_idx(big.p, small.p);
  return IndexMask{std::move(r.p_out), a.total_size};
}

MaskColumn and_rle_plain(const RleMask& rle, const PlainMask& plain) {
  if (is_sparse(rle)) return and_plain_index(plain, enc::rle_to_index(rle));
  return and_plain_plain(enc::rle_to_plain(rle), plain);
}

// --- OR building blocks ----------------------------------------------------

RleMask or_rle_rle(const RleMask& a, const RleMask& b) {
  auto r = enc::range_union(a.s, a.e, b.s, b.e);
  return RleMask{std::move(r.s), std::move(r.e), a.total_size};
}

PlainMask or_plain_plain(const PlainMask& a, const PlainMask& b) {
  PlainMask out;
  out.bits.resize(a.bits.size());
  for (size_t i = 0; i < a.bits.size(); ++i) out.bits[i] = (a.bits[i] || b.bits[i]) ? 1 : 0;
  return out;
}

PlainMask or_plain_index(const PlainMask& plain, const IndexMask& idx) {
  PlainMask out = plain;
  for (auto p : idx.p) out.bits[static_cast<size_t>(p)] = 1;
  return out;
}

IndexMask or_index_index(const IndexMask& a, const IndexMask& b) {
  PosVec p;
  if (static_cast<int64_t>(a.p.size()) < kConcatSortLimit &&
      static_cast<int64_t>(b.p.size()) < kConcatSortLimit) {
    p = enc::concat_sort_idx(a.p, b.p);
  } else {
    p = enc::merge_sorted_idx(a.p, b.p);
  }
  return IndexMask{std::move(p), a.total_size};
}

PlainMask or_rle_plain(const RleMask& rle, const PlainMask& plain) {
  if (is_sparse(rle)) return or_plain_index(plain, enc::rle_to_index(rle));
  return or_plain_plain(enc::rle_to_plain(rle), plain);
}

// points of `idx` not covered by `rle`; keeps composite parts disjoint
IndexMask subtract_runs(const IndexMask& idx, const RleMask& rle) {
  IndexMask out;
  out.total_size = idx.total_size;
  auto covered = idx_in_rle(idx.p, rle.s, rle.e);
  size_t k = 0;
  for (size_t i = 0; i < idx.p.size(); ++i) {
    if (k < covered.idx_of.size() && covered.idx_of[k] == static_cast<int64_t>(i)) {
      ++k;
      continue;
    }
    out.p.push_back(idx.p[i]);
  }
  return out;
}

CompositeMask or_rle_index(const RleMask& rle, const IndexMask& idx) {
  return CompositeMask{rle, subtract_runs(idx, rle)};
}

// --- composite decomposition ------------------------------------------------

struct Parts {
  RleMask runs;
  IndexMask points;
};

Parts as_parts(const MaskColumn& m) {
  switch (m.encoding()) {
    case MaskEncoding::Rle:
      return {m.rle(), IndexMask{{}, m.total_size()}};
    case MaskEncoding::Index:
      return {RleMask{{}, {}, m.total_size()}, m.index()};
    case MaskEncoding::Composite:
      return {m.composite().runs, m.composite().points};
    default:
      fail("as_parts: plain mask has no positional parts");
  }
}

MaskColumn make_composite(RleMask runs, IndexMask points) {
  return CompositeMask{std::move(runs), std::move(points)};
}

// AND distributes over the OR that a composite layout denotes:
// (r1 | p1) & (r2 | p2) = (r1 & r2) | (r1 & p2) | (p1 & r2) | (p1 & p2).
// The four sub-terms are independent of one another.
MaskColumn and_composite(const MaskColumn& a, const MaskColumn& b) {
  Parts pa = as_parts(a);
  Parts pb = as_parts(b);
  RleMask rr = and_rle_rle(pa.runs, pb.runs);
  IndexMask rp = and_rle_index(pa.runs, pb.points);
  IndexMask pr = and_rle_index(pb.runs, pa.points);
  IndexMask pp = and_index_index(pa.points, pb.points);
  IndexMask pts = or_index_index(or_index_index(rp, pr), pp);
  return make_composite(std::move(rr), std::move(pts));
}

MaskColumn or_composite(const MaskColumn& a, const MaskColumn& b) {
  Parts pa = as_parts(a);
  Parts pb = as_parts(b);
  RleMask runs = or_rle_rle(pa.runs, pb.runs);
  IndexMask pts = subtract_runs(or_index_index(pa.points, pb.points), runs);
  return make_composite(std::move(runs), std::move(pts));
}

// composite & plain / composite | plain produce basic encodings; a Plain
// tensor cannot sit inside a composite layout
MaskColumn and_composite_plain(const CompositeMask& c, const PlainMask& p) {
  MaskColumn run_part = and_rle_plain(c.runs, p);
  IndexMask pt_part = and_plain_index(p, c.points);
  if (run_part.encoding() == MaskEncoding::Plain)
    return or_plain_index(run_part.plain(), pt_part);
  return or_index_index(run_part.index(), pt_part);
}

MaskColumn or_composite_plain(const CompositeMask& c, const PlainMask& p) {
  PlainMask with_runs = or_rle_plain(c.runs, p);
  return or_plain_index(with_runs, c.points);
}

}  // namespace

MaskColumn and_mask(const MaskColumn& m1, const MaskColumn& m2) {
  require(m1.total_size() == m2.total_size(), "and_mask: total_size mismatch");
  MaskEncoding e1 = m1.encoding(), e2 = m2.encoding();

  if (e1 == MaskEncoding::Composite || e2 == MaskEncoding::Composite) {
    if (e1 == MaskEncoding::Plain) return and_composite_plain(m2.composite(), m1.plain());
    if (e2 == MaskEncoding::Plain) return and_composite_plain(m1.composite(), m2.plain());
    return and_composite(m1, m2);
  }
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Rle)
    return and_rle_rle(m1.rle(), m2.rle());
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Plain)
    return and_rle_plain(m1.rle(), m2.plain());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Rle)
    return and_rle_plain(m2.rle(), m1.plain());
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Index)
    return and_rle_index(m1.rle(), m2.index());
  if (e1 == MaskEncoding::Index && e2 == MaskEncoding::Rle)
    return and_rle_index(m2.rle(), m1.index());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Plain)
    return and_plain_plain(m1.plain(), m2.plain());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Index)
    return and_plain_index(m1.plain(), m2.index());
  if (e1 == MaskEncoding::Index && e2 == MaskEncoding::Plain)
    return and_plain_index(m2.plain(), m1.index());
  return and_index_index(m1.index(), m2.index());
}

MaskColumn or_mask(const MaskColumn& m1, const MaskColumn& m2) {
  require(m1.total_size() == m2.total_size(), "or_mask: total_size mismatch");
  MaskEncoding e1 = m1.encoding(), e2 = m2.encoding();

  if (e1 == MaskEncoding::Composite || e2 == MaskEncoding::Composite) {
    if (e1 == MaskEncoding::Plain) return or_composite_plain(m2.composite(), m1.plain());
    if (e2 == MaskEncoding::Plain) return or_composite_plain(m1.composite(), m2.plain());
    return or_composite(m1, m2);
  }
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Rle)
    return or_rle_rle(m1.rle(), m2.rle());
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Plain)
    return or_rle_plain(m1.rle(), m2.plain());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Rle)
    return or_rle_plain(m2.rle(), m1.plain());
  if (e1 == MaskEncoding::Rle && e2 == MaskEncoding::Index)
    return or_rle_index(m1.rle(), m2.index());
  if (e1 == MaskEncoding::Index && e2 == MaskEncoding::Rle)
    return or_rle_index(m2.rle(), m1.index());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Plain)
    return or_plain_plain(m1.plain(), m2.plain());
  if (e1 == MaskEncoding::Plain && e2 == MaskEncoding::Index)
    return or_plain_index(m1.plain(), m2.index());
  if (e1 == MaskEncoding::Index && e2 == MaskEncoding::Plain)
    return or_plain_index(m2.plain(), m1.index());
  return or_index_index(m1.index(), m2.index());
}

MaskColumn not_mask(const MaskColumn& m) {
  switch (m.encoding()) {
    case MaskEncoding::Plain: {
      PlainMask out;
      out.bits.resize(m.plain().bits.size());
      for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = m.plain().bits[i] ? 0 : 1;
      return out;
    }
    case MaskEncoding::Rle: {
      auto r = enc::complement_rle(m.rle().s, m.rle().e, m.total_size());
      return RleMask{std::move(r.s), std::move(r.e), m.total_size()};
    }
    case MaskEncoding::Index: {
      auto r = enc::complement_index(m.index().p, m.total_size());
      return RleMask{std::move(r.s), std::move(r.e), m.total_size()};
    }
    case MaskEncoding::Composite: {
      // ~(runs | points) = ~runs & ~points; both complements are RLE
      const auto& c = m.composite();
      auto nr = enc::complement_rle(c.runs.s, c.runs.e, m.total_size());
      auto np = enc::complement_index(c.points.p, m.total_size());
      auto r = range_intersect(nr.s, nr.e, np.s, np.e);
      return RleMask{std::move(r.s), std::move(r.e), m.total_size()};
    }
  }
  fail("not_mask: unknown encoding");
}

}  // namespace runq::masks
