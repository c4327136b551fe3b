#include "runq/join.hpp"

#include <bit>
#include <cstring>

#include "runq/align.hpp"
#include "runq/kernels.hpp"

namespace runq::joins {

int64_t JoinIndex::expanded_rows() const {
  if (!is_rle()) return static_cast<int64_t>(index().rows.size());
  const auto& r = rle();
  int64_t n = 0;
  for (size_t i = 0; i < r.s.size(); ++i) n += r.e[i] - r.s[i] + 1;
  return n;
}

PosVec expand_join_index(const JoinIndex& j) {
  if (!j.is_rle()) return j.index().rows;
  const auto& r = j.rle();
  PosVec l(r.s.size());
  for (size_t i = 0; i < r.s.size(); ++i) l[i] = r.e[i] - r.s[i] + 1;
  return kernels::range_arange(r.s, l);
}

namespace {

// Join keys are compared in a common domain: any float side pulls both to
// f64, otherwise i64. The hash covers the raw bit pattern.
TrackedVec<uint64_t> key_bits(const Array& v, bool as_float) {
  TrackedVec<uint64_t> out(static_cast<size_t>(v.size()));
  if (as_float) {
    auto x = v.to_f64();
    for (size_t i = 0; i < x.size(); ++i) {
      double val = x[i] == 0.0 ? 0.0 : x[i];  // fold -0.0 into +0.0
      out[i] = std::bit_cast<uint64_t>(val);
    }
  } else {
    auto x = v.to_i64();
    for (size_t i = 0; i < x.size(); ++i) out[i] = static_cast<uint64_t>(x[i]);
  }
  return out;
}

uint64_t mix_hash(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Chained hash table over build keys; chains keep insertion order so probe
// output is deterministic.
class HashTable {
public:
  explicit HashTable(std::span<const uint64_t> keys) : keys_(keys) {
    size_t cap = 16;
    while (cap < keys.size() * 2) cap <<= 1;
    mask_ = cap - 1;
    heads_.assign(cap, -1);
    tails_.assign(cap, -1);
    next_.assign(keys.size(), -1);
    for (size_t i = 0; i < keys.size(); ++i) {
      size_t b = mix_hash(keys[i]) & mask_;
      if (heads_[b] < 0) {
        heads_[b] = static_cast<int64_t>(i);
      } else {
        next_[static_cast<size_t>(tails_[b])] = static_cast<int64_t>(i);
      }
      tails_[b] = static_cast<int64_t>(i);
    }
  }

  template <class F>
  void for_each_match(uint64_t key, F&& f) const {
    size_t b = mix_hash(key) & mask_;
    for (int64_t at = heads_[b]; at >= 0; at = next_[static_cast<size_t>(at)]) {
      if (keys_[static_cast<size_t>(at)] == key) f(at);
    }
  }

private:
  std::span<const uint64_t> keys_;
  size_t mask_ = 0;
  PosVec heads_, tails_, next_;
};

// Per-side view of the column as hashable entries.
struct JoinEntries {
  Array values;   // one value per entry (run, point, or row)
  bool is_rle = false;
  PosVec s, e;    // when is_rle
  PosVec rows;    // otherwise
  int64_t count() const { return values.size(); }
  int64_t row_at(int64_t i) const { return rows[static_cast<size_t>(i)]; }
  int64_t len_at(int64_t i) const {
    return is_rle ? e[static_cast<size_t>(i)] - s[static_cast<size_t>(i)] + 1 : 1;
  }
};

JoinEntries entries_of(const Column& col) {
  JoinEntries je;
  switch (col.encoding()) {
    case Encoding::Rle: {
      je.is_rle = true;
      je.values = col.rle().v;
      je.s = col.rle().s;
      je.e = col.rle().e;
      return je;
    }
    case Encoding::Index: {
      je.values = col.index().v;
      je.rows = col.index().p;
      return je;
    }
    case Encoding::Plain: {
      auto rows = to_rows(col);
      je.values = std::move(rows.values);
      je.rows = std::move(rows.positions);
      return je;
    }
    default: {
      // composites join through their basic normalization
      return entries_of(compute::normalize_basic(col));
    }
  }
}

// Accumulates one side's join index entries.
struct SideBuilder {
  bool is_rle;
  UnsortedIndexJoin idx;
  UnsortedRleJoin rle;

  explicit SideBuilder(bool rle_side) : is_rle(rle_side) {}

  void add_row(int64_t row, int64_t repeat) {
    if (is_rle) {
      for (int64_t k = 0; k < repeat; ++k) {
        rle.v.push_back(-1);
        rle.s.push_back(row);
        rle.e.push_back(row);
      }
    } else {
      idx.rows.insert(idx.rows.end(), static_cast<size_t>(repeat), row);
    }
  }

  void add_range(int64_t run, int64_t s, int64_t e, int64_t repeat) {
    for (int64_t k = 0; k < repeat; ++k) {
      rle.v.push_back(run);
      rle.s.push_back(s);
      rle.e.push_back(e);
    }
  }

  JoinIndex finish() {
    if (is_rle) return JoinIndex(std::move(rle));
    return JoinIndex(std::move(idx));
  }
};

}  // namespace

ProbeHits hash_build_probe(const Array& build_values, const Array& probe_values) {
  bool as_float =
      dtype_is_float(build_values.dtype()) || dtype_is_float(probe_values.dtype());
  auto bk = key_bits(build_values, as_float);
  auto pk = key_bits(probe_values, as_float);
  HashTable ht(bk);
  ProbeHits out;
  for (size_t p = 0; p < pk.size(); ++p) {
    ht.for_each_match(pk[p], [&](int64_t b) {
      out.build_pos.push_back(b);
      out.probe_pos.push_back(static_cast<int64_t>(p));
    });
  }
  return out;
}

JoinResult get_join_index(const Column& left, const Column& right) {
  JoinEntries le = entries_of(left);
  JoinEntries re = entries_of(right);

  // build on the side with fewer entries; on ties the left side probes
  bool build_right = re.count() <= le.count();
  JoinEntries& build = build_right ? re : le;
  JoinEntries& probe = build_right ? le : re;

  bool as_float = dtype_is_float(le.values.dtype()) || dtype_is_float(re.values.dtype());
  auto bk = key_bits(build.values, as_float);
  auto pk = key_bits(probe.values, as_float);
  HashTable ht(bk);

  SideBuilder probe_out(probe.is_rle);
  SideBuilder build_out(build.is_rle);
  int64_t cardinality = 0;

  for (int64_t p = 0; p < probe.count(); ++p) {
    ht.for_each_match(pk[static_cast<size_t>(p)], [&](int64_t b) {
      int64_t lp = probe.len_at(p);
      int64_t lb = build.len_at(b);
      cardinality += lp * lb;
      if (!probe.is_rle && !build.is_rle) {
        probe_out.add_row(probe.row_at(p), 1);
        build_out.add_row(build.row_at(b), 1);
      } else if (!probe.is_rle && build.is_rle) {
        // one-to-many: the single probe row duplicates by the run length
        probe_out.add_row(probe.row_at(p), lb);
        build_out.add_range(b, build.s[static_cast<size_t>(b)],
                            build.e[static_cast<size_t>(b)], 1);
      } else if (probe.is_rle && !build.is_rle) {
        probe_out.add_range(p, probe.s[static_cast<size_t>(p)],
                            probe.e[static_cast<size_t>(p)], 1);
        build_out.add_row(build.row_at(b), lp);
      } else {
        // many-to-many: product expansion, build rows outer so the probe
        // side keeps whole ranges
        int64_t bs = build.s[static_cast<size_t>(b)];
        int64_t be = build.e[static_cast<size_t>(b)];
        for (int64_t row = bs; row <= be; ++row) {
          probe_out.add_range(p, probe.s[static_cast<size_t>(p)],
                              probe.e[static_cast<size_t>(p)], 1);
          build_out.add_range(b, row, row, lp);
        }
      }
    });
  }

  JoinResult out;
  out.cardinality = cardinality;
  if (build_right) {
    out.left = probe_out.finish();
    out.right = build_out.finish();
  } else {
    out.left = build_out.finish();
    out.right = probe_out.finish();
  }
  return out;
}

// --- apply ------------------------------------------------------------------

namespace {

Column apply_index_join(const Column& col, const UnsortedIndexJoin& j) {
  switch (col.encoding()) {
    case Encoding::Plain:
    case Encoding::PlainPlusIndex:
      return PlainColumn(kernels::gather(decode_full(col), j.rows));
    case Encoding::Rle: {
      const auto& c = col.rle();
      PosVec bin = kernels::bucketize(j.rows, c.s, /*right=*/true);
      PosVec run(j.rows.size());
      for (size_t i = 0; i < j.rows.size(); ++i) {
        int64_t b = bin[i] - 1;
        require(b >= 0 && j.rows[i] <= c.e[static_cast<size_t>(b)],
                "apply_join_index: reference outside covered rows");
        run[i] = b;
      }
      return PlainColumn(kernels::gather(c.v, run));
    }
    case Encoding::Index: {
      const auto& c = col.index();
      PosVec bin = kernels::bucketize(j.rows, c.p, /*right=*/true);
      PosVec at(j.rows.size());
      for (size_t i = 0; i < j.rows.size(); ++i) {
        int64_t b = bin[i] - 1;
        require(b >= 0 && c.p[static_cast<size_t>(b)] == j.rows[i],
                "apply_join_index: reference outside covered rows");
        at[i] = b;
      }
      return PlainColumn(kernels::gather(c.v, at));
    }
    case Encoding::RlePlusIndex:
      return apply_index_join(compute::normalize_basic(col), j);
  }
  fail("apply_join_index: unknown encoding");
}

Column apply_rle_join(const Column& col, const UnsortedRleJoin& j) {
  int64_t out_rows = 0;
  PosVec lens(j.s.size());
  for (size_t i = 0; i < j.s.size(); ++i) {
    lens[i] = j.e[i] - j.s[i] + 1;
    out_rows += lens[i];
  }

  switch (col.encoding()) {
    case Encoding::Plain:
    case Encoding::PlainPlusIndex: {
      PosVec flat = kernels::range_arange(j.s, lens);
      return PlainColumn(kernels::gather(decode_full(col), flat));
    }
    case Encoding::Rle: {
      // bucketize the sorted data runs with each (unsorted) reference range
      // and emit the overlap fragments in output row space
      const auto& c = col.rle();
      RleColumn out;
      out.total_size = out_rows;
      PosVec src_runs;
      int64_t at = 0;
      for (size_t k = 0; k < j.s.size(); ++k) {
        int64_t qs = j.s[k], qe = j.e[k];
        PosVec b0 = kernels::bucketize(std::span<const int64_t>(&qs, 1), c.s, true);
        int64_t r = b0[0] - 1;
        require(r >= 0 && qs <= c.e[static_cast<size_t>(r)],
                "apply_join_index: range start outside covered rows");
        int64_t pos = qs;
        while (pos <= qe) {
          auto ur = static_cast<size_t>(r);
          require(r < c.run_count() && c.s[ur] <= pos,
                  "apply_join_index: range crosses a coverage gap");
          int64_t frag_end = std::min(qe, c.e[ur]);
          int64_t len = frag_end - pos + 1;
          out.s.push_back(at);
          out.e.push_back(at + len - 1);
          src_runs.push_back(r);
          at += len;
          pos = frag_end + 1;
          ++r;
        }
      }
      out.v = kernels::gather(c.v, src_runs);
      return out;
    }
    case Encoding::Index: {
      const auto& c = col.index();
      IndexColumn out;
      out.total_size = out_rows;
      int64_t at = 0;
      for (size_t k = 0; k < j.s.size(); ++k) {
        int64_t qs = j.s[k], qe = j.e[k];
        auto lo = std::lower_bound(c.p.begin(), c.p.end(), qs);
        auto hi = std::upper_bound(c.p.begin(), c.p.end(), qe);
        for (auto it = lo; it != hi; ++it)
          out.p.push_back(at + (*it - qs));
        at += qe - qs + 1;
        // gather below needs the element indices
      }
      // second pass for values, mirroring the position walk
      PosVec take;
      for (size_t k = 0; k < j.s.size(); ++k) {
        int64_t qs = j.s[k], qe = j.e[k];
        auto lo = std::lower_bound(c.p.begin(), c.p.end(), qs);
        auto hi = std::upper_bound(c.p.begin(), c.p.end(), qe);
        for (auto it = lo; it != hi; ++it)
          take.push_back(static_cast<int64_t>(it - c.p.begin()));
      }
      out.v = kernels::gather(c.v, take);
      return out;
    }
    case Encoding::RlePlusIndex:
      return apply_rle_join(compute::normalize_basic(col), j);
  }
  fail("apply_join_index: unknown encoding");
}

}  // namespace

Column apply_join_index(const Column& col, const JoinIndex& jidx) {
  if (jidx.is_rle()) return apply_rle_join(col, jidx.rle());
  return apply_index_join(col, jidx.index());
}

MaskColumn semi_join_mask(const Column& probe, const Column& build) {
  JoinEntries pe = entries_of(probe);
  JoinEntries be = entries_of(build);
  bool as_float = dtype_is_float(pe.values.dtype()) || dtype_is_float(be.values.dtype());
  auto bk = key_bits(be.values, as_float);
  auto pk = key_bits(pe.values, as_float);
  HashTable ht(bk);

  std::vector<uint8_t> hit(static_cast<size_t>(pe.count()), 0);
  for (int64_t p = 0; p < pe.count(); ++p) {
    ht.for_each_match(pk[static_cast<size_t>(p)], [&](int64_t) {
      hit[static_cast<size_t>(p)] = 1;  // early dedup: one hit is enough
    });
  }

  if (pe.is_rle) {
    RleMask m;
    m.total_size = probe.total_size();
    for (int64_t i = 0; i < pe.count(); ++i) {
      if (hit[static_cast<size_t>(i)]) {
        m.s.push_back(pe.s[static_cast<size_t>(i)]);
        m.e.push_back(pe.e[static_cast<size_t>(i)]);
      }
    }
    return m;
  }
  if (probe.encoding() == Encoding::Plain) {
    PlainMask m;
    m.bits.assign(static_cast<size_t>(probe.total_size()), 0);
    for (int64_t i = 0; i < pe.count(); ++i)
      if (hit[static_cast<size_t>(i)]) m.bits[static_cast<size_t>(pe.row_at(i))] = 1;
    return m;
  }
  IndexMask m;
  m.total_size = probe.total_size();
  for (int64_t i = 0; i < pe.count(); ++i)
    if (hit[static_cast<size_t>(i)]) m.p.push_back(pe.row_at(i));
  return m;
}

}  // namespace runq::joins
