#include "runq/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "runq/kernels.hpp"

namespace runq::enc {

using kernels::bucketize;
using kernels::range_arange;
using kernels::repeat_interleave;

RangeIntersection range_intersect(std::span<const int64_t> s1, std::span<const int64_t> e1,
                                  std::span<const int64_t> s2, std::span<const int64_t> e2) {
  // the input with fewer ranges drives the bucketization
  bool swapped = s1.size() > s2.size();
  if (swapped) {
    std::swap(s1, s2);
    std::swap(e1, e2);
  }

  PosVec bin_s = bucketize(s1, e2, /*right=*/false);
  PosVec bin_e = bucketize(e1, s2, /*right=*/true);
  PosVec cnt(bin_s.size());
  for (size_t i = 0; i < cnt.size(); ++i) cnt[i] = bin_e[i] - bin_s[i];

  PosVec arange = kernels::iota(static_cast<int64_t>(cnt.size()));
  PosVec idx1 = repeat_interleave(std::span<const int64_t>(arange),
                                  std::span<const int64_t>(cnt));
  PosVec idx2 = range_arange(bin_s, cnt);

  RangeIntersection out;
  out.s.resize(idx1.size());
  out.e.resize(idx1.size());
  for (size_t k = 0; k < idx1.size(); ++k) {
    auto i = static_cast<size_t>(idx1[k]);
    auto j = static_cast<size_t>(idx2[k]);
    out.s[k] = std::max(s1[i], s2[j]);
    out.e[k] = std::min(e1[i], e2[j]);
  }
  out.idx1 = swapped ? std::move(idx2) : std::move(idx1);
  out.idx2 = swapped ? std::move(idx1) : std::move(idx2);
  return out;
}

IndexRleIntersection idx_in_rle(std::span<const int64_t> p, std::span<const int64_t> s,
                                std::span<const int64_t> e) {
  PosVec bin = bucketize(p, s, /*right=*/true);
  IndexRleIntersection out;
  for (size_t i = 0; i < p.size(); ++i) {
    int64_t b = bin[i] - 1;
    if (b >= 0 && p[i] <= e[static_cast<size_t>(b)]) {
      out.p_out.push_back(p[i]);
      out.run_of.push_back(b);
      out.idx_of.push_back(static_cast<int64_t>(i));
    }
  }
  return out;
}

IndexRleIntersection rle_contain_idx(std::span<const int64_t> p, std::span<const int64_t> s,
                                     std::span<const int64_t> e) {
  PosVec bin_s = bucketize(s, p, /*right=*/false);
  PosVec bin_e = bucketize(e, p, /*right=*/true);
  for (auto& b : bin_e) b -= 1;

  // keep runs that contain at least one position, then expand the position
  // index ranges they cover
  PosVec keep_s, keep_e, keep_run, counts;
  for (size_t i = 0; i < bin_s.size(); ++i) {
    if (bin_s[i] <= bin_e[i]) {
      keep_s.push_back(bin_s[i]);
      keep_e.push_back(bin_e[i]);
      keep_run.push_back(static_cast<int64_t>(i));
      counts.push_back(bin_e[i] - bin_s[i] + 1);
    }
  }
  IndexRleIntersection out;
  out.idx_of = range_arange(keep_s, counts);
  out.run_of = repeat_interleave(std::span<const int64_t>(keep_run),
                                 std::span<const int64_t>(counts));
  out.p_out = kernels::gather(p, out.idx_of);
  return out;
}

IndexIntersection idx_in_idx(std::span<const int64_t> p1, std::span<const int64_t> p2) {
  PosVec bin = bucketize(p1, p2, /*right=*/true);
  IndexIntersection out;
  for (size_t i = 0; i < p1.size(); ++i) {
    int64_t b = bin[i] - 1;
    if (b >= 0 && p1[i] == p2[static_cast<size_t>(b)]) {
      out.p_out.push_back(p1[i]);
      out.idx1.push_back(static_cast<int64_t>(i));
      out.idx2.push_back(b);
    }
  }
  return out;
}

RangeSet range_union(std::span<const int64_t> s1, std::span<const int64_t> e1,
                     std::span<const int64_t> s2, std::span<const int64_t> e2) {
  // For a union of disjoint-per-input sorted runs, merging the start lists
  // and end lists independently pairs the k-th smallest start with the k-th
  // smallest end; a break occurs where the next start clears the current
  // end by more than one.
  PosVec s(s1.size() + s2.size()), e(e1.size() + e2.size());
  std::merge(s1.begin(), s1.end(), s2.begin(), s2.end(), s.begin());
  std::merge(e1.begin(), e1.end(), e2.begin(), e2.end(), e.begin());

  RangeSet out;
  size_t n = s.size();
  for (size_t i = 0; i < n; ++i) {
    if (out.s.empty() || s[i] > out.e.back() + 1) {
      out.s.push_back(s[i]);
      out.e.push_back(e[i]);
    } else {
      out.e.back() = std::max(out.e.back(), e[i]);
    }
  }
  return out;
}

PosVec merge_sorted_idx(std::span<const int64_t> p1, std::span<const int64_t> p2) {
  PosVec out;
  out.reserve(p1.size() + p2.size());
  std::merge(p1.begin(), p1.end(), p2.begin(), p2.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PosVec concat_sort_idx(std::span<const int64_t> p1, std::span<const int64_t> p2) {
  PosVec out(p1.begin(), p1.end());
  out.insert(out.end(), p2.begin(), p2.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RangeSet complement_rle(std::span<const int64_t> s, std::span<const int64_t> e, int64_t total) {
  RangeSet out;
  size_t n = s.size();
  for (size_t i = 0; i <= n; ++i) {
    int64_t cs = (i == 0) ? 0 : e[i - 1] + 1;
    int64_t ce = (i == n) ? total - 1 : s[i] - 1;
    if (cs <= ce && cs < total && ce >= 0) {
      out.s.push_back(cs);
      out.e.push_back(ce);
    }
  }
  return out;
}

RangeSet complement_index(std::span<const int64_t> p, int64_t total) {
  RangeSet out;
  size_t n = p.size();
  for (size_t i = 0; i <= n; ++i) {
    int64_t cs = (i == 0) ? 0 : p[i - 1] + 1;
    int64_t ce = (i == n) ? total - 1 : p[i] - 1;
    if (cs <= ce && cs < total && ce >= 0) {
      out.s.push_back(cs);
      out.e.push_back(ce);
    }
  }
  return out;
}

// --- conversions -------------------------------------------------------------

namespace {

void check_budget(int64_t rows, int64_t budget, const char* what) {
  if (rows > budget)
    throw ResourceError(std::string(what) + ": expansion of " + std::to_string(rows) +
                        " elements exceeds budget " + std::to_string(budget));
}

}  // namespace

IndexColumn rle_to_index(const RleColumn& c, int64_t budget) {
  int64_t rows = c.covered_rows();
  check_budget(rows, budget, "rle_to_index");
  IndexColumn out;
  out.total_size = c.total_size;
  PosVec l = c.run_lengths();
  out.p = range_arange(c.s, l);
  out.v = repeat_interleave(c.v, l);
  return out;
}

IndexMask rle_to_index(const RleMask& m, int64_t budget) {
  check_budget(m.covered_rows(), budget, "rle_to_index");
  IndexMask out;
  out.total_size = m.total_size;
  PosVec l(m.s.size());
  for (size_t i = 0; i < m.s.size(); ++i) l[i] = m.e[i] - m.s[i] + 1;
  out.p = range_arange(m.s, l);
  return out;
}

PlainColumn rle_to_plain(const RleColumn& c, double fill, int64_t budget) {
  check_budget(c.total_size, budget, "rle_to_plain");
  return dtype_dispatch(c.v.dtype(), [&](auto tag) {
    using T = decltype(tag);
    TrackedVec<T> out(static_cast<size_t>(c.total_size), static_cast<T>(fill));
    auto vs = c.v.template as<T>();
    for (size_t i = 0; i < vs.size(); ++i)
      for (int64_t r = c.s[i]; r <= c.e[i]; ++r) out[static_cast<size_t>(r)] = vs[i];
    return PlainColumn(Array::from(out));
  });
}

PlainMask rle_to_plain(const RleMask& m, int64_t budget) {
  check_budget(m.total_size, budget, "rle_to_plain");
  PlainMask out;
  out.bits.assign(static_cast<size_t>(m.total_size), 0);
  for (size_t i = 0; i < m.s.size(); ++i)
    for (int64_t r = m.s[i]; r <= m.e[i]; ++r) out.bits[static_cast<size_t>(r)] = 1;
  return out;
}

RleColumn plain_to_rle(const PlainColumn& c) {
  auto boundaries = kernels::adjacent_ne(c.values);
  RleColumn out;
  out.total_size = c.size();
  PosVec starts;
  for (size_t i = 0; i < boundaries.size(); ++i)
    if (boundaries[i]) starts.push_back(static_cast<int64_t>(i));
  out.s = starts;
  out.e.resize(starts.size());
  for (size_t i = 0; i < starts.size(); ++i)
    out.e[i] = (i + 1 < starts.size()) ? starts[i + 1] - 1 : c.size() - 1;
  Array raw = kernels::gather(c.values, starts);
  // runs carry decoded values so the RLE column stands on its own
  if (c.center) {
    raw = raw.cast(c.logical);
    dtype_dispatch(raw.dtype(), [&](auto tag) {
      using T = decltype(tag);
      if constexpr (std::is_integral_v<T>) {
        auto sp = raw.template as_mut<T>();
        for (auto& x : sp) x = static_cast<T>(x + *c.center);
      }
    });
  } else if (c.values.dtype() != c.logical) {
    raw = raw.cast(c.logical);
  }
  out.v = raw;
  return out;
}

RlePlusIndexColumn plain_to_rle_index(const PlainColumn& c, int64_t min_run) {
  require(min_run >= 2, "plain_to_rle_index: min_run must be >= 2");
  RleColumn all = plain_to_rle(c);
  RlePlusIndexColumn out;
  out.runs.total_size = c.size();
  out.runs.v = Array::empty(all.v.dtype());
  out.points.total_size = c.size();
  out.points.v = Array::empty(all.v.dtype());

  PosVec long_idx, short_idx, short_lens;
  for (int64_t i = 0; i < all.run_count(); ++i) {
    auto u = static_cast<size_t>(i);
    if (all.run_length(i) >= min_run) {
      long_idx.push_back(i);
      out.runs.s.push_back(all.s[u]);
      out.runs.e.push_back(all.e[u]);
    } else {
      short_idx.push_back(i);
      short_lens.push_back(all.run_length(i));
    }
  }
  out.runs.v = kernels::gather(all.v, long_idx);
  PosVec short_starts = kernels::gather(std::span<const int64_t>(all.s), short_idx);
  out.points.p = range_arange(short_starts, short_lens);
  Array short_vals = kernels::gather(all.v, short_idx);
  out.points.v = repeat_interleave(short_vals, short_lens);
  return out;
}

namespace {

DType narrowest_int_type(__int128 lo, __int128 hi) {
  auto mag = std::max<__int128>(lo < 0 ? -lo : lo, hi < 0 ? -hi : hi);
  if (mag <= std::numeric_limits<int8_t>::max()) return DType::I8;
  if (mag <= std::numeric_limits<int16_t>::max()) return DType::I16;
  if (mag <= std::numeric_limits<int32_t>::max()) return DType::I32;
  return DType::I64;
}

}  // namespace

PlainPlusIndexColumn plain_to_plain_index(const PlainColumn& c, double trim_fraction) {
  require(trim_fraction >= 0.0 && trim_fraction < 0.5,
          "plain_to_plain_index: trim_fraction must be in [0, 0.5)");
  PlainPlusIndexColumn out;
  out.outliers.total_size = c.size();

  if (dtype_is_float(c.logical) || c.size() == 0) {
    out.base = c;
    out.outliers.v = Array::empty(c.logical);
    return out;
  }

  TrackedVec<int64_t> decoded = c.values.to_i64();
  if (c.center)
    for (auto& x : decoded) x += *c.center;

  TrackedVec<int64_t> sorted = decoded;
  std::sort(sorted.begin(), sorted.end());
  int64_t n = c.size();
  auto k = static_cast<int64_t>(trim_fraction * static_cast<double>(n));
  int64_t lo = sorted[static_cast<size_t>(k)];
  int64_t hi = sorted[static_cast<size_t>(n - 1 - k)];

  // mid-range reference, rounded toward zero
  auto center = static_cast<int64_t>((static_cast<__int128>(lo) + hi) / 2);
  DType narrow = narrowest_int_type(static_cast<__int128>(lo) - center,
                                    static_cast<__int128>(hi) - center);

  int64_t min_rep = 0, max_rep = 0;
  dtype_dispatch(narrow, [&](auto tag) {
    using T = decltype(tag);
    if constexpr (std::is_integral_v<T>) {
      min_rep = std::numeric_limits<T>::min();
      max_rep = std::numeric_limits<T>::max();
    }
  });

  TrackedVec<int64_t> base(decoded.size());
  for (size_t i = 0; i < decoded.size(); ++i) {
    __int128 centered = static_cast<__int128>(decoded[i]) - center;
    if (centered < min_rep || centered > max_rep) {
      out.outliers.p.push_back(static_cast<int64_t>(i));
      base[i] = 0;  // placeholder; the outlier shadows it
    } else {
      base[i] = static_cast<int64_t>(centered);
    }
  }
  PosVec outlier_rows = out.outliers.p;
  TrackedVec<int64_t> ov(outlier_rows.size());
  for (size_t i = 0; i < outlier_rows.size(); ++i)
    ov[i] = decoded[static_cast<size_t>(outlier_rows[i])];
  out.outliers.v = Array::from(ov).cast(c.logical);
  out.base = PlainColumn(Array::from(base).cast(narrow), c.logical, center);
  return out;
}

RleMask plain_mask_to_rle(const PlainMask& m) {
  RleMask out;
  out.total_size = m.size();
  for (size_t i = 0; i < m.bits.size(); ++i) {
    bool bit = m.bits[i] != 0;
    bool prev = i > 0 && m.bits[i - 1] != 0;
    if (bit && !prev) out.s.push_back(static_cast<int64_t>(i));
    if (!bit && prev) out.e.push_back(static_cast<int64_t>(i) - 1);
  }
  if (out.s.size() > out.e.size()) out.e.push_back(m.size() - 1);
  return out;
}

IndexMask plain_mask_to_index(const PlainMask& m) {
  IndexMask out;
  out.total_size = m.size();
  for (size_t i = 0; i < m.bits.size(); ++i)
    if (m.bits[i]) out.p.push_back(static_cast<int64_t>(i));
  return out;
}

RleColumn compact_rle(const RleColumn& c) {
  RleColumn out;
  out.v = c.v;
  PosVec l = c.run_lengths();
  out.s = kernels::cumsum(l, /*exclusive=*/true);
  out.e.resize(l.size());
  for (size_t i = 0; i < l.size(); ++i) out.e[i] = out.s[i] + l[i] - 1;
  out.total_size = c.covered_rows();
  return out;
}

Column compact_rle_index(const RlePlusIndexColumn& c) {
  // merge run segments and points in position order, then re-base each
  // segment at the running covered count
  struct Seg {
    int64_t s, e;
    bool is_run;
    int64_t src;
  };
  std::vector<Seg> segs;
  segs.reserve(c.runs.s.size() + c.points.p.size());
  for (size_t i = 0; i < c.runs.s.size(); ++i)
    segs.push_back({c.runs.s[i], c.runs.e[i], true, static_cast<int64_t>(i)});
  for (size_t i = 0; i < c.points.p.size(); ++i)
    segs.push_back({c.points.p[i], c.points.p[i], false, static_cast<int64_t>(i)});
  std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.s < b.s; });

  RlePlusIndexColumn out;
  PosVec run_src, point_src;
  int64_t at = 0;
  for (const auto& g : segs) {
    int64_t len = g.e - g.s + 1;
    if (g.is_run) {
      out.runs.s.push_back(at);
      out.runs.e.push_back(at + len - 1);
      run_src.push_back(g.src);
    } else {
      out.points.p.push_back(at);
      point_src.push_back(g.src);
    }
    at += len;
  }
  out.runs.v = kernels::gather(c.runs.v, run_src);
  out.points.v = kernels::gather(c.points.v, point_src);
  out.runs.total_size = at;
  out.points.total_size = at;
  return out;
}

}  // namespace runq::enc
