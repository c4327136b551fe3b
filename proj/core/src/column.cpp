#include "runq/column.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "runq/kernels.hpp"

namespace runq {

std::string_view encoding_name(Encoding e) {
  switch (e) {
    case Encoding::Plain: return "plain";
    case Encoding::Rle: return "rle";
    case Encoding::Index: return "index";
    case Encoding::PlainPlusIndex: return "plain+index";
    case Encoding::RlePlusIndex: return "rle+index";
  }
  return "?";
}

std::string_view mask_encoding_name(MaskEncoding e) {
  switch (e) {
    case MaskEncoding::Plain: return "plain";
    case MaskEncoding::Rle: return "rle";
    case MaskEncoding::Index: return "index";
    case MaskEncoding::Composite: return "rle+index";
  }
  return "?";
}

PosVec RleColumn::run_lengths() const {
  PosVec l(s.size());
  for (size_t i = 0; i < s.size(); ++i) l[i] = e[i] - s[i] + 1;
  return l;
}

int64_t RleColumn::covered_rows() const {
  int64_t n = 0;
  for (size_t i = 0; i < s.size(); ++i) n += e[i] - s[i] + 1;
  return n;
}

int64_t RleMask::covered_rows() const {
  int64_t n = 0;
  for (size_t i = 0; i < s.size(); ++i) n += e[i] - s[i] + 1;
  return n;
}

Encoding Column::encoding() const {
  return visit([](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) return Encoding::Plain;
    else if constexpr (std::is_same_v<T, RleColumn>) return Encoding::Rle;
    else if constexpr (std::is_same_v<T, IndexColumn>) return Encoding::Index;
    else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) return Encoding::PlainPlusIndex;
    else return Encoding::RlePlusIndex;
  });
}

int64_t Column::total_size() const {
  return visit([](const auto& c) -> int64_t {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) return c.size();
    else if constexpr (std::is_same_v<T, RleColumn>) return c.total_size;
    else if constexpr (std::is_same_v<T, IndexColumn>) return c.total_size;
    else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) return c.size();
    else return c.total_size();
  });
}

int64_t Column::covered_rows() const {
  return visit([](const auto& c) -> int64_t {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) return c.size();
    else if constexpr (std::is_same_v<T, RleColumn>) return c.covered_rows();
    else if constexpr (std::is_same_v<T, IndexColumn>) return c.point_count();
    else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) return c.size();
    else return c.runs.covered_rows() + c.points.point_count();
  });
}

DType Column::value_type() const {
  return visit([](const auto& c) -> DType {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) return c.logical;
    else if constexpr (std::is_same_v<T, RleColumn>) return c.v.dtype();
    else if constexpr (std::is_same_v<T, IndexColumn>) return c.v.dtype();
    else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) return c.logical();
    else return c.runs.v.dtype();
  });
}

MaskEncoding MaskColumn::encoding() const {
  return visit([](const auto& m) {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, PlainMask>) return MaskEncoding::Plain;
    else if constexpr (std::is_same_v<T, RleMask>) return MaskEncoding::Rle;
    else if constexpr (std::is_same_v<T, IndexMask>) return MaskEncoding::Index;
    else return MaskEncoding::Composite;
  });
}

int64_t MaskColumn::total_size() const {
  return visit([](const auto& m) -> int64_t {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, PlainMask>) return m.size();
    else if constexpr (std::is_same_v<T, CompositeMask>) return m.total_size();
    else return m.total_size;
  });
}

int64_t MaskColumn::true_count() const {
  return visit([](const auto& m) -> int64_t {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, PlainMask>) {
      int64_t n = 0;
      for (auto b : m.bits) n += (b != 0);
      return n;
    } else if constexpr (std::is_same_v<T, RleMask>) {
      return m.covered_rows();
    } else if constexpr (std::is_same_v<T, IndexMask>) {
      return static_cast<int64_t>(m.p.size());
    } else {
      return m.runs.covered_rows() + static_cast<int64_t>(m.points.p.size());
    }
  });
}

// --- validate -------------------------------------------------------------

namespace {

void check_ranges(const PosVec& s, const PosVec& e, int64_t total,
                  const char* what, std::vector<std::string>& out) {
  if (s.size() != e.size()) {
    out.push_back(std::string(what) + ": start/end length mismatch");
    return;
  }
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] > e[i])
      out.push_back(std::string(what) + ": inverted run at i=" + std::to_string(i));
    if (i + 1 < s.size() && s[i + 1] < e[i] + 1)
      out.push_back(std::string(what) + ": overlap at i=" + std::to_string(i));
  }
  if (!s.empty()) {
    if (s.front() < 0) out.push_back(std::string(what) + ": negative start at i=0");
    if (e.back() >= total)
      out.push_back(std::string(what) + ": end beyond total_size at i=" +
                    std::to_string(s.size() - 1));
  }
}

void check_positions(const PosVec& p, int64_t total, const char* what,
                     std::vector<std::string>& out) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (i + 1 < p.size() && p[i + 1] < p[i] + 1)
      out.push_back(std::string(what) + ": non-strict position at i=" + std::to_string(i + 1));
  }
  if (!p.empty()) {
    if (p.front() < 0) out.push_back(std::string(what) + ": negative position at i=0");
    if (p.back() >= total)
      out.push_back(std::string(what) + ": position beyond total_size at i=" +
                    std::to_string(p.size() - 1));
  }
}

// No point of `p` may fall inside any run of (s, e).
void check_disjoint(const PosVec& p, const PosVec& s, const PosVec& e,
                    std::vector<std::string>& out) {
  for (size_t i = 0; i < p.size(); ++i) {
    auto it = std::upper_bound(s.begin(), s.end(), p[i]);
    if (it != s.begin()) {
      size_t run = static_cast<size_t>(it - s.begin()) - 1;
      if (p[i] <= e[run])
        out.push_back("composite: point inside run at point i=" + std::to_string(i));
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Column& col) {
  std::vector<std::string> out;
  col.visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      if (c.center && dtype_is_float(c.values.dtype()))
        out.push_back("plain: center on floating-point storage");
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      if (c.v.size() != c.run_count())
        out.push_back("rle: value/position length mismatch");
      check_ranges(c.s, c.e, c.total_size, "rle", out);
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      if (c.v.size() != c.point_count())
        out.push_back("index: value/position length mismatch");
      check_positions(c.p, c.total_size, "index", out);
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      if (c.outliers.total_size != c.base.size())
        out.push_back("plain+index: outlier domain differs from base length");
      check_positions(c.outliers.p, c.base.size(), "plain+index outliers", out);
    } else {
      check_ranges(c.runs.s, c.runs.e, c.runs.total_size, "rle+index runs", out);
      check_positions(c.points.p, c.points.total_size, "rle+index points", out);
      if (c.runs.total_size != c.points.total_size)
        out.push_back("rle+index: part total_size mismatch");
      if (c.runs.v.size() != c.runs.run_count())
        out.push_back("rle+index: run value/position length mismatch");
      if (c.points.v.size() != c.points.point_count())
        out.push_back("rle+index: point value/position length mismatch");
      check_disjoint(c.points.p, c.runs.s, c.runs.e, out);
    }
  });
  return out;
}

std::vector<std::string> validate(const MaskColumn& mask) {
  std::vector<std::string> out;
  mask.visit([&](const auto& m) {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, PlainMask>) {
      // nothing beyond structure
    } else if constexpr (std::is_same_v<T, RleMask>) {
      check_ranges(m.s, m.e, m.total_size, "rle mask", out);
    } else if constexpr (std::is_same_v<T, IndexMask>) {
      check_positions(m.p, m.total_size, "index mask", out);
    } else {
      check_ranges(m.runs.s, m.runs.e, m.runs.total_size, "composite mask runs", out);
      check_positions(m.points.p, m.points.total_size, "composite mask points", out);
      if (m.runs.total_size != m.points.total_size)
        out.push_back("composite mask: part total_size mismatch");
      check_disjoint(m.points.p, m.runs.s, m.runs.e, out);
    }
  });
  return out;
}

// --- stats ------------------------------------------------------------------

namespace {
constexpr int64_t kPositionWidth = 8;
}

ColumnStats stats(const Column& col) {
  ColumnStats st;
  int64_t total = col.total_size();
  st.plain_bytes = total * dtype_width(col.value_type());
  col.visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      st.encoded_bytes = c.values.byte_size();
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      st.n_runs = c.run_count();
      st.encoded_bytes = c.run_count() * (dtype_width(c.v.dtype()) + 2 * kPositionWidth);
      if (st.n_runs > 0)
        st.avg_run_length = static_cast<double>(c.covered_rows()) / static_cast<double>(st.n_runs);
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      st.n_runs = c.point_count();
      st.encoded_bytes = c.point_count() * (dtype_width(c.v.dtype()) + kPositionWidth);
      if (st.n_runs > 0) st.avg_run_length = 1.0;
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      st.encoded_bytes = c.base.values.byte_size() +
                         c.outliers.point_count() *
                             (dtype_width(c.outliers.v.dtype()) + kPositionWidth);
    } else {
      st.n_runs = c.runs.run_count();
      st.encoded_bytes =
          c.runs.run_count() * (dtype_width(c.runs.v.dtype()) + 2 * kPositionWidth) +
          c.points.point_count() * (dtype_width(c.points.v.dtype()) + kPositionWidth);
      if (st.n_runs > 0)
        st.avg_run_length =
            static_cast<double>(c.runs.covered_rows()) / static_cast<double>(st.n_runs);
    }
  });
  if (st.encoded_bytes > 0)
    st.compression_ratio =
        static_cast<double>(st.plain_bytes) / static_cast<double>(st.encoded_bytes);
  return st;
}

// --- decode -----------------------------------------------------------------

Array decode_values(const PlainColumn& c) {
  if (!c.center && c.values.dtype() == c.logical) return c.values;
  Array wide = c.values.cast(c.logical);
  if (c.center) {
    require(!dtype_is_float(c.logical), "decode: center on float column");
    dtype_dispatch(wide.dtype(), [&](auto tag) {
      using T = decltype(tag);
      if constexpr (std::is_integral_v<T>) {
        auto sp = wide.as_mut<T>();
        for (auto& x : sp) x = static_cast<T>(x + *c.center);
      }
    });
  }
  return wide;
}

Array decode_values(const PlainPlusIndexColumn& c) {
  Array wide = decode_values(c.base).cast(c.logical());
  dtype_dispatch(wide.dtype(), [&](auto tag) {
    using V = decltype(tag);
    auto dst = wide.as_mut<V>();
    auto ov = c.outliers.v.template as<V>();
    for (size_t i = 0; i < c.outliers.p.size(); ++i)
      dst[static_cast<size_t>(c.outliers.p[i])] = ov[i];
  });
  return wide;
}

Array decode_full(const Column& col) {
  require(col.covered_rows() == col.total_size(),
          "decode_full: column has gaps; use to_rows");
  return col.visit([&](const auto& c) -> Array {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      return decode_values(c);
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      return kernels::repeat_interleave(c.v, c.run_lengths());
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      return c.v;
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      return decode_values(c);
    } else {
      auto rows = to_rows(Column(c));
      return std::move(rows.values);
    }
  });
}

RowsView to_rows(const Column& col) {
  RowsView out;
  col.visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      out.positions = kernels::iota(c.size());
      out.values = decode_values(c);
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      PosVec l = c.run_lengths();
      out.positions = kernels::range_arange(c.s, l);
      out.values = kernels::repeat_interleave(c.v, l);
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      out.positions = c.p;
      out.values = c.v;
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      out.positions = kernels::iota(c.size());
      out.values = decode_values(c);
    } else {
      // merge the disjoint run and point coverages in position order
      RowsView runs = to_rows(Column(c.runs));
      const auto& pts = c.points;
      size_t n = runs.positions.size() + pts.p.size();
      out.positions.resize(n);
      dtype_dispatch(runs.values.dtype(), [&](auto tag) {
        using V = decltype(tag);
        auto rv = runs.values.template as<V>();
        auto pv = pts.v.template as<V>();
        TrackedVec<V> merged(n);
        size_t i = 0, j = 0, k = 0;
        while (i < runs.positions.size() || j < pts.p.size()) {
          bool take_run = j >= pts.p.size() ||
                          (i < runs.positions.size() && runs.positions[i] < pts.p[j]);
          if (take_run) {
            out.positions[k] = runs.positions[i];
            merged[k++] = rv[i++];
          } else {
            out.positions[k] = pts.p[j];
            merged[k++] = pv[j++];
          }
        }
        out.values = Array::from(merged);
      });
    }
  });
  return out;
}

TrackedVec<uint8_t> decode_mask(const MaskColumn& m) {
  TrackedVec<uint8_t> bits(static_cast<size_t>(m.total_size()), uint8_t{0});
  m.visit([&](const auto& mm) {
    using T = std::decay_t<decltype(mm)>;
    if constexpr (std::is_same_v<T, PlainMask>) {
      for (size_t i = 0; i < mm.bits.size(); ++i) bits[i] = mm.bits[i] ? 1 : 0;
    } else if constexpr (std::is_same_v<T, RleMask>) {
      for (size_t i = 0; i < mm.s.size(); ++i)
        for (int64_t r = mm.s[i]; r <= mm.e[i]; ++r) bits[static_cast<size_t>(r)] = 1;
    } else if constexpr (std::is_same_v<T, IndexMask>) {
      for (auto p : mm.p) bits[static_cast<size_t>(p)] = 1;
    } else {
      for (size_t i = 0; i < mm.runs.s.size(); ++i)
        for (int64_t r = mm.runs.s[i]; r <= mm.runs.e[i]; ++r) bits[static_cast<size_t>(r)] = 1;
      for (auto p : mm.points.p) bits[static_cast<size_t>(p)] = 1;
    }
  });
  return bits;
}

PosVec mask_true_positions(const MaskColumn& m) {
  PosVec out;
  auto bits = decode_mask(m);
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(static_cast<int64_t>(i));
  return out;
}

// --- canonical ----------------------------------------------------------------

RleColumn canonical_rle(const RleColumn& c) {
  RleColumn out;
  out.total_size = c.total_size;
  if (c.run_count() == 0) {
    out.v = Array::empty(c.v.dtype());
    return out;
  }
  PosVec keep_idx;
  dtype_dispatch(c.v.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto vs = c.v.as<T>();
    for (int64_t i = 0; i < c.run_count(); ++i) {
      auto u = static_cast<size_t>(i);
      bool merge = i > 0 && c.s[u] == c.e[u - 1] + 1 &&
                   vs[u] == vs[static_cast<size_t>(keep_idx.back())];
      // merging extends the previous kept run instead of emitting a new one
      if (merge) {
        out.e.back() = c.e[u];
      } else {
        keep_idx.push_back(i);
        out.s.push_back(c.s[u]);
        out.e.push_back(c.e[u]);
      }
    }
  });
  out.v = kernels::gather(c.v, keep_idx);
  return out;
}

RleMask canonical_rle_mask(const RleMask& m) {
  RleMask out;
  out.total_size = m.total_size;
  for (size_t i = 0; i < m.s.size(); ++i) {
    if (!out.s.empty() && m.s[i] == out.e.back() + 1) {
      out.e.back() = m.e[i];
    } else {
      out.s.push_back(m.s[i]);
      out.e.push_back(m.e[i]);
    }
  }
  return out;
}

Column canonical(const Column& col) {
  return col.visit([&](const auto& c) -> Column {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, RleColumn>) return canonical_rle(c);
    else if constexpr (std::is_same_v<T, RlePlusIndexColumn>)
      return RlePlusIndexColumn{canonical_rle(c.runs), c.points};
    else return col;
  });
}

MaskColumn canonical(const MaskColumn& m) {
  if (m.encoding() == MaskEncoding::Rle) return canonical_rle_mask(m.rle());
  if (m.encoding() == MaskEncoding::Composite)
    return CompositeMask{canonical_rle_mask(m.composite().runs), m.composite().points};
  return m;
}

bool columns_equal(const Column& a, const Column& b) {
  if (a.encoding() != b.encoding() || a.total_size() != b.total_size()) return false;
  auto ra = to_rows(a);
  auto rb = to_rows(b);
  return ra.positions == rb.positions && ra.values.equals(rb.values);
}

// --- construction helpers ------------------------------------------------

MaskColumn full_mask(int64_t total_size) {
  RleMask m;
  m.total_size = total_size;
  if (total_size > 0) {
    m.s = {0};
    m.e = {total_size - 1};
  }
  return m;
}

MaskColumn empty_rle_mask(int64_t total_size) {
  RleMask m;
  m.total_size = total_size;
  return m;
}

PlainMask make_plain_mask(std::vector<uint8_t> bits) {
  PlainMask m;
  m.bits.assign(bits.begin(), bits.end());
  return m;
}

// --- dump ---------------------------------------------------------------------

namespace {

void write_array(std::ostream& os, const void* data, size_t bytes) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void write_pos(std::ostream& os, const PosVec& v) {
  write_array(os, v.data(), v.size() * sizeof(int64_t));
}

}  // namespace

void dump_column(const Column& col, std::ostream& os) {
  std::ostringstream hdr;
  hdr << "{\"encoding\":\"" << encoding_name(col.encoding()) << "\""
      << ",\"total_size\":" << col.total_size()
      << ",\"value_type\":\"" << dtype_name(col.value_type()) << "\""
      << ",\"widths\":{\"value\":" << dtype_width(col.value_type())
      << ",\"position\":8}";
  col.visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      hdr << ",\"storage\":\"" << dtype_name(c.values.dtype()) << "\"";
      if (c.center) hdr << ",\"center\":" << *c.center;
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      hdr << ",\"runs\":" << c.run_count();
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      hdr << ",\"points\":" << c.point_count();
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      hdr << ",\"storage\":\"" << dtype_name(c.base.values.dtype()) << "\""
          << ",\"outliers\":" << c.outliers.point_count();
      if (c.base.center) hdr << ",\"center\":" << *c.base.center;
    } else {
      hdr << ",\"runs\":" << c.runs.run_count() << ",\"points\":" << c.points.point_count();
    }
  });
  hdr << "}";
  os << hdr.str() << "\n";

  col.visit([&](const auto& c) {
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_same_v<T, PlainColumn>) {
      write_array(os, c.values.data(), static_cast<size_t>(c.values.byte_size()));
    } else if constexpr (std::is_same_v<T, RleColumn>) {
      write_array(os, c.v.data(), static_cast<size_t>(c.v.byte_size()));
      write_pos(os, c.s);
      write_pos(os, c.e);
    } else if constexpr (std::is_same_v<T, IndexColumn>) {
      write_array(os, c.v.data(), static_cast<size_t>(c.v.byte_size()));
      write_pos(os, c.p);
    } else if constexpr (std::is_same_v<T, PlainPlusIndexColumn>) {
      write_array(os, c.base.values.data(), static_cast<size_t>(c.base.values.byte_size()));
      write_array(os, c.outliers.v.data(), static_cast<size_t>(c.outliers.v.byte_size()));
      write_pos(os, c.outliers.p);
    } else {
      write_array(os, c.runs.v.data(), static_cast<size_t>(c.runs.v.byte_size()));
      write_pos(os, c.runs.s);
      write_pos(os, c.runs.e);
      write_array(os, c.points.v.data(), static_cast<size_t>(c.points.v.byte_size()));
      write_pos(os, c.points.p);
    }
  });
}

}  // namespace runq
