// Independent reference implementations used as test oracles. Everything in
// here reads the raw representation fields directly and computes expected
// results with naive loops; nothing routes through the kernels or operators
// under test.
#pragma once

#include <map>
#include <random>
#include <vector>

#include "runq/column.hpp"

namespace oracle {

using Bits = std::vector<uint8_t>;
using Rng = std::mt19937_64;

// --- raw-field decoders ------------------------------------------------------

inline Bits mask_bits(const runq::MaskColumn& m) {
  Bits bits(static_cast<size_t>(m.total_size()), 0);
  switch (m.encoding()) {
    case runq::MaskEncoding::Plain: {
      const auto& pm = m.plain();
      for (size_t i = 0; i < pm.bits.size(); ++i) bits[i] = pm.bits[i] ? 1 : 0;
      break;
    }
    case runq::MaskEncoding::Rle: {
      const auto& rm = m.rle();
      for (size_t k = 0; k < rm.s.size(); ++k)
        for (int64_t r = rm.s[k]; r <= rm.e[k]; ++r) bits[static_cast<size_t>(r)] = 1;
      break;
    }
    case runq::MaskEncoding::Index: {
      for (auto p : m.index().p) bits[static_cast<size_t>(p)] = 1;
      break;
    }
    case runq::MaskEncoding::Composite: {
      const auto& cm = m.composite();
      for (size_t k = 0; k < cm.runs.s.size(); ++k)
        for (int64_t r = cm.runs.s[k]; r <= cm.runs.e[k]; ++r)
          bits[static_cast<size_t>(r)] = 1;
      for (auto p : cm.points.p) bits[static_cast<size_t>(p)] = 1;
      break;
    }
  }
  return bits;
}

// position -> value map over covered rows, decoded per the representation
// definitions (centering folded in, outliers shadowing the base)
inline std::map<int64_t, double> column_values(const runq::Column& c) {
  std::map<int64_t, double> out;
  auto plain_vals = [](const runq::PlainColumn& p, std::map<int64_t, double>& dst) {
    for (int64_t i = 0; i < p.size(); ++i) {
      double v = p.values.f64_at(i);
      if (p.center) v += static_cast<double>(*p.center);
      dst[i] = v;
    }
  };
  switch (c.encoding()) {
    case runq::Encoding::Plain: plain_vals(c.plain(), out); break;
    case runq::Encoding::Rle: {
      const auto& r = c.rle();
      for (int64_t k = 0; k < r.run_count(); ++k)
        for (int64_t row = r.s[static_cast<size_t>(k)]; row <= r.e[static_cast<size_t>(k)];
             ++row)
          out[row] = r.v.f64_at(k);
      break;
    }
    case runq::Encoding::Index: {
      const auto& ix = c.index();
      for (int64_t k = 0; k < ix.point_count(); ++k) out[ix.p[static_cast<size_t>(k)]] = ix.v.f64_at(k);
      break;
    }
    case runq::Encoding::PlainPlusIndex: {
      const auto& px = c.plain_index();
      plain_vals(px.base, out);
      for (int64_t k = 0; k < px.outliers.point_count(); ++k)
        out[px.outliers.p[static_cast<size_t>(k)]] = px.outliers.v.f64_at(k);
      break;
    }
    case runq::Encoding::RlePlusIndex: {
      const auto& rx = c.rle_index();
      for (int64_t k = 0; k < rx.runs.run_count(); ++k)
        for (int64_t row = rx.runs.s[static_cast<size_t>(k)];
             row <= rx.runs.e[static_cast<size_t>(k)]; ++row)
          out[row] = rx.runs.v.f64_at(k);
      for (int64_t k = 0; k < rx.points.point_count(); ++k)
        out[rx.points.p[static_cast<size_t>(k)]] = rx.points.v.f64_at(k);
      break;
    }
  }
  return out;
}

// --- bitmap set algebra -------------------------------------------------------

inline Bits band(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}
inline Bits bor(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}
inline Bits bnot(const Bits& a) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ? 0 : 1;
  return out;
}

inline bool same_true_set(const runq::MaskColumn& got, const Bits& want) {
  return mask_bits(got) == want;
}

// --- random generators ---------------------------------------------------------

// sorted, disjoint run list over [0, n)
inline std::pair<runq::PosVec, runq::PosVec> random_ranges(Rng& rng, int64_t n,
                                                           double density = 0.4) {
  runq::PosVec s, e;
  std::uniform_int_distribution<int64_t> seg(1, std::max<int64_t>(1, n / 8));
  std::bernoulli_distribution covered(density);
  int64_t at = 0;
  while (at < n) {
    int64_t len = std::min(seg(rng), n - at);
    if (covered(rng)) {
      s.push_back(at);
      e.push_back(at + len - 1);
    }
    at += len;
  }
  return {std::move(s), std::move(e)};
}

inline runq::PosVec random_positions(Rng& rng, int64_t n, double density = 0.2) {
  runq::PosVec p;
  std::bernoulli_distribution keep(density);
  for (int64_t i = 0; i < n; ++i)
    if (keep(rng)) p.push_back(i);
  return p;
}

inline runq::MaskColumn random_mask(Rng& rng, runq::MaskEncoding enc, int64_t n) {
  using runq::MaskEncoding;
  switch (enc) {
    case MaskEncoding::Plain: {
      runq::PlainMask m;
      std::bernoulli_distribution bit(0.5);
      m.bits.resize(static_cast<size_t>(n));
      for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
      return m;
    }
    case MaskEncoding::Rle: {
      auto [s, e] = random_ranges(rng, n);
      return runq::RleMask{std::move(s), std::move(e), n};
    }
    case MaskEncoding::Index: {
      return runq::IndexMask{random_positions(rng, n), n};
    }
    case MaskEncoding::Composite: {
      auto [s, e] = random_ranges(rng, n, 0.3);
      runq::RleMask runs{std::move(s), std::move(e), n};
      // points live strictly in the gaps
      Bits covered(static_cast<size_t>(n), 0);
      for (size_t k = 0; k < runs.s.size(); ++k)
        for (int64_t r = runs.s[k]; r <= runs.e[k]; ++r) covered[static_cast<size_t>(r)] = 1;
      runq::IndexMask pts{{}, n};
      std::bernoulli_distribution keep(0.15);
      for (int64_t i = 0; i < n; ++i)
        if (!covered[static_cast<size_t>(i)] && keep(rng)) pts.p.push_back(i);
      return runq::CompositeMask{std::move(runs), std::move(pts)};
    }
  }
  runq::fail("random_mask: unknown encoding");
}

inline runq::Array random_values(Rng& rng, int64_t count, bool float_vals,
                                 int64_t domain = 50) {
  if (float_vals) {
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    runq::TrackedVec<double> v(static_cast<size_t>(count));
    for (auto& x : v) x = d(rng);
    return runq::Array::from(v);
  }
  std::uniform_int_distribution<int64_t> d(-domain, domain);
  runq::TrackedVec<int64_t> v(static_cast<size_t>(count));
  for (auto& x : v) x = d(rng);
  return runq::Array::from(v);
}

// `gaps` only affects position-explicit encodings; Plain always covers all rows.
inline runq::Column random_column(Rng& rng, runq::Encoding enc, int64_t n,
                                  bool float_vals = false, bool gaps = true,
                                  int64_t domain = 50) {
  using runq::Encoding;
  switch (enc) {
    case Encoding::Plain: {
      return runq::PlainColumn(random_values(rng, n, float_vals, domain));
    }
    case Encoding::Rle: {
      auto [s, e] = random_ranges(rng, n, gaps ? 0.5 : 1.0);
      int64_t runs = static_cast<int64_t>(s.size());
      return runq::RleColumn{random_values(rng, runs, float_vals, domain), std::move(s),
                             std::move(e), n};
    }
    case Encoding::Index: {
      auto p = random_positions(rng, n, gaps ? 0.25 : 1.0);
      int64_t count = static_cast<int64_t>(p.size());
      return runq::IndexColumn{random_values(rng, count, float_vals, domain), std::move(p),
                               n};
    }
    case Encoding::PlainPlusIndex: {
      // narrow int8 base plus sparse wide outliers
      std::uniform_int_distribution<int64_t> small(-100, 100);
      std::uniform_int_distribution<int64_t> big(1'000'000, 2'000'000);
      std::bernoulli_distribution is_outlier(0.05);
      runq::TrackedVec<int8_t> base(static_cast<size_t>(n));
      runq::PosVec op;
      runq::TrackedVec<int64_t> ov;
      for (int64_t i = 0; i < n; ++i) {
        if (is_outlier(rng)) {
          base[static_cast<size_t>(i)] = 0;
          op.push_back(i);
          ov.push_back(big(rng));
        } else {
          base[static_cast<size_t>(i)] = static_cast<int8_t>(small(rng) / 2);
        }
      }
      runq::PlainPlusIndexColumn c;
      c.base = runq::PlainColumn(runq::Array::from(base), runq::DType::I64);
      c.outliers = runq::IndexColumn{runq::Array::from(ov), std::move(op), n};
      return c;
    }
    case Encoding::RlePlusIndex: {
      auto [s, e] = random_ranges(rng, n, 0.35);
      runq::RleColumn runs{random_values(rng, static_cast<int64_t>(s.size()), float_vals,
                                         domain),
                           s, e, n};
      Bits covered(static_cast<size_t>(n), 0);
      for (size_t k = 0; k < s.size(); ++k)
        for (int64_t r = s[k]; r <= e[k]; ++r) covered[static_cast<size_t>(r)] = 1;
      runq::PosVec pp;
      std::bernoulli_distribution keep(0.2);
      for (int64_t i = 0; i < n; ++i)
        if (!covered[static_cast<size_t>(i)] && (!gaps || keep(rng))) pp.push_back(i);
      int64_t count = static_cast<int64_t>(pp.size());
      runq::IndexColumn pts{random_values(rng, count, float_vals, domain), std::move(pp), n};
      return runq::RlePlusIndexColumn{std::move(runs), std::move(pts)};
    }
  }
  runq::fail("random_column: unknown encoding");
}

inline bool approx(double a, double b, double rel = 1e-9) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace oracle
