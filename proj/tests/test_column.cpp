#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "runq/column.hpp"
#include "runq/primitives.hpp"

using namespace runq;

TEST_CASE("validate accepts the worked RLE fixture") {
  RleColumn c{Array::of<int64_t>({0, 1}), {0, 4}, {3, 6}, 7};
  CHECK(validate(Column(c)).empty());
}

TEST_CASE("validate flags overlap and duplicate positions") {
  RleColumn overlap{Array::of<int64_t>({0, 1}), {0, 3}, {4, 6}, 7};
  auto v1 = validate(Column(overlap));
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].find("overlap at i=0") != std::string::npos);

  IndexColumn dup{Array::of<int64_t>({1, 2}), {2, 2}, 5};
  auto v2 = validate(Column(dup));
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].find("non-strict position at i=1") != std::string::npos);
}

TEST_CASE("validate covers composite disjointness") {
  RlePlusIndexColumn c;
  c.runs = RleColumn{Array::of<int64_t>({1}), {0}, {3}, 8};
  c.points = IndexColumn{Array::of<int64_t>({9}), {2}, 8};  // inside the run
  auto v = validate(Column(c));
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].find("point inside run") != std::string::npos);
}

TEST_CASE("stats: 20 bytes per run at default widths") {
  RleColumn c{Array::of<int32_t>({1, 2, 3}), {0, 2, 5}, {1, 4, 6}, 7};
  ColumnStats st = stats(Column(c));
  CHECK(st.n_runs == 3);
  CHECK(st.encoded_bytes == 60);
  CHECK(st.plain_bytes == 7 * 4);
}

TEST_CASE("stats: single full run") {
  const int64_t n = 1000;
  RleColumn c{Array::of<int32_t>({42}), {0}, {n - 1}, n};
  ColumnStats st = stats(Column(c));
  CHECK(st.avg_run_length == static_cast<double>(n));
  CHECK(st.compression_ratio == doctest::Approx(n * 4.0 / 20.0));
}

TEST_CASE("stats: realistic run profile at thousandth scale") {
  // 85,350 runs over 2,937,000 rows with 4-byte values; at 1000x this
  // profile is a 1.59 GiB encoded / 10.94 GiB plain column
  const int64_t runs = 85'350;
  const int64_t total = 2'937'000;
  RleColumn c;
  c.total_size = total;
  c.v = Array::zeros(DType::I32, runs);
  c.s.resize(static_cast<size_t>(runs));
  c.e.resize(static_cast<size_t>(runs));
  // lay the runs out evenly; stats only depends on counts
  int64_t per = total / runs;
  for (int64_t i = 0; i < runs; ++i) {
    c.s[static_cast<size_t>(i)] = i * per;
    c.e[static_cast<size_t>(i)] = (i + 1 < runs) ? (i + 1) * per - 1 : total - 1;
  }
  ColumnStats st = stats(Column(std::move(c)));
  CHECK(st.encoded_bytes == runs * 20);
  double got_ratio = static_cast<double>(st.encoded_bytes) / static_cast<double>(st.plain_bytes);
  double full_scale = 1.59 / 10.94;  // GiB ratio of the same profile at 1000x
  CHECK(std::fabs(got_ratio - full_scale) / full_scale < 0.02);
}

TEST_CASE("decode then re-encode reaches canonical form") {
  oracle::Rng rng(17);
  for (int iter = 0; iter < 100; ++iter) {
    Column c = oracle::random_column(rng, Encoding::Plain, 200);
    RleColumn r = enc::plain_to_rle(c.plain());
    // re-encode the expansion and compare canonically
    PlainColumn back = enc::rle_to_plain(r);
    RleColumn again = enc::plain_to_rle(back);
    CHECK(canonical_rle(r).s == canonical_rle(again).s);
    CHECK(canonical_rle(r).e == canonical_rle(again).e);
    CHECK(canonical_rle(r).v.equals(canonical_rle(again).v));
    // canonical form is maximal: no two adjacent runs share a value
    RleColumn cr = canonical_rle(r);
    auto vs = cr.v.as<int64_t>();
    for (size_t i = 1; i < cr.s.size(); ++i) {
      if (cr.s[i] == cr.e[i - 1] + 1) CHECK(vs[i] != vs[i - 1]);
    }
  }
}

TEST_CASE("round-trip through every encoding preserves decoded values") {
  oracle::Rng rng(19);
  for (auto enc_kind : {Encoding::Rle, Encoding::Index, Encoding::PlainPlusIndex,
                        Encoding::RlePlusIndex}) {
    for (int iter = 0; iter < 30; ++iter) {
      Column c = oracle::random_column(rng, enc_kind, 150);
      auto want = oracle::column_values(c);
      auto rows = to_rows(c);
      REQUIRE(rows.positions.size() == want.size());
      size_t i = 0;
      for (const auto& [pos, val] : want) {
        CHECK(rows.positions[i] == pos);
        CHECK(rows.values.f64_at(static_cast<int64_t>(i)) == doctest::Approx(val));
        ++i;
      }
    }
  }
}

TEST_CASE("debug dump: header parses and body length matches stats") {
  RleColumn c{Array::of<int32_t>({5, 6}), {0, 4}, {1, 6}, 8};
  Column col(std::move(c));
  std::ostringstream os;
  dump_column(col, os);
  std::string text = os.str();
  auto nl = text.find('\n');
  REQUIRE(nl != std::string::npos);
  std::string header = text.substr(0, nl);
  CHECK(header.find("\"encoding\":\"rle\"") != std::string::npos);
  CHECK(header.find("\"total_size\":8") != std::string::npos);
  CHECK(header.find("\"widths\":{\"value\":4,\"position\":8}") != std::string::npos);
  int64_t body = static_cast<int64_t>(text.size() - nl - 1);
  CHECK(body == stats(col).encoded_bytes);
}

TEST_CASE("dump body length matches stats for every encoding") {
  oracle::Rng rng(23);
  for (auto kind : {Encoding::Plain, Encoding::Rle, Encoding::Index,
                    Encoding::PlainPlusIndex, Encoding::RlePlusIndex}) {
    Column col = oracle::random_column(rng, kind, 120);
    std::ostringstream os;
    dump_column(col, os);
    std::string text = os.str();
    auto nl = text.find('\n');
    int64_t body = static_cast<int64_t>(text.size() - nl - 1);
    CHECK(body == stats(col).encoded_bytes);
  }
}

TEST_CASE("mask helpers") {
  MaskColumn full = full_mask(5);
  CHECK(full.true_count() == 5);
  CHECK(full.encoding() == MaskEncoding::Rle);
  MaskColumn empty = empty_rle_mask(5);
  CHECK(empty.true_count() == 0);
  CHECK(mask_true_positions(MaskColumn(IndexMask{{1, 3}, 4})) == PosVec{1, 3});
}
