#include <doctest.h>

#include "oracle.hpp"
#include "runq/align.hpp"
#include "runq/mask_ops.hpp"

using namespace runq;
using namespace runq::compute;

namespace {

const std::array<Encoding, 5> kDataEnc = {Encoding::Plain, Encoding::Rle, Encoding::Index,
                                          Encoding::PlainPlusIndex, Encoding::RlePlusIndex};

RleColumn example_a() {
  return RleColumn{Array::of<int64_t>({4, 1, 3}), {0, 10, 20}, {9, 19, 39}, 40};
}
RleColumn example_b() {
  return RleColumn{Array::of<int64_t>({6, 8}), {0, 15}, {14, 39}, 40};
}

double oracle_apply(double x, double y, BinOp op) {
  switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Div: return x / y;
    default: return 0;
  }
}

bool oracle_cmp(double x, double y, BinOp op) {
  switch (op) {
    case BinOp::Lt: return x < y;
    case BinOp::Le: return x <= y;
    case BinOp::Eq: return x == y;
    case BinOp::Ne: return x != y;
    case BinOp::Ge: return x >= y;
    case BinOp::Gt: return x > y;
    default: return false;
  }
}

}  // namespace

TEST_CASE("alignment of two RLE columns duplicates split-run values") {
  AlignedPair ap = align(example_a(), example_b());
  REQUIRE(std::holds_alternative<RunShape>(ap.shape));
  const auto& rs = std::get<RunShape>(ap.shape);
  CHECK(rs.s == PosVec{0, 10, 15, 20});
  CHECK(rs.e == PosVec{9, 14, 19, 39});
  CHECK(ap.v1.as<int64_t>()[0] == 4);
  CHECK(ap.v1.as<int64_t>()[1] == 1);
  CHECK(ap.v1.as<int64_t>()[2] == 1);
  CHECK(ap.v1.as<int64_t>()[3] == 3);
  CHECK(ap.v2.as<int64_t>()[0] == 6);
  CHECK(ap.v2.as<int64_t>()[1] == 6);
  CHECK(ap.v2.as<int64_t>()[2] == 8);
  CHECK(ap.v2.as<int64_t>()[3] == 8);
}

TEST_CASE("self-alignment is the identity") {
  AlignedPair ap = align(example_a(), example_a());
  REQUIRE(std::holds_alternative<RunShape>(ap.shape));
  CHECK(std::get<RunShape>(ap.shape).s == example_a().s);
  CHECK(ap.v1.equals(ap.v2));
}

TEST_CASE("RLE plus RLE adds per aligned run") {
  Column r = arith(example_a(), example_b(), BinOp::Add);
  REQUIRE(r.encoding() == Encoding::Rle);
  auto v = r.rle().v.as<int64_t>();
  CHECK(v[0] == 10);
  CHECK(v[1] == 7);
  CHECK(v[2] == 9);
  CHECK(v[3] == 11);
}

TEST_CASE("A minus A is zero over A's shape") {
  Column r = arith(example_a(), example_a(), BinOp::Sub);
  REQUIRE(r.encoding() == Encoding::Rle);
  CHECK(r.rle().s == example_a().s);
  for (auto v : r.rle().v.as<int64_t>()) CHECK(v == 0);
}

TEST_CASE("A < B covers all aligned runs of the worked example") {
  MaskColumn m = compare(example_a(), example_b(), BinOp::Lt);
  REQUIRE(m.encoding() == MaskEncoding::Rle);
  CHECK(m.rle().s == PosVec{0, 10, 15, 20});
  CHECK(m.rle().e == PosVec{9, 14, 19, 39});
}

TEST_CASE("align coverage is symmetric") {
  oracle::Rng rng(89);
  for (auto e1 : {Encoding::Plain, Encoding::Rle, Encoding::Index}) {
    for (auto e2 : {Encoding::Plain, Encoding::Rle, Encoding::Index}) {
      Column a = oracle::random_column(rng, e1, 120);
      Column b = oracle::random_column(rng, e2, 120);
      AlignedPair ab = align(a, b);
      AlignedPair ba = align(b, a);
      CHECK(shape_covered_rows(ab.shape) == shape_covered_rows(ba.shape));
      CHECK(shape_slots(ab.shape) == shape_slots(ba.shape));
    }
  }
}

TEST_CASE("binary ops match the decode-then-operate oracle on all pairs") {
  oracle::Rng rng(97);
  for (auto e1 : kDataEnc) {
    for (auto e2 : kDataEnc) {
      for (int iter = 0; iter < 12; ++iter) {
        const int64_t n = 96;
        Column a = oracle::random_column(rng, e1, n, false, true, 20);
        Column b = oracle::random_column(rng, e2, n, false, true, 20);
        auto va = oracle::column_values(a);
        auto vb = oracle::column_values(b);

        for (BinOp op : {BinOp::Add, BinOp::Sub, BinOp::Mul}) {
          Column r = arith(a, b, op);
          auto got = oracle::column_values(r);
          std::map<int64_t, double> want;
          for (const auto& [pos, x] : va) {
            auto it = vb.find(pos);
            if (it != vb.end()) want[pos] = oracle_apply(x, it->second, op);
          }
          CHECK(got == want);
        }
        for (BinOp op : {BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne, BinOp::Ge, BinOp::Gt}) {
          MaskColumn m = compare(a, b, op);
          oracle::Bits want(static_cast<size_t>(n), 0);
          for (const auto& [pos, x] : va) {
            auto it = vb.find(pos);
            if (it != vb.end() && oracle_cmp(x, it->second, op))
              want[static_cast<size_t>(pos)] = 1;
          }
          CHECK(oracle::mask_bits(m) == want);
        }
      }
    }
  }
}

TEST_CASE("scalar ops leave the shape alone") {
  RleColumn c{Array::of<int64_t>({4, 1, 3}), {0, 10, 20}, {9, 19, 39}, 40};
  Column r = arith_scalar(Column(c), compute::Scalar{int64_t{2}}, BinOp::Mul);
  REQUIRE(r.encoding() == Encoding::Rle);
  CHECK(r.rle().s == c.s);
  auto v = r.rle().v.as<int64_t>();
  CHECK(v[0] == 8);
  CHECK(v[1] == 2);
  CHECK(v[2] == 6);
}

TEST_CASE("a >= min(a) covers every covered row") {
  oracle::Rng rng(101);
  for (auto e : {Encoding::Plain, Encoding::Rle, Encoding::Index}) {
    Column a = oracle::random_column(rng, e, 80);
    auto vals = oracle::column_values(a);
    if (vals.empty()) continue;
    double mn = vals.begin()->second;
    for (const auto& [pos, v] : vals) mn = std::min(mn, v);
    MaskColumn m = compare_scalar(a, compute::Scalar{static_cast<int64_t>(mn)}, BinOp::Ge);
    CHECK(MaskColumn(m).true_count() == static_cast<int64_t>(vals.size()));
  }
}

TEST_CASE("scalar comparison distributes over plain+index outliers") {
  const int64_t big = 10'000'000'000;
  PlainPlusIndexColumn c;
  c.base = PlainColumn(Array::of<int8_t>({1, 2, 3, 0, 0}), DType::I64);
  c.outliers = IndexColumn{Array::of<int64_t>({big, big}), {3, 4}, 5};
  MaskColumn m = compare_scalar(Column(c), compute::Scalar{big}, BinOp::Eq);
  CHECK(mask_true_positions(m) == PosVec{3, 4});
}

TEST_CASE("integer division by zero raises; float propagates") {
  Column num(PlainColumn(Array::of<int64_t>({4, 9})));
  Column den(PlainColumn(Array::of<int64_t>({2, 0})));
  CHECK_THROWS_AS(arith(num, den, BinOp::Div), Error);

  Column fden(PlainColumn(Array::of<double>({2.0, 0.0})));
  Column q = arith(num, fden, BinOp::Div);
  CHECK(q.plain().values.f64_at(0) == doctest::Approx(2.0));
  CHECK(std::isinf(q.plain().values.f64_at(1)));
}

TEST_CASE("filter keeps positions: plain data, plain mask") {
  Column a(PlainColumn(Array::of<int64_t>({10, 20, 30})));
  Column r = compute::filter(a, make_plain_mask({1, 0, 1}));
  REQUIRE(r.encoding() == Encoding::Index);
  CHECK(r.index().p == PosVec{0, 2});
  CHECK(r.index().v.as<int64_t>()[0] == 10);
  CHECK(r.index().v.as<int64_t>()[1] == 30);
}

TEST_CASE("filter identities") {
  oracle::Rng rng(103);
  for (auto e : kDataEnc) {
    Column a = oracle::random_column(rng, e, 60);
    Column full = compute::filter(a, full_mask(60));
    CHECK(oracle::column_values(full) == oracle::column_values(a));
    Column none = compute::filter(a, empty_rle_mask(60));
    CHECK(none.covered_rows() == 0);
  }
}

TEST_CASE("filter matches the subscript oracle on all pairs") {
  oracle::Rng rng(107);
  for (auto de : kDataEnc) {
    for (auto me : {MaskEncoding::Plain, MaskEncoding::Rle, MaskEncoding::Index,
                    MaskEncoding::Composite}) {
      for (int iter = 0; iter < 12; ++iter) {
        const int64_t n = 100;
        Column a = oracle::random_column(rng, de, n);
        MaskColumn m = oracle::random_mask(rng, me, n);
        Column r = compute::filter(a, m);
        auto va = oracle::column_values(a);
        auto bits = oracle::mask_bits(m);
        std::map<int64_t, double> want;
        for (const auto& [pos, v] : va)
          if (bits[static_cast<size_t>(pos)]) want[pos] = v;
        CHECK(oracle::column_values(r) == want);
      }
    }
  }
}

TEST_CASE("filter composition equals filtering by the conjunction") {
  oracle::Rng rng(109);
  for (int iter = 0; iter < 40; ++iter) {
    const int64_t n = 90;
    Column a = oracle::random_column(rng, Encoding::Rle, n);
    MaskColumn m1 = oracle::random_mask(rng, MaskEncoding::Rle, n);
    MaskColumn m2 = oracle::random_mask(rng, MaskEncoding::Index, n);
    Column lhs = compute::filter(compute::filter(a, m1), m2);
    Column rhs = compute::filter(a, masks::and_mask(m1, m2));
    CHECK(oracle::column_values(lhs) == oracle::column_values(rhs));
  }
}

TEST_CASE("align_many folds value arrays onto one shape") {
  std::vector<Column> cols;
  cols.push_back(example_a());
  cols.push_back(example_b());
  cols.push_back(PlainColumn(Array::zeros(DType::I64, 40)));
  MultiAligned ma = align_many(cols);
  // plain third column forces per-row points over the runs' coverage
  CHECK(shape_covered_rows(ma.shape) == 40);
  CHECK(static_cast<int64_t>(ma.values.size()) == 3);
  for (const auto& v : ma.values) CHECK(v.size() == shape_slots(ma.shape));
}
