#include "runq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace runq::kernels {

PosVec bucketize(std::span<const int64_t> x, std::span<const int64_t> boundaries,
                 bool right) {
  PosVec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    auto it = right ? std::upper_bound(boundaries.begin(), boundaries.end(), x[i])
                    : std::lower_bound(boundaries.begin(), boundaries.end(), x[i]);
    out[i] = static_cast<int64_t>(it - boundaries.begin());
  }
  return out;
}

PosVec cumsum(std::span<const int64_t> x, bool exclusive) {
  PosVec out(x.size());
  int64_t acc = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (exclusive) out[i] = acc;
    if (__builtin_add_overflow(acc, x[i], &acc))
      throw OverflowError("cumsum: int64 overflow at element " + std::to_string(i));
    if (!exclusive) out[i] = acc;
  }
  return out;
}

int64_t checked_sum(std::span<const int64_t> x) {
  int64_t acc = 0;
  for (auto v : x)
    if (__builtin_add_overflow(acc, v, &acc)) throw OverflowError("sum: int64 overflow");
  return acc;
}

Array repeat_interleave(const Array& values, std::span<const int64_t> counts) {
  return dtype_dispatch(values.dtype(), [&](auto tag) {
    using T = decltype(tag);
    return Array::from(repeat_interleave(values.as<T>(), counts));
  });
}

PosVec range_arange(std::span<const int64_t> start, std::span<const int64_t> length) {
  require(start.size() == length.size(), "range_arange: length mismatch");
  // t <- exclusive cumsum(length); result = repeat(start) + arange(total) - repeat(t)
  PosVec t = cumsum(length, /*exclusive=*/true);
  int64_t total = checked_sum(length);
  PosVec rep_start = repeat_interleave(start, length);
  PosVec rep_t = repeat_interleave(std::span<const int64_t>(t), length);
  PosVec out(static_cast<size_t>(total));
  for (int64_t i = 0; i < total; ++i) {
    auto u = static_cast<size_t>(i);
    out[u] = rep_start[u] + i - rep_t[u];
  }
  return out;
}

namespace {

[[noreturn]] void fail_group_index(size_t i) {
  fail("scatter_reduce: group index out of range at element " + std::to_string(i));
}

template <class T, class Acc, Reduce op>
void scatter_loop(std::span<const T> values, std::span<const int64_t> index,
                  std::span<Acc> out) {
  const auto n_groups = static_cast<int64_t>(out.size());
  for (size_t i = 0; i < values.size(); ++i) {
    int64_t g = index[i];
    if (g < 0 || g >= n_groups) [[unlikely]] fail_group_index(i);
    Acc v = static_cast<Acc>(values[i]);
    Acc& slot = out[static_cast<size_t>(g)];
    if constexpr (op == Reduce::Sum) slot += v;
    if constexpr (op == Reduce::Min) slot = std::min(slot, v);
    if constexpr (op == Reduce::Max) slot = std::max(slot, v);
    if constexpr (op == Reduce::Count) slot += Acc{1};
  }
}

template <class T, class Acc>
void scatter_impl(std::span<const T> values, std::span<const int64_t> index,
                  std::span<Acc> out, Reduce op) {
  switch (op) {
    case Reduce::Sum: scatter_loop<T, Acc, Reduce::Sum>(values, index, out); break;
    case Reduce::Min: scatter_loop<T, Acc, Reduce::Min>(values, index, out); break;
    case Reduce::Max: scatter_loop<T, Acc, Reduce::Max>(values, index, out); break;
    case Reduce::Count: scatter_loop<T, Acc, Reduce::Count>(values, index, out); break;
  }
}

}  // namespace

Array scatter_reduce(const Array& values, std::span<const int64_t> index,
                     int64_t n_groups, Reduce op) {
  require(values.size() == static_cast<int64_t>(index.size()),
          "scatter_reduce: values/index length mismatch");
  require(n_groups >= 0, "scatter_reduce: negative group count");
  bool flt = dtype_is_float(values.dtype()) && op != Reduce::Count;
  if (flt) {
    TrackedVec<double> out(static_cast<size_t>(n_groups));
    double init = 0.0;
    if (op == Reduce::Min) init = std::numeric_limits<double>::infinity();
    if (op == Reduce::Max) init = -std::numeric_limits<double>::infinity();
    std::fill(out.begin(), out.end(), init);
    dtype_dispatch(values.dtype(), [&](auto tag) {
      using T = decltype(tag);
      scatter_impl<T, double>(values.as<T>(), index, std::span<double>(out), op);
    });
    return Array::from(out);
  }
  TrackedVec<int64_t> out(static_cast<size_t>(n_groups));
  int64_t init = 0;
  if (op == Reduce::Min) init = std::numeric_limits<int64_t>::max();
  if (op == Reduce::Max) init = std::numeric_limits<int64_t>::min();
  std::fill(out.begin(), out.end(), init);
  dtype_dispatch(values.dtype(), [&](auto tag) {
    using T = decltype(tag);
    scatter_impl<T, int64_t>(values.as<T>(), index, std::span<int64_t>(out), op);
  });
  return Array::from(out);
}

UniqueResult unique_with_inverse(std::span<const Array> columns) {
  UniqueResult res;
  if (columns.empty()) return res;
  int64_t n = columns[0].size();
  for (const auto& c : columns)
    require(c.size() == n, "unique_with_inverse: column length mismatch");
  if (n == 0) {
    for (const auto& c : columns) res.keys.push_back(Array::empty(c.dtype()));
    return res;
  }

  // widen each column once; int widening and f32->f64 preserve ordering
  struct KeyView {
    bool is_float;
    TrackedVec<int64_t> iv;
    TrackedVec<double> fv;
  };
  std::vector<KeyView> views;
  views.reserve(columns.size());
  for (const auto& c : columns) {
    KeyView kv;
    kv.is_float = dtype_is_float(c.dtype());
    if (kv.is_float) kv.fv = c.to_f64();
    else kv.iv = c.to_i64();
    views.push_back(std::move(kv));
  }

  // cmp < 0 / 0 / > 0 over the composite key at rows a, b.
  auto cmp = [&](int64_t a, int64_t b) -> int {
    for (const auto& kv : views) {
      if (kv.is_float) {
        double va = kv.fv[static_cast<size_t>(a)], vb = kv.fv[static_cast<size_t>(b)];
        if (va < vb) return -1;
        if (vb < va) return 1;
      } else {
        int64_t va = kv.iv[static_cast<size_t>(a)], vb = kv.iv[static_cast<size_t>(b)];
        if (va < vb) return -1;
        if (vb < va) return 1;
      }
    }
    return 0;
  };

  PosVec perm = iota(n);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int64_t a, int64_t b) { return cmp(a, b) < 0; });

  res.inverse.resize(static_cast<size_t>(n));
  PosVec first_rows;
  int64_t gid = -1;
  for (int64_t i = 0; i < n; ++i) {
    if (i == 0 || cmp(perm[static_cast<size_t>(i - 1)], perm[static_cast<size_t>(i)]) != 0) {
      ++gid;
      first_rows.push_back(perm[static_cast<size_t>(i)]);
    }
    res.inverse[static_cast<size_t>(perm[static_cast<size_t>(i)])] = gid;
  }
  res.n_groups = gid + 1;
  for (const auto& c : columns) res.keys.push_back(gather(c, first_rows));
  return res;
}

namespace {
[[noreturn]] void fail_gather(int64_t j) {
  fail("gather: index out of range: " + std::to_string(j));
}
}  // namespace

Array gather(const Array& values, std::span<const int64_t> idx) {
  return dtype_dispatch(values.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto src = values.as<T>();
    const int64_t n = values.size();
    TrackedVec<T> out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
      int64_t j = idx[i];
      if (j < 0 || j >= n) [[unlikely]] fail_gather(j);
      out[i] = src[static_cast<size_t>(j)];
    }
    return Array::from(out);
  });
}

PosVec gather(std::span<const int64_t> values, std::span<const int64_t> idx) {
  const auto n = static_cast<int64_t>(values.size());
  PosVec out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    int64_t j = idx[i];
    if (j < 0 || j >= n) [[unlikely]] fail_gather(j);
    out[i] = values[static_cast<size_t>(j)];
  }
  return out;
}

SortResult sort_with_perm(const Array& values) {
  SortResult res;
  res.perm = iota(values.size());
  dtype_dispatch(values.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto sp = values.as<T>();
    std::stable_sort(res.perm.begin(), res.perm.end(), [&](int64_t a, int64_t b) {
      return sp[static_cast<size_t>(a)] < sp[static_cast<size_t>(b)];
    });
  });
  res.sorted = gather(values, res.perm);
  return res;
}

std::vector<uint8_t> adjacent_ne(const Array& x) {
  std::vector<uint8_t> out(static_cast<size_t>(x.size()));
  dtype_dispatch(x.dtype(), [&](auto tag) {
    using T = decltype(tag);
    auto sp = x.as<T>();
    for (size_t i = 0; i < sp.size(); ++i)
      out[i] = (i == 0) || !(sp[i] == sp[i - 1]);
  });
  return out;
}

}  // namespace runq::kernels
