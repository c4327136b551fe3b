#include "runq/groupby.hpp"

#include <cmath>

#include "runq/kernels.hpp"

namespace runq::agg {

AggFn agg_from_name(std::string_view name) {
  if (name == "sum") return AggFn::Sum;
  if (name == "count") return AggFn::Count;
  if (name == "min") return AggFn::Min;
  if (name == "max") return AggFn::Max;
  if (name == "avg") return AggFn::Avg;
  if (name == "std") return AggFn::Std;
  if (name == "var") return AggFn::Var;
  fail("unknown aggregate function: " + std::string(name));
}

std::string_view agg_name(AggFn fn) {
  switch (fn) {
    case AggFn::Sum: return "sum";
    case AggFn::Count: return "count";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Avg: return "avg";
    case AggFn::Std: return "std";
    case AggFn::Var: return "var";
  }
  return "?";
}

GroupingResult group_on_arrays(compute::Shape shape, std::span<const Array> key_values,
                               int64_t total_size) {
  require(!key_values.empty(), "group: empty key list");
  auto uniq = kernels::unique_with_inverse(key_values);
  GroupingResult g;
  g.inverse = std::move(uniq.inverse);
  g.n_groups = uniq.n_groups;
  g.keys = std::move(uniq.keys);
  g.shape = std::move(shape);
  g.total_size = total_size;
  return g;
}

GroupingResult group(std::span<const Column> keys) {
  require(!keys.empty(), "group: empty key list");
  auto aligned = compute::align_many(keys);
  return group_on_arrays(std::move(aligned.shape), aligned.values, aligned.total_size);
}

namespace {

TrackedVec<double> scatter_sum_f64(std::span<const double> vals,
                                   std::span<const int64_t> inverse, int64_t n_groups) {
  TrackedVec<double> out(static_cast<size_t>(n_groups), 0.0);
  for (size_t i = 0; i < vals.size(); ++i) {
    int64_t gid = inverse[i];
    require(gid >= 0 && gid < n_groups, "aggregate: inverse index out of range");
    out[static_cast<size_t>(gid)] += vals[i];
  }
  return out;
}

}  // namespace

Array aggregate_array(const compute::Shape& shape, const Array& values,
                      const GroupingResult& g, AggFn fn) {
  require(values.size() == shape_slots(shape), "aggregate: values do not match shape");
  require(values.size() == static_cast<int64_t>(g.inverse.size()),
          "aggregate: values do not match grouping");
  PosVec weights = compute::shape_weights(shape);

  switch (fn) {
    case AggFn::Min:
      return kernels::scatter_reduce(values, g.inverse, g.n_groups, kernels::Reduce::Min);
    case AggFn::Max:
      return kernels::scatter_reduce(values, g.inverse, g.n_groups, kernels::Reduce::Max);
    case AggFn::Count:
      return kernels::scatter_reduce(Array::from(weights), g.inverse, g.n_groups,
                                     kernels::Reduce::Sum);
    case AggFn::Sum: {
      if (!dtype_is_float(values.dtype())) {
        auto v = values.to_i64();
        TrackedVec<int64_t> weighted(v.size());
        for (size_t i = 0; i < v.size(); ++i) weighted[i] = v[i] * weights[i];
        return kernels::scatter_reduce(Array::from(weighted), g.inverse, g.n_groups,
                                       kernels::Reduce::Sum);
      }
      auto v = values.to_f64();
      TrackedVec<double> weighted(v.size());
      for (size_t i = 0; i < v.size(); ++i)
        weighted[i] = v[i] * static_cast<double>(weights[i]);
      return kernels::scatter_reduce(Array::from(weighted), g.inverse, g.n_groups,
                                     kernels::Reduce::Sum);
    }
    case AggFn::Avg:
    case AggFn::Std:
    case AggFn::Var: {
      auto v = values.to_f64();
      TrackedVec<double> wsum(v.size());
      for (size_t i = 0; i < v.size(); ++i)
        wsum[i] = v[i] * static_cast<double>(weights[i]);
      TrackedVec<double> sum = scatter_sum_f64(wsum, g.inverse, g.n_groups);
      Array cnt_arr = kernels::scatter_reduce(Array::from(weights), g.inverse, g.n_groups,
                                              kernels::Reduce::Sum);
      auto cnt = cnt_arr.as<int64_t>();
      TrackedVec<double> mean(static_cast<size_t>(g.n_groups));
      for (size_t i = 0; i < mean.size(); ++i)
        mean[i] = cnt[i] > 0 ? sum[i] / static_cast<double>(cnt[i])
                             : std::numeric_limits<double>::quiet_NaN();
      if (fn == AggFn::Avg) return Array::from(mean);

      // second scatter pass over centered squares, still one term per run:
      // sum_g (v - mean_g)^2 * l
      TrackedVec<double> wsq(v.size());
      for (size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - mean[static_cast<size_t>(g.inverse[i])];
        wsq[i] = d * d * static_cast<double>(weights[i]);
      }
      TrackedVec<double> sumsq = scatter_sum_f64(wsq, g.inverse, g.n_groups);
      TrackedVec<double> out(static_cast<size_t>(g.n_groups));
      for (size_t i = 0; i < out.size(); ++i) {
        if (cnt[i] == 0) {
          out[i] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        double var = sumsq[i] / static_cast<double>(cnt[i]);
        out[i] = fn == AggFn::Var ? var : std::sqrt(var);
      }
      return Array::from(out);
    }
  }
  fail("aggregate: unknown function");
}

Array aggregate(const Column& data, const GroupingResult& g, AggFn fn) {
  auto d = compute::decompose(data);
  require(compute::shapes_identical(d.shape, g.shape),
          "aggregate: data shape differs from grouping shape");
  return aggregate_array(d.shape, d.values, g, fn);
}

GroupAggregateResult group_aggregate(std::span<const Column> keys,
                                     std::span<const Column> data,
                                     std::span<const AggFn> fns) {
  require(data.size() == fns.size(), "group_aggregate: data/function count mismatch");
  std::vector<Column> all(keys.begin(), keys.end());
  all.insert(all.end(), data.begin(), data.end());
  auto aligned = compute::align_many(all);

  std::span<const Array> key_vals(aligned.values.data(), keys.size());
  GroupingResult g = group_on_arrays(aligned.shape, key_vals, aligned.total_size);

  GroupAggregateResult out;
  out.keys = std::move(g.keys);
  out.n_groups = g.n_groups;
  for (size_t i = 0; i < data.size(); ++i)
    out.values.push_back(
        aggregate_array(aligned.shape, aligned.values[keys.size() + i], g, fns[i]));
  return out;
}

Array aggregate_all(const Column& data, AggFn fn) {
  auto d = compute::decompose(compute::normalize_basic(data));
  GroupingResult g;
  g.n_groups = 1;
  g.inverse.assign(static_cast<size_t>(compute::shape_slots(d.shape)), 0);
  g.shape = d.shape;
  g.total_size = data.total_size();
  return aggregate_array(d.shape, d.values, g, fn);
}

}  // namespace runq::agg
