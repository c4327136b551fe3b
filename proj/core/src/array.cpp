#include "runq/array.hpp"

namespace runq {

DType dtype_from_name(std::string_view name) {
  if (name == "i8") return DType::I8;
  if (name == "i16") return DType::I16;
  if (name == "i32") return DType::I32;
  if (name == "i64") return DType::I64;
  if (name == "f32") return DType::F32;
  if (name == "f64") return DType::F64;
  fail("unknown dtype name: " + std::string(name));
}

int64_t Array::i64_at(int64_t i) const {
  return dtype_dispatch(dt_, [&](auto tag) -> int64_t {
    using T = decltype(tag);
    return static_cast<int64_t>(as<T>()[static_cast<size_t>(i)]);
  });
}

double Array::f64_at(int64_t i) const {
  return dtype_dispatch(dt_, [&](auto tag) -> double {
    using T = decltype(tag);
    return static_cast<double>(as<T>()[static_cast<size_t>(i)]);
  });
}

Array Array::cast(DType to) const {
  if (to == dt_) return *this;
  return dtype_dispatch(dt_, [&](auto from_tag) {
    using From = decltype(from_tag);
    auto src = as<From>();
    return dtype_dispatch(to, [&](auto to_tag) {
      using To = decltype(to_tag);
      TrackedVec<To> out(src.size());
      for (size_t i = 0; i < src.size(); ++i) out[i] = static_cast<To>(src[i]);
      return Array::from(out);
    });
  });
}

TrackedVec<int64_t> Array::to_i64() const {
  return dtype_dispatch(dt_, [&](auto tag) {
    using T = decltype(tag);
    auto src = as<T>();
    TrackedVec<int64_t> out(src.size());
    for (size_t i = 0; i < src.size(); ++i) out[i] = static_cast<int64_t>(src[i]);
    return out;
  });
}

TrackedVec<double> Array::to_f64() const {
  return dtype_dispatch(dt_, [&](auto tag) {
    using T = decltype(tag);
    auto src = as<T>();
    TrackedVec<double> out(src.size());
    for (size_t i = 0; i < src.size(); ++i) out[i] = static_cast<double>(src[i]);
    return out;
  });
}

}  // namespace runq
