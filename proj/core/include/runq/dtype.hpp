#pragma once

#include <cstdint>
#include <string_view>

#include "runq/error.hpp"

namespace runq {

// Storage element types for value arrays. Positions are always int64.
enum class DType : uint8_t { I8, I16, I32, I64, F32, F64 };

constexpr int dtype_width(DType t) {
  switch (t) {
    case DType::I8: return 1;
    case DType::I16: return 2;
    case DType::I32: return 4;
    case DType::I64: return 8;
    case DType::F32: return 4;
    case DType::F64: return 8;
  }
  return 8;
}

constexpr bool dtype_is_float(DType t) { return t == DType::F32 || t == DType::F64; }

constexpr std::string_view dtype_name(DType t) {
  switch (t) {
    case DType::I8: return "i8";
    case DType::I16: return "i16";
    case DType::I32: return "i32";
    case DType::I64: return "i64";
    case DType::F32: return "f32";
    case DType::F64: return "f64";
  }
  return "?";
}

DType dtype_from_name(std::string_view name);

template <class T>
struct dtype_of;
template <> struct dtype_of<int8_t> { static constexpr DType value = DType::I8; };
template <> struct dtype_of<int16_t> { static constexpr DType value = DType::I16; };
template <> struct dtype_of<int32_t> { static constexpr DType value = DType::I32; };
template <> struct dtype_of<int64_t> { static constexpr DType value = DType::I64; };
template <> struct dtype_of<float> { static constexpr DType value = DType::F32; };
template <> struct dtype_of<double> { static constexpr DType value = DType::F64; };

template <class T>
inline constexpr DType dtype_of_v = dtype_of<T>::value;

// Calls f with a value of the element type corresponding to `t`.
template <class F>
decltype(auto) dtype_dispatch(DType t, F&& f) {
  switch (t) {
    case DType::I8: return f(int8_t{});
    case DType::I16: return f(int16_t{});
    case DType::I32: return f(int32_t{});
    case DType::I64: return f(int64_t{});
    case DType::F32: return f(float{});
    case DType::F64: return f(double{});
  }
  fail("unknown dtype");
}

// Common type for binary arithmetic: any float operand promotes to f64,
// otherwise i64.
constexpr DType dtype_promote(DType a, DType b) {
  return (dtype_is_float(a) || dtype_is_float(b)) ? DType::F64 : DType::I64;
}

}  // namespace runq
