#pragma once

#include <cstring>
#include <initializer_list>
#include <span>
#include <vector>

#include "runq/alloc.hpp"
#include "runq/dtype.hpp"
#include "runq/error.hpp"

namespace runq {

// A contiguous, typed, immutable-by-convention value buffer. The tensor
// analog of this engine: every column's value payload is one of these.
class Array {
public:
  Array() : dt_(DType::I64), len_(0) {}

  static Array empty(DType t) {
    Array a;
    a.dt_ = t;
    return a;
  }

  static Array zeros(DType t, int64_t n) {
    Array a;
    a.dt_ = t;
    a.len_ = n;
    a.buf_.assign(static_cast<size_t>(n) * dtype_width(t), std::byte{0});
    return a;
  }

  template <class T>
  static Array from(std::span<const T> v) {
    Array a;
    a.dt_ = dtype_of_v<T>;
    a.len_ = static_cast<int64_t>(v.size());
    a.buf_.resize(v.size() * sizeof(T));
    if (!v.empty()) std::memcpy(a.buf_.data(), v.data(), v.size() * sizeof(T));
    return a;
  }

  template <class T>
  static Array from(const std::vector<T>& v) {
    return from(std::span<const T>(v));
  }
  template <class T>
  static Array from(const TrackedVec<T>& v) {
    return from(std::span<const T>(v.data(), v.size()));
  }
  template <class T>
  static Array of(std::initializer_list<T> v) {
    return from(std::span<const T>(v.begin(), v.size()));
  }

  DType dtype() const { return dt_; }
  int64_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  int64_t byte_size() const { return static_cast<int64_t>(buf_.size()); }
  const std::byte* data() const { return buf_.data(); }

  template <class T>
  std::span<const T> as() const& {
    require(dt_ == dtype_of_v<T>, "array dtype mismatch");
    return {reinterpret_cast<const T*>(buf_.data()), static_cast<size_t>(len_)};
  }
  // spans over temporaries dangle
  template <class T>
  std::span<const T> as() const&& = delete;

  template <class T>
  std::span<T> as_mut() & {
    require(dt_ == dtype_of_v<T>, "array dtype mismatch");
    return {reinterpret_cast<T*>(buf_.data()), static_cast<size_t>(len_)};
  }
  template <class T>
  std::span<T> as_mut() && = delete;

  // Converting element reads; slow path for generic code and diagnostics.
  int64_t i64_at(int64_t i) const;
  double f64_at(int64_t i) const;

  Array cast(DType to) const;

  // Widened copies used by arithmetic and hashing.
  TrackedVec<int64_t> to_i64() const;
  TrackedVec<double> to_f64() const;

  bool equals(const Array& other) const {
    return dt_ == other.dt_ && len_ == other.len_ &&
           (buf_.empty() || std::memcmp(buf_.data(), other.buf_.data(), buf_.size()) == 0);
  }

private:
  DType dt_;
  int64_t len_ = 0;
  TrackedVec<std::byte> buf_;
};

}  // namespace runq
