#pragma once

#include <cstddef>
#include <cstdint>
#include <new>
#include <vector>

namespace runq::mem {

// Process-wide accounting of live bytes held by engine containers.
// The high-water mark stands in for device-memory profiling: the query
// runner resets it before execution and reports the peak afterwards.
int64_t live_bytes();
int64_t peak_bytes();
void reset_peak();

namespace detail {
void add_bytes(int64_t n);
void sub_bytes(int64_t n);
}  // namespace detail

template <class T>
struct TrackingAllocator {
  using value_type = T;

  TrackingAllocator() noexcept = default;
  template <class U>
  TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    detail::add_bytes(static_cast<int64_t>(n * sizeof(T)));
    return static_cast<T*>(::operator new(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t n) noexcept {
    detail::sub_bytes(static_cast<int64_t>(n * sizeof(T)));
    ::operator delete(p);
  }

  template <class U>
  bool operator==(const TrackingAllocator<U>&) const noexcept {
    return true;
  }
};

}  // namespace runq::mem

namespace runq {

template <class T>
using TrackedVec = std::vector<T, mem::TrackingAllocator<T>>;

// Row positions are always 64-bit signed; value widths vary (see DType).
using PosVec = TrackedVec<int64_t>;

}  // namespace runq
