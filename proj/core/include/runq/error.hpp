#pragma once

#include <stdexcept>
#include <string>

namespace runq {

// Base class for everything the engine throws on user-visible failures
// (bad plans, malformed input, precondition violations). Internal logic
// errors use assertions instead.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Arithmetic overflow at a configured width (e.g. cumsum accumulator).
class OverflowError : public Error {
public:
  explicit OverflowError(const std::string& what) : Error(what) {}
};

// An expansion would exceed the configured element budget.
class ResourceError : public Error {
public:
  explicit ResourceError(const std::string& what) : Error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace runq
