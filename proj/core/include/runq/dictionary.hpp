#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "runq/error.hpp"

namespace runq {

// Bijective string<->code table. Codes are dense from 0 in first-occurrence
// order; join columns must share the same dictionary object to be
// code-comparable.
class Dictionary {
public:
  int64_t intern(std::string_view s) {
    auto it = to_code_.find(std::string(s));
    if (it != to_code_.end()) return it->second;
    int64_t code = static_cast<int64_t>(to_str_.size());
    to_str_.emplace_back(s);
    to_code_.emplace(to_str_.back(), code);
    return code;
  }

  std::optional<int64_t> find(std::string_view s) const {
    auto it = to_code_.find(std::string(s));
    if (it == to_code_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& at(int64_t code) const {
    require(code >= 0 && code < size(), "dictionary: code out of range");
    return to_str_[static_cast<size_t>(code)];
  }

  int64_t size() const { return static_cast<int64_t>(to_str_.size()); }

private:
  std::vector<std::string> to_str_;
  std::unordered_map<std::string, int64_t> to_code_;
};

using DictionaryPtr = std::shared_ptr<const Dictionary>;

}  // namespace runq
