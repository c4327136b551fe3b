#pragma once

#include <memory>
#include <string>
#include <vector>

#include "runq/column.hpp"
#include "runq/dictionary.hpp"

namespace runq {

// A named column plus its side metadata. String columns carry dictionary
// codes in the column and the dictionary here; dates are days since epoch.
struct TableColumn {
  std::string name;
  std::shared_ptr<const Column> column;
  DictionaryPtr dict;
  bool is_date = false;
};

struct Table {
  std::string name;
  int64_t rows = 0;
  std::vector<TableColumn> columns;

  const TableColumn* find(std::string_view col_name) const {
    for (const auto& c : columns)
      if (c.name == col_name) return &c;
    return nullptr;
  }
  const TableColumn& at(std::string_view col_name) const {
    const TableColumn* c = find(col_name);
    require(c != nullptr, "table " + name + ": no column named " + std::string(col_name));
    return *c;
  }
};

}  // namespace runq
