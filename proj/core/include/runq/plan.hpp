#pragma once

#include <filesystem>
#include <memory>
#include <variant>

#include "runq/groupby.hpp"

namespace runq::query {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColumnRef {
  std::string name;
};
struct Literal {
  std::variant<int64_t, double, std::string> value;
};
// Arithmetic, comparison, and/or; `op` keeps the surface spelling.
struct BinaryExpr {
  std::string op;
  ExprPtr lhs, rhs;
};
struct NotExpr {
  ExprPtr arg;
};

struct Expr {
  std::variant<ColumnRef, Literal, BinaryExpr, NotExpr> node;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

struct ScanNode {
  std::string table;
  std::vector<std::string> columns;  // empty selects all
};
struct FilterNode {
  ExprPtr pred;
  PlanPtr input;
};
struct ProjectNode {
  struct Item {
    ExprPtr expr;
    std::string name;
  };
  std::vector<Item> items;
  PlanPtr input;
};
struct JoinNode {
  PlanPtr left, right;
  std::string left_on, right_on;
  bool semi = false;
};
struct GroupAggNode {
  struct Agg {
    agg::AggFn fn;
    ExprPtr expr;  // null for count(*)
    std::string name;
  };
  std::vector<std::string> keys;  // empty aggregates globally
  std::vector<Agg> aggs;
  PlanPtr input;
};

struct PlanNode {
  std::variant<ScanNode, FilterNode, ProjectNode, JoinNode, GroupAggNode> node;
};

// JSON plan format: nodes are {"node": "scan|filter|project|join|group_agg", ...},
// expressions {"col": name} | {"lit": value} | {"op": ..., "lhs": ..., "rhs": ...}
// | {"op": "not", "arg": ...}. See README for the field tables.
PlanPtr parse_plan_file(const std::filesystem::path& path);
PlanPtr parse_plan_json(const std::string& text);

std::string_view node_label(const PlanNode& n);

}  // namespace runq::query
