#include "runq/plan.hpp"

#include <fstream>

#include <json.hpp>

namespace runq::query {

namespace {

using nlohmann::json;

ExprPtr parse_expr(const json& j) {
  require(j.is_object(), "expression must be a JSON object: " + j.dump());
  if (j.contains("col")) {
    return std::make_shared<Expr>(Expr{ColumnRef{j.at("col").get<std::string>()}});
  }
  if (j.contains("lit")) {
    const auto& v = j.at("lit");
    Literal lit;
    if (v.is_number_integer()) lit.value = v.get<int64_t>();
    else if (v.is_number_float()) lit.value = v.get<double>();
    else if (v.is_string()) lit.value = v.get<std::string>();
    else fail("literal must be a number or string: " + v.dump());
    return std::make_shared<Expr>(Expr{std::move(lit)});
  }
  require(j.contains("op"), "expression needs col, lit, or op: " + j.dump());
  std::string op = j.at("op").get<std::string>();
  if (op == "not")
    return std::make_shared<Expr>(Expr{NotExpr{parse_expr(j.at("arg"))}});
  return std::make_shared<Expr>(
      Expr{BinaryExpr{op, parse_expr(j.at("lhs")), parse_expr(j.at("rhs"))}});
}

PlanPtr parse_node(const json& j) {
  require(j.is_object() && j.contains("node"), "plan node needs a 'node' field: " + j.dump());
  std::string kind = j.at("node").get<std::string>();

  if (kind == "scan") {
    ScanNode n;
    n.table = j.at("table").get<std::string>();
    if (j.contains("columns"))
      n.columns = j.at("columns").get<std::vector<std::string>>();
    return std::make_shared<PlanNode>(PlanNode{std::move(n)});
  }
  if (kind == "filter") {
    FilterNode n;
    n.pred = parse_expr(j.at("pred"));
    n.input = parse_node(j.at("input"));
    return std::make_shared<PlanNode>(PlanNode{std::move(n)});
  }
  if (kind == "project") {
    ProjectNode n;
    for (const auto& item : j.at("exprs")) {
      n.items.push_back({parse_expr(item.at("expr")), item.at("as").get<std::string>()});
    }
    n.input = parse_node(j.at("input"));
    return std::make_shared<PlanNode>(PlanNode{std::move(n)});
  }
  if (kind == "join") {
    JoinNode n;
    n.left = parse_node(j.at("left"));
    n.right = parse_node(j.at("right"));
    n.left_on = j.at("on").at("left").get<std::string>();
    n.right_on = j.at("on").at("right").get<std::string>();
    if (j.contains("kind")) {
      std::string k = j.at("kind").get<std::string>();
      require(k == "inner" || k == "semi", "join kind must be inner or semi: " + k);
      n.semi = k == "semi";
    }
    return std::make_shared<PlanNode>(PlanNode{std::move(n)});
  }
  if (kind == "group_agg") {
    GroupAggNode n;
    if (j.contains("keys")) n.keys = j.at("keys").get<std::vector<std::string>>();
    for (const auto& a : j.at("aggs")) {
      GroupAggNode::Agg agg;
      agg.fn = agg::agg_from_name(a.at("fn").get<std::string>());
      if (a.contains("expr")) agg.expr = parse_expr(a.at("expr"));
      else require(agg.fn == agg::AggFn::Count, "only count may omit expr");
      agg.name = a.at("as").get<std::string>();
      n.aggs.push_back(std::move(agg));
    }
    require(!n.aggs.empty(), "group_agg needs at least one aggregate");
    n.input = parse_node(j.at("input"));
    return std::make_shared<PlanNode>(PlanNode{std::move(n)});
  }
  fail("unknown plan node kind: " + kind);
}

}  // namespace

PlanPtr parse_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open plan file " + path.string());
  json j = json::parse(in);
  if (j.contains("plan")) return parse_node(j.at("plan"));
  return parse_node(j);
}

PlanPtr parse_plan_json(const std::string& text) {
  json j = json::parse(text);
  if (j.contains("plan")) return parse_node(j.at("plan"));
  return parse_node(j);
}

std::string_view node_label(const PlanNode& n) {
  return std::visit(
      [](const auto& v) -> std::string_view {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScanNode>) return "scan";
        else if constexpr (std::is_same_v<T, FilterNode>) return "filter";
        else if constexpr (std::is_same_v<T, ProjectNode>) return "project";
        else if constexpr (std::is_same_v<T, JoinNode>) return "join";
        else return "group_agg";
      },
      n.node);
}

}  // namespace runq::query
