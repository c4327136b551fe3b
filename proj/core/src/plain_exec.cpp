// Plain-mode executor: the differential oracle. Runs entirely on decoded
// arrays with row-at-a-time logic and standard containers, sharing nothing
// with the encoded operator stack beyond the Array value buffer.
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_map>

#include "runq/ingest.hpp"
#include "runq/runner.hpp"

namespace runq::query::detail {

namespace {

struct PCol {
  std::string name;
  Array values;
  DictionaryPtr dict;
  bool is_date = false;
};

struct PSet {
  int64_t rows = 0;
  std::vector<PCol> cols;

  const PCol& at(const std::string& name) const {
    for (const auto& c : cols)
      if (c.name == name) return c;
    fail("plain exec: no column named " + name);
  }
};

// One cell in value semantics; integers stay exact.
struct Cell {
  bool is_f = false;
  int64_t i = 0;
  double f = 0;

  double as_f() const { return is_f ? f : static_cast<double>(i); }
  bool operator<(const Cell& o) const {
    if (is_f || o.is_f) return as_f() < o.as_f();
    return i < o.i;
  }
  bool operator==(const Cell& o) const {
    if (is_f || o.is_f) return as_f() == o.as_f();
    return i == o.i;
  }
};

Cell cell_of(const Array& a, int64_t row) {
  if (dtype_is_float(a.dtype())) return {true, 0, a.f64_at(row)};
  return {false, a.i64_at(row), 0};
}

struct EvalValue {
  bool is_mask = false;
  bool is_scalar = false;
  Array values;
  TrackedVec<uint8_t> mask;
  Cell scalar;
  DictionaryPtr dict;
  bool is_date = false;
};

Cell resolve_literal(const Literal& lit, const EvalValue& other) {
  if (std::holds_alternative<int64_t>(lit.value))
    return {false, std::get<int64_t>(lit.value), 0};
  if (std::holds_alternative<double>(lit.value))
    return {true, 0, std::get<double>(lit.value)};
  const std::string& s = std::get<std::string>(lit.value);
  if (other.is_date) return {false, io::parse_date_literal(s), 0};
  require(other.dict != nullptr, "string literal against a non-string column: " + s);
  auto code = other.dict->find(s);
  // a string absent from the dictionary can never match; code -1 is unused
  return {false, code.value_or(-1), 0};
}

Cell apply_cell(const Cell& a, const Cell& b, const std::string& op) {
  if (op == "+" || op == "-" || op == "*" || op == "/") {
    if (a.is_f || b.is_f || op == "/") {
      double x = a.as_f(), y = b.as_f();
      double r = op == "+" ? x + y : op == "-" ? x - y : op == "*" ? x * y : x / y;
      return {true, 0, r};
    }
    int64_t x = a.i, y = b.i;
    int64_t r = op == "+" ? x + y : op == "-" ? x - y : x * y;
    return {false, r, 0};
  }
  fail("plain exec: unknown arithmetic op " + op);
}

bool cmp_cell(const Cell& a, const Cell& b, const std::string& op) {
  if (op == "<") return a < b;
  if (op == "<=") return !(b < a);
  if (op == "==" || op == "=") return a == b;
  if (op == "!=" || op == "<>") return !(a == b);
  if (op == ">=") return !(a < b);
  if (op == ">") return b < a;
  fail("plain exec: unknown comparison " + op);
}

bool int_division(const EvalValue& a, const EvalValue& b) {
  auto is_int = [](const EvalValue& v) {
    if (v.is_scalar) return !v.scalar.is_f;
    return !dtype_is_float(v.values.dtype());
  };
  return is_int(a) && is_int(b);
}

EvalValue eval_expr(const PSet& ds, const Expr& e);

EvalValue eval_binary(const PSet& ds, const BinaryExpr& b) {
  const std::string& op = b.op;
  if (op == "and" || op == "or") {
    EvalValue l = eval_expr(ds, *b.lhs);
    EvalValue r = eval_expr(ds, *b.rhs);
    require(l.is_mask && r.is_mask, "and/or needs boolean operands");
    EvalValue out;
    out.is_mask = true;
    out.mask.resize(l.mask.size());
    for (size_t i = 0; i < l.mask.size(); ++i)
      out.mask[i] = op == "and" ? (l.mask[i] && r.mask[i]) : (l.mask[i] || r.mask[i]);
    return out;
  }

  EvalValue l = eval_expr(ds, *b.lhs);
  EvalValue r = eval_expr(ds, *b.rhs);
  require(!(l.is_mask || r.is_mask), "arithmetic over boolean operands");
  bool is_cmp = op != "+" && op != "-" && op != "*" && op != "/";

  int64_t n = ds.rows;
  if (op == "/" && int_division(l, r)) {
    // integer division-by-zero must error like the compressed path
    for (int64_t i = 0; i < n; ++i) {
      Cell y = r.is_scalar ? r.scalar : cell_of(r.values, i);
      require(y.i != 0, "integer division by zero");
    }
  }

  if (is_cmp) {
    EvalValue out;
    out.is_mask = true;
    out.mask.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      Cell x = l.is_scalar ? l.scalar : cell_of(l.values, i);
      Cell y = r.is_scalar ? r.scalar : cell_of(r.values, i);
      out.mask[static_cast<size_t>(i)] = cmp_cell(x, y, op);
    }
    return out;
  }

  bool any_f = false;
  {
    Cell probe_l = l.is_scalar ? l.scalar : Cell{dtype_is_float(l.values.dtype()), 0, 0};
    Cell probe_r = r.is_scalar ? r.scalar : Cell{dtype_is_float(r.values.dtype()), 0, 0};
    any_f = probe_l.is_f || probe_r.is_f || op == "/";
  }
  EvalValue out;
  if (any_f) {
    TrackedVec<double> vals(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      Cell x = l.is_scalar ? l.scalar : cell_of(l.values, i);
      Cell y = r.is_scalar ? r.scalar : cell_of(r.values, i);
      vals[static_cast<size_t>(i)] = apply_cell(x, y, op).as_f();
    }
    out.values = Array::from(vals);
  } else {
    TrackedVec<int64_t> vals(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      Cell x = l.is_scalar ? l.scalar : cell_of(l.values, i);
      Cell y = r.is_scalar ? r.scalar : cell_of(r.values, i);
      vals[static_cast<size_t>(i)] = apply_cell(x, y, op).i;
    }
    out.values = Array::from(vals);
  }
  return out;
}

EvalValue eval_expr(const PSet& ds, const Expr& e) {
  return std::visit(
      [&](const auto& node) -> EvalValue {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ColumnRef>) {
          const PCol& c = ds.at(node.name);
          EvalValue v;
          v.values = c.values;
          v.dict = c.dict;
          v.is_date = c.is_date;
          return v;
        } else if constexpr (std::is_same_v<T, Literal>) {
          EvalValue v;
          v.is_scalar = true;
          if (std::holds_alternative<int64_t>(node.value))
            v.scalar = {false, std::get<int64_t>(node.value), 0};
          else if (std::holds_alternative<double>(node.value))
            v.scalar = {true, 0, std::get<double>(node.value)};
          else
            fail("string literal needs a column context");
          return v;
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          // string literals resolve against the opposite operand
          const BinaryExpr& b = node;
          auto is_string_lit = [](const ExprPtr& p) {
            const auto* lit = std::get_if<Literal>(&p->node);
            return lit && std::holds_alternative<std::string>(lit->value);
          };
          if (is_string_lit(b.lhs) || is_string_lit(b.rhs)) {
            const ExprPtr& lit_side = is_string_lit(b.lhs) ? b.lhs : b.rhs;
            const ExprPtr& col_side = is_string_lit(b.lhs) ? b.rhs : b.lhs;
            EvalValue cv = eval_expr(ds, *col_side);
            EvalValue lv;
            lv.is_scalar = true;
            lv.scalar = resolve_literal(std::get<Literal>(lit_side->node), cv);
            EvalValue out;
            int64_t n = ds.rows;
            out.is_mask = true;
            out.mask.resize(static_cast<size_t>(n));
            for (int64_t i = 0; i < n; ++i) {
              Cell x = cell_of(cv.values, i);
              bool flag = is_string_lit(b.lhs) ? cmp_cell(lv.scalar, x, b.op)
                                               : cmp_cell(x, lv.scalar, b.op);
              out.mask[static_cast<size_t>(i)] = flag;
            }
            return out;
          }
          return eval_binary(ds, b);
        } else {
          EvalValue v = eval_expr(ds, *node.arg);
          require(v.is_mask, "not needs a boolean operand");
          for (auto& bit : v.mask) bit = bit ? 0 : 1;
          return v;
        }
      },
      e.node);
}

PSet subscript(const PSet& ds, const TrackedVec<uint8_t>& keep) {
  PosVec rows;
  for (size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) rows.push_back(static_cast<int64_t>(i));
  PSet out;
  out.rows = static_cast<int64_t>(rows.size());
  for (const auto& c : ds.cols) {
    PCol nc{c.name, Array{}, c.dict, c.is_date};
    nc.values = dtype_dispatch(c.values.dtype(), [&](auto tag) {
      using T = decltype(tag);
      auto sp = c.values.template as<T>();
      TrackedVec<T> vals(rows.size());
      for (size_t i = 0; i < rows.size(); ++i)
        vals[i] = sp[static_cast<size_t>(rows[i])];
      return Array::from(vals);
    });
    out.cols.push_back(std::move(nc));
  }
  return out;
}

PSet gather_rows(const PSet& ds, const PosVec& rows) {
  PSet out;
  out.rows = static_cast<int64_t>(rows.size());
  for (const auto& c : ds.cols) {
    PCol nc{c.name, Array{}, c.dict, c.is_date};
    nc.values = dtype_dispatch(c.values.dtype(), [&](auto tag) {
      using T = decltype(tag);
      auto sp = c.values.template as<T>();
      TrackedVec<T> vals(rows.size());
      for (size_t i = 0; i < rows.size(); ++i)
        vals[i] = sp[static_cast<size_t>(rows[i])];
      return Array::from(vals);
    });
    out.cols.push_back(std::move(nc));
  }
  return out;
}

PSet exec_node(const Catalog& cat, const PlanNode& plan);

PSet exec_scan(const Catalog& cat, const ScanNode& n) {
  const Table& t = cat.at(n.table);
  PSet out;
  out.rows = t.rows;
  for (const auto& c : t.columns) {
    if (!n.columns.empty() &&
        std::find(n.columns.begin(), n.columns.end(), c.name) == n.columns.end())
      continue;
    out.cols.push_back({c.name, decode_full(*c.column), c.dict, c.is_date});
  }
  if (!n.columns.empty())
    require(out.cols.size() == n.columns.size(),
            "scan: a requested column is missing from " + n.table);
  return out;
}

// join key in comparable form; dictionary codes translate to the left
// side's dictionary
int64_t join_code(const PCol& right, const PCol& left, int64_t row) {
  if (right.dict && left.dict && right.dict != left.dict) {
    const std::string& s = right.dict->at(right.values.i64_at(row));
    return left.dict->find(s).value_or(-1);
  }
  return right.values.i64_at(row);
}

PSet exec_join(const Catalog& cat, const JoinNode& n) {
  PSet left = exec_node(cat, *n.left);
  PSet right = exec_node(cat, *n.right);
  const PCol& lc = left.at(n.left_on);
  const PCol& rc = right.at(n.right_on);

  bool float_keys =
      dtype_is_float(lc.values.dtype()) || dtype_is_float(rc.values.dtype());

  auto float_key = [](double v) {
    if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
    return static_cast<int64_t>(std::bit_cast<uint64_t>(v));
  };
  std::unordered_multimap<int64_t, int64_t> table;  // key bits -> right row
  table.reserve(static_cast<size_t>(right.rows));
  for (int64_t r = 0; r < right.rows; ++r) {
    int64_t key = float_keys ? float_key(rc.values.f64_at(r)) : join_code(rc, lc, r);
    table.emplace(key, r);
  }

  PosVec lrows, rrows;
  for (int64_t l = 0; l < left.rows; ++l) {
    int64_t key = float_keys ? float_key(lc.values.f64_at(l)) : lc.values.i64_at(l);
    auto [lo, hi] = table.equal_range(key);
    if (n.semi) {
      if (lo != hi) lrows.push_back(l);
      continue;
    }
    for (auto it = lo; it != hi; ++it) {
      lrows.push_back(l);
      rrows.push_back(it->second);
    }
  }

  if (n.semi) return gather_rows(left, lrows);

  PSet lg = gather_rows(left, lrows);
  PSet rg = gather_rows(right, rrows);
  PSet out = std::move(lg);
  for (auto& c : rg.cols) {
    for (const auto& existing : out.cols)
      require(existing.name != c.name,
              "join: duplicate output column name '" + c.name + "'; project first");
    out.cols.push_back(std::move(c));
  }
  return out;
}

struct AggAcc {
  int64_t count = 0;
  int64_t isum = 0;
  double fsum = 0;
  double fsq = 0;
  Cell min, max;
};

PSet exec_group_agg(const Catalog& cat, const GroupAggNode& n) {
  PSet in = exec_node(cat, *n.input);

  std::vector<const PCol*> key_cols;
  for (const auto& k : n.keys) key_cols.push_back(&in.at(k));

  std::vector<EvalValue> agg_inputs;
  for (const auto& a : n.aggs) {
    if (a.expr) {
      EvalValue v = eval_expr(in, *a.expr);
      require(!v.is_mask && !v.is_scalar, "aggregate input must be a column expression");
      agg_inputs.push_back(std::move(v));
    } else {
      agg_inputs.emplace_back();
    }
  }

  std::map<std::vector<Cell>, int64_t> groups;  // ascending composite key
  std::vector<std::vector<AggAcc>> accs;        // [group][agg]
  std::vector<std::vector<Cell>> group_keys;

  for (int64_t row = 0; row < in.rows; ++row) {
    std::vector<Cell> key;
    key.reserve(key_cols.size());
    for (const auto* kc : key_cols) key.push_back(cell_of(kc->values, row));
    auto [it, inserted] = groups.try_emplace(key, static_cast<int64_t>(accs.size()));
    if (inserted) {
      accs.emplace_back(n.aggs.size());
      group_keys.push_back(key);
    }
    auto& ga = accs[static_cast<size_t>(it->second)];
    for (size_t a = 0; a < n.aggs.size(); ++a) {
      AggAcc& acc = ga[a];
      if (!n.aggs[a].expr) {
        ++acc.count;
        continue;
      }
      Cell v = cell_of(agg_inputs[a].values, row);
      if (acc.count == 0) {
        acc.min = v;
        acc.max = v;
      } else {
        if (v < acc.min) acc.min = v;
        if (acc.max < v) acc.max = v;
      }
      ++acc.count;
      if (v.is_f) acc.fsum += v.f;
      else acc.isum += v.i;
      acc.fsq += v.as_f() * v.as_f();
    }
  }

  // groups with no keys: one global group even for empty input
  if (n.keys.empty() && accs.empty()) {
    accs.emplace_back(n.aggs.size());
    group_keys.emplace_back();
  }

  int64_t n_groups = static_cast<int64_t>(accs.size());
  PSet out;
  out.rows = n_groups;

  // map iteration order is already ascending by composite key
  PosVec order;
  if (!n.keys.empty()) {
    for (const auto& [key, gid] : groups) order.push_back(gid);
  } else {
    order = {0};
  }

  for (size_t k = 0; k < key_cols.size(); ++k) {
    const PCol* kc = key_cols[k];
    PCol nc{n.keys[k], Array{}, kc->dict, kc->is_date};
    nc.values = dtype_dispatch(kc->values.dtype(), [&](auto tag) {
      using T = decltype(tag);
      TrackedVec<T> vals(static_cast<size_t>(n_groups));
      for (int64_t g = 0; g < n_groups; ++g) {
        const Cell& c = group_keys[static_cast<size_t>(order[static_cast<size_t>(g)])]
                                  [k];
        vals[static_cast<size_t>(g)] =
            static_cast<T>(c.is_f ? static_cast<T>(c.f) : static_cast<T>(c.i));
      }
      return Array::from(vals);
    });
    out.cols.push_back(std::move(nc));
  }

  for (size_t a = 0; a < n.aggs.size(); ++a) {
    const auto& spec = n.aggs[a];
    bool int_in = spec.expr && !dtype_is_float(agg_inputs[a].values.dtype());
    PCol nc{spec.name, Array{}, nullptr, false};
    auto get = [&](int64_t g) -> AggAcc& {
      return accs[static_cast<size_t>(order[static_cast<size_t>(g)])][a];
    };
    using agg::AggFn;
    switch (spec.fn) {
      case AggFn::Count: {
        TrackedVec<int64_t> vals(static_cast<size_t>(n_groups));
        for (int64_t g = 0; g < n_groups; ++g) vals[static_cast<size_t>(g)] = get(g).count;
        nc.values = Array::from(vals);
        break;
      }
      case AggFn::Sum: {
        if (int_in) {
          TrackedVec<int64_t> vals(static_cast<size_t>(n_groups));
          for (int64_t g = 0; g < n_groups; ++g) vals[static_cast<size_t>(g)] = get(g).isum;
          nc.values = Array::from(vals);
        } else {
          TrackedVec<double> vals(static_cast<size_t>(n_groups));
          for (int64_t g = 0; g < n_groups; ++g) vals[static_cast<size_t>(g)] = get(g).fsum;
          nc.values = Array::from(vals);
        }
        break;
      }
      case AggFn::Min:
      case AggFn::Max: {
        bool want_min = spec.fn == AggFn::Min;
        if (int_in) {
          TrackedVec<int64_t> vals(static_cast<size_t>(n_groups));
          for (int64_t g = 0; g < n_groups; ++g)
            vals[static_cast<size_t>(g)] = want_min ? get(g).min.i : get(g).max.i;
          nc.values = Array::from(vals);
        } else {
          TrackedVec<double> vals(static_cast<size_t>(n_groups));
          for (int64_t g = 0; g < n_groups; ++g)
            vals[static_cast<size_t>(g)] = want_min ? get(g).min.as_f() : get(g).max.as_f();
          nc.values = Array::from(vals);
        }
        break;
      }
      case AggFn::Avg:
      case AggFn::Std:
      case AggFn::Var: {
        TrackedVec<double> vals(static_cast<size_t>(n_groups));
        for (int64_t g = 0; g < n_groups; ++g) {
          AggAcc& acc = get(g);
          if (acc.count == 0) {
            vals[static_cast<size_t>(g)] = std::numeric_limits<double>::quiet_NaN();
            continue;
          }
          double cnt = static_cast<double>(acc.count);
          double mean = (int_in ? static_cast<double>(acc.isum) : acc.fsum) / cnt;
          if (spec.fn == AggFn::Avg) {
            vals[static_cast<size_t>(g)] = mean;
          } else {
            double var = std::max(0.0, acc.fsq / cnt - mean * mean);
            vals[static_cast<size_t>(g)] = spec.fn == AggFn::Var ? var : std::sqrt(var);
          }
        }
        nc.values = Array::from(vals);
        break;
      }
    }
    out.cols.push_back(std::move(nc));
  }
  return out;
}

PSet exec_node(const Catalog& cat, const PlanNode& plan) {
  return std::visit(
      [&](const auto& n) -> PSet {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ScanNode>) {
          return exec_scan(cat, n);
        } else if constexpr (std::is_same_v<T, FilterNode>) {
          PSet in = exec_node(cat, *n.input);
          EvalValue m = eval_expr(in, *n.pred);
          require(m.is_mask, "filter predicate must be boolean");
          return subscript(in, m.mask);
        } else if constexpr (std::is_same_v<T, ProjectNode>) {
          PSet in = exec_node(cat, *n.input);
          PSet out;
          out.rows = in.rows;
          for (const auto& item : n.items) {
            EvalValue v = eval_expr(in, *item.expr);
            require(!v.is_mask && !v.is_scalar, "projection must be a column expression");
            out.cols.push_back({item.name, std::move(v.values), v.dict, v.is_date});
          }
          return out;
        } else if constexpr (std::is_same_v<T, JoinNode>) {
          return exec_join(cat, n);
        } else {
          return exec_group_agg(cat, n);
        }
      },
      plan.node);
}

}  // namespace

ResultTable exec_plain(const Catalog& decoded, const PlanNode& plan) {
  PSet final = exec_node(decoded, plan);
  ResultTable out;
  out.rows = final.rows;
  for (auto& c : final.cols) {
    out.names.push_back(c.name);
    out.dicts.push_back(c.dict);
    out.columns.push_back(std::move(c.values));
  }
  return out;
}

}  // namespace runq::query::detail
