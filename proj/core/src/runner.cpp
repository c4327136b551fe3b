#include "runq/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "runq/join.hpp"
#include "runq/kernels.hpp"
#include "runq/mask_ops.hpp"

namespace runq::query {

RunMode run_mode_from_name(std::string_view name) {
  if (name == "compressed") return RunMode::Compressed;
  if (name == "plain") return RunMode::Plain;
  if (name == "diff" || name == "differential") return RunMode::Differential;
  fail("unknown mode: " + std::string(name) + " (expected compressed|plain|diff)");
}

Catalog load_catalog(const std::filesystem::path& dir, const RunOptions& opts) {
  Catalog cat;
  std::vector<std::filesystem::path> schemas;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto p = entry.path();
    if (p.extension() == ".json" && p.stem().extension() == ".schema")
      schemas.push_back(p);
  }
  std::sort(schemas.begin(), schemas.end());
  require(!schemas.empty(), "no *.schema.json files in " + dir.string());

  for (const auto& sp : schemas) {
    std::string table_name = sp.stem().stem().string();
    auto csv = sp.parent_path() / (table_name + ".csv");
    auto schema = io::load_schema(sp);
    Table t = io::ingest_csv(csv, schema);
    t.name = table_name;
    auto it = opts.sort_by.find(table_name);
    if (it != opts.sort_by.end()) t = io::sort_table(t, it->second);
    cat.tables.push_back(io::encode_table(t, opts.heuristics));
  }
  return cat;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// --- compressed executor ---------------------------------------------------

struct CCol {
  std::string name;
  std::shared_ptr<const Column> col;
  DictionaryPtr dict;
  bool is_date = false;
};

struct CSet {
  int64_t rows = 0;
  std::vector<CCol> cols;

  const CCol& at(const std::string& name) const {
    for (const auto& c : cols)
      if (c.name == name) return c;
    fail("no column named '" + name + "' at this point in the plan");
  }
};

struct EvalV {
  std::shared_ptr<const Column> col;
  std::optional<MaskColumn> mask;
  std::optional<compute::Scalar> scalar;
  DictionaryPtr dict;
  bool is_date = false;

  bool is_col() const { return col != nullptr; }
  bool is_mask() const { return mask.has_value(); }
  bool is_scalar() const { return scalar.has_value(); }
};

struct Exec {
  const Catalog& cat;
  std::vector<OpTiming>* timings;

  CSet run(const PlanNode& n) {
    auto t0 = Clock::now();
    CSet out = dispatch(n);
    if (timings) timings->push_back({std::string(node_label(n)), ms_since(t0)});
    return out;
  }

  CSet dispatch(const PlanNode& n);
  EvalV eval(const CSet& ds, const Expr& e);
  MaskColumn eval_mask(const CSet& ds, const Expr& e) {
    EvalV v = eval(ds, e);
    require(v.is_mask(), "predicate must be boolean");
    return std::move(*v.mask);
  }
};

compute::Scalar resolve_string_literal(const std::string& s, const EvalV& col_side) {
  if (col_side.is_date) return compute::Scalar{io::parse_date_literal(s)};
  require(col_side.dict != nullptr,
          "string literal '" + s + "' compared against a non-string column");
  auto code = col_side.dict->find(s);
  return compute::Scalar{code.value_or(int64_t{-1})};
}

EvalV Exec::eval(const CSet& ds, const Expr& e) {
  return std::visit(
      [&](const auto& node) -> EvalV {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ColumnRef>) {
          const CCol& c = ds.at(node.name);
          EvalV v;
          v.col = c.col;
          v.dict = c.dict;
          v.is_date = c.is_date;
          return v;
        } else if constexpr (std::is_same_v<T, Literal>) {
          EvalV v;
          if (std::holds_alternative<int64_t>(node.value))
            v.scalar = compute::Scalar{std::get<int64_t>(node.value)};
          else if (std::holds_alternative<double>(node.value))
            v.scalar = compute::Scalar{std::get<double>(node.value)};
          else
            v.dict = nullptr;  // string literal; resolved by the parent
          return v;
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          if (node.op == "and" || node.op == "or") {
            MaskColumn l = eval_mask(ds, *node.lhs);
            MaskColumn r = eval_mask(ds, *node.rhs);
            EvalV v;
            v.mask = node.op == "and" ? masks::and_mask(l, r) : masks::or_mask(l, r);
            return v;
          }
          EvalV l = eval(ds, *node.lhs);
          EvalV r = eval(ds, *node.rhs);
          compute::BinOp op = compute::binop_from_name(node.op);

          // string literals pick up their code from the opposite side
          auto lit_string = [&](const ExprPtr& p) -> const std::string* {
            const auto* lit = std::get_if<Literal>(&p->node);
            if (!lit) return nullptr;
            return std::get_if<std::string>(&lit->value);
          };
          if (const std::string* s = lit_string(node.lhs)) {
            require(r.is_col(), "string literal needs a column operand");
            l.scalar = resolve_string_literal(*s, r);
          }
          if (const std::string* s = lit_string(node.rhs)) {
            require(l.is_col(), "string literal needs a column operand");
            r.scalar = resolve_string_literal(*s, l);
          }

          EvalV v;
          if (l.is_col() && r.is_col()) {
            auto res = compute::binary_op(*l.col, *r.col, op);
            if (std::holds_alternative<Column>(res))
              v.col = std::make_shared<Column>(std::get<Column>(std::move(res)));
            else
              v.mask = std::get<MaskColumn>(std::move(res));
          } else if (l.is_col() && r.is_scalar()) {
            auto res = compute::scalar_op(*l.col, *r.scalar, op, /*reversed=*/false);
            if (std::holds_alternative<Column>(res))
              v.col = std::make_shared<Column>(std::get<Column>(std::move(res)));
            else
              v.mask = std::get<MaskColumn>(std::move(res));
          } else if (l.is_scalar() && r.is_col()) {
            auto res = compute::scalar_op(*r.col, *l.scalar, op, /*reversed=*/true);
            if (std::holds_alternative<Column>(res))
              v.col = std::make_shared<Column>(std::get<Column>(std::move(res)));
            else
              v.mask = std::get<MaskColumn>(std::move(res));
          } else {
            fail("expression must reference at least one column");
          }
          return v;
        } else {
          EvalV a = eval(ds, *node.arg);
          require(a.is_mask(), "not needs a boolean operand");
          EvalV v;
          v.mask = masks::not_mask(*a.mask);
          return v;
        }
      },
      e.node);
}

// translate dictionary codes of `col` into the target dictionary's codes;
// strings absent there become -1 which never matches a real code
Column recode_column(const Column& col, const Dictionary& from, const Dictionary& to) {
  PosVec xlat(static_cast<size_t>(from.size()));
  for (int64_t c = 0; c < from.size(); ++c)
    xlat[static_cast<size_t>(c)] = to.find(from.at(c)).value_or(-1);
  auto remap = [&](const Array& v) {
    auto codes = v.to_i64();
    for (auto& c : codes) {
      require(c >= 0 && c < from.size(), "dictionary code out of range");
      c = xlat[static_cast<size_t>(c)];
    }
    return Array::from(codes);
  };
  switch (col.encoding()) {
    case Encoding::Plain: return PlainColumn(remap(decode_full(col)));
    case Encoding::Rle: {
      RleColumn c = col.rle();
      c.v = remap(c.v);
      return c;
    }
    case Encoding::Index: {
      IndexColumn c = col.index();
      c.v = remap(c.v);
      return c;
    }
    default: return recode_column(compute::normalize_basic(col), from, to);
  }
}

CSet Exec::dispatch(const PlanNode& plan) {
  return std::visit(
      [&](const auto& n) -> CSet {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ScanNode>) {
          const Table& t = cat.at(n.table);
          CSet out;
          out.rows = t.rows;
          for (const auto& c : t.columns) {
            if (!n.columns.empty() &&
                std::find(n.columns.begin(), n.columns.end(), c.name) == n.columns.end())
              continue;
            out.cols.push_back({c.name, c.column, c.dict, c.is_date});
          }
          if (!n.columns.empty())
            require(out.cols.size() == n.columns.size(),
                    "scan: a requested column is missing from " + n.table);
          return out;
        } else if constexpr (std::is_same_v<T, FilterNode>) {
          CSet in = run(*n.input);
          MaskColumn m = eval_mask(in, *n.pred);
          CSet out;
          out.rows = in.rows;
          for (const auto& c : in.cols) {
            out.cols.push_back(
                {c.name, std::make_shared<Column>(compute::filter(*c.col, m)), c.dict,
                 c.is_date});
          }
          return out;
        } else if constexpr (std::is_same_v<T, ProjectNode>) {
          CSet in = run(*n.input);
          CSet out;
          out.rows = in.rows;
          for (const auto& item : n.items) {
            EvalV v = eval(in, *item.expr);
            require(v.is_col(), "projection must be a column expression");
            out.cols.push_back({item.name, v.col, v.dict, v.is_date});
          }
          return out;
        } else if constexpr (std::is_same_v<T, JoinNode>) {
          CSet left = run(*n.left);
          CSet right = run(*n.right);
          const CCol& lc = left.at(n.left_on);
          const CCol& rc = right.at(n.right_on);

          std::shared_ptr<const Column> right_key = rc.col;
          if (lc.dict && rc.dict && lc.dict != rc.dict)
            right_key =
                std::make_shared<Column>(recode_column(*rc.col, *rc.dict, *lc.dict));

          if (n.semi) {
            MaskColumn m = joins::semi_join_mask(*lc.col, *right_key);
            CSet out;
            out.rows = left.rows;
            for (const auto& c : left.cols)
              out.cols.push_back(
                  {c.name, std::make_shared<Column>(compute::filter(*c.col, m)), c.dict,
                   c.is_date});
            return out;
          }

          joins::JoinResult jr = joins::get_join_index(*lc.col, *right_key);
          CSet out;
          out.rows = jr.cardinality;
          for (const auto& c : left.cols)
            out.cols.push_back(
                {c.name, std::make_shared<Column>(joins::apply_join_index(*c.col, jr.left)),
                 c.dict, c.is_date});
          for (const auto& c : right.cols) {
            for (const auto& existing : out.cols)
              require(existing.name != c.name,
                      "join: duplicate output column name '" + c.name + "'; project first");
            out.cols.push_back(
                {c.name, std::make_shared<Column>(joins::apply_join_index(*c.col, jr.right)),
                 c.dict, c.is_date});
          }
          return out;
        } else {
          CSet in = run(*n.input);
          CSet out;

          std::vector<Column> key_cols;
          for (const auto& k : n.keys)
            key_cols.push_back(compute::normalize_basic(*in.at(k).col));

          std::vector<Column> data_cols;
          std::vector<agg::AggFn> fns;
          for (const auto& a : n.aggs) {
            fns.push_back(a.fn);
            if (a.expr) {
              EvalV v = eval(in, *a.expr);
              require(v.is_col(), "aggregate input must be a column expression");
              data_cols.push_back(compute::normalize_basic(*v.col));
            } else {
              // count(*): count rows of the current selection through any column
              require(!in.cols.empty(), "count(*) on empty column set");
              data_cols.push_back(compute::normalize_basic(*in.cols.front().col));
            }
          }

          if (n.keys.empty()) {
            out.rows = 1;
            for (size_t i = 0; i < n.aggs.size(); ++i) {
              Array r = agg::aggregate_all(data_cols[i], fns[i]);
              out.cols.push_back({n.aggs[i].name,
                                  std::make_shared<Column>(PlainColumn(std::move(r))),
                                  nullptr, false});
            }
            return out;
          }

          agg::GroupAggregateResult r = agg::group_aggregate(key_cols, data_cols, fns);
          out.rows = r.n_groups;
          for (size_t k = 0; k < n.keys.size(); ++k) {
            const CCol& src = in.at(n.keys[k]);
            out.cols.push_back({n.keys[k],
                                std::make_shared<Column>(PlainColumn(std::move(r.keys[k]))),
                                src.dict, src.is_date});
          }
          for (size_t i = 0; i < n.aggs.size(); ++i)
            out.cols.push_back({n.aggs[i].name,
                                std::make_shared<Column>(PlainColumn(std::move(r.values[i]))),
                                nullptr, false});
          return out;
        }
      },
      plan.node);
}

ResultTable materialize(const CSet& ds) {
  ResultTable out;
  out.rows = -1;
  PosVec ref_positions;
  for (const auto& c : ds.cols) {
    RowsView rows = to_rows(*c.col);
    if (out.rows < 0) {
      out.rows = static_cast<int64_t>(rows.positions.size());
      ref_positions = rows.positions;
    } else {
      require(rows.positions == ref_positions,
              "internal: output columns disagree on covered rows");
    }
    out.names.push_back(c.name);
    out.dicts.push_back(c.dict);
    out.columns.push_back(std::move(rows.values));
  }
  if (out.rows < 0) out.rows = 0;
  return out;
}

// --- differential comparison ------------------------------------------------

int compare_cell(const Array& a, const Array& b, int64_t i, int64_t j) {
  bool af = dtype_is_float(a.dtype());
  bool bf = dtype_is_float(b.dtype());
  if (af || bf) {
    double x = a.f64_at(i), y = b.f64_at(j);
    bool xn = std::isnan(x), yn = std::isnan(y);
    if (xn && yn) return 0;
    if (xn) return -1;
    if (yn) return 1;
    if (x < y) return -1;
    if (y < x) return 1;
    return 0;
  }
  int64_t x = a.i64_at(i), y = b.i64_at(j);
  return x < y ? -1 : (y < x ? 1 : 0);
}

bool cell_close(const Array& a, const Array& b, int64_t i, int64_t j) {
  bool af = dtype_is_float(a.dtype());
  bool bf = dtype_is_float(b.dtype());
  if (!af && !bf) return a.i64_at(i) == b.i64_at(j);
  double x = a.f64_at(i), y = b.f64_at(j);
  if (std::isnan(x) && std::isnan(y)) return true;
  double tol = 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
  return std::fabs(x - y) <= tol;
}

}  // namespace

void canonicalize_result(ResultTable& t) {
  PosVec order = kernels::iota(t.rows);
  std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
    for (const auto& col : t.columns) {
      int c = compare_cell(col, col, a, b);
      if (c != 0) return c < 0;
    }
    return false;
  });
  for (auto& col : t.columns) col = kernels::gather(col, order);
}

std::optional<std::string> compare_results(const ResultTable& got,
                                           const ResultTable& want) {
  if (got.names != want.names) {
    std::string msg = "column names differ: [";
    for (const auto& n : got.names) msg += n + " ";
    msg += "] vs [";
    for (const auto& n : want.names) msg += n + " ";
    return msg + "]";
  }
  if (got.rows != want.rows)
    return "row count differs: " + std::to_string(got.rows) + " vs " +
           std::to_string(want.rows);
  for (int64_t r = 0; r < got.rows; ++r) {
    for (size_t c = 0; c < got.columns.size(); ++c) {
      if (!cell_close(got.columns[c], want.columns[c], r, r)) {
        return "first mismatch at row " + std::to_string(r) + ", column '" + got.names[c] +
               "': " + std::to_string(got.columns[c].f64_at(r)) + " vs " +
               std::to_string(want.columns[c].f64_at(r));
      }
    }
  }
  return std::nullopt;
}

std::vector<ColumnStatsEntry> report_stats(const Catalog& catalog) {
  std::vector<ColumnStatsEntry> out;
  for (const auto& t : catalog.tables) {
    for (const auto& c : t.columns) {
      ColumnStatsEntry e;
      e.table = t.name;
      e.column = c.name;
      e.encoding = std::string(encoding_name(c.column->encoding()));
      e.stats = stats(*c.column);
      out.push_back(std::move(e));
    }
  }
  return out;
}

RunReport run(const Catalog& catalog, const PlanNode& plan, RunMode mode,
              const RunOptions& opts) {
  RunReport report;
  report.input_stats = report_stats(catalog);

  auto run_compressed = [&](std::vector<OpTiming>* timings) {
    Exec ex{catalog, timings};
    return materialize(ex.run(plan));
  };
  auto run_plain = [&]() {
    Catalog decoded;
    for (const auto& t : catalog.tables) decoded.tables.push_back(io::decode_table(t));
    return detail::exec_plain(decoded, plan);
  };

  auto t0 = Clock::now();
  switch (mode) {
    case RunMode::Compressed: {
      mem::reset_peak();
      report.result = run_compressed(&report.timings);
      report.peak_alloc_bytes = mem::peak_bytes();
      break;
    }
    case RunMode::Plain: {
      mem::reset_peak();
      report.result = run_plain();
      report.peak_alloc_bytes = mem::peak_bytes();
      break;
    }
    case RunMode::Differential: {
      mem::reset_peak();
      ResultTable compressed = run_compressed(&report.timings);
      report.peak_alloc_compressed = mem::peak_bytes();
      mem::reset_peak();
      ResultTable plain = run_plain();
      report.peak_alloc_plain = mem::peak_bytes();
      report.peak_alloc_bytes = report.peak_alloc_compressed;

      canonicalize_result(compressed);
      canonicalize_result(plain);
      auto mismatch = compare_results(compressed, plain);
      report.differential_match = !mismatch.has_value();
      if (mismatch) report.mismatch = *mismatch;
      report.result = std::move(compressed);
      break;
    }
  }
  report.total_ms = ms_since(t0);

  if (opts.repetitions > 0) {
    // the timed run above is the discarded cold run
    for (int i = 0; i < opts.repetitions; ++i) {
      auto tw = Clock::now();
      if (mode == RunMode::Plain) {
        run_plain();
      } else {
        run_compressed(nullptr);
      }
      report.warm_ms.push_back(ms_since(tw));
    }
    std::vector<double> sorted = report.warm_ms;
    std::sort(sorted.begin(), sorted.end());
    report.median_warm_ms = sorted[sorted.size() / 2];
  }
  return report;
}

std::string report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["total_ms"] = report.total_ms;
  j["peak_alloc_bytes"] = report.peak_alloc_bytes;
  if (report.peak_alloc_plain > 0) {
    j["peak_alloc_compressed"] = report.peak_alloc_compressed;
    j["peak_alloc_plain"] = report.peak_alloc_plain;
  }
  j["differential_match"] = report.differential_match;
  if (!report.mismatch.empty()) j["mismatch"] = report.mismatch;

  nlohmann::json stats_j = nlohmann::json::array();
  for (const auto& s : report.input_stats) {
    stats_j.push_back({{"table", s.table},
                       {"column", s.column},
                       {"encoding", s.encoding},
                       {"n_runs", s.stats.n_runs},
                       {"avg_run_length", s.stats.avg_run_length},
                       {"encoded_bytes", s.stats.encoded_bytes},
                       {"plain_bytes", s.stats.plain_bytes},
                       {"compression_ratio", s.stats.compression_ratio}});
  }
  j["input_stats"] = std::move(stats_j);

  nlohmann::json timings_j = nlohmann::json::array();
  for (const auto& t : report.timings)
    timings_j.push_back({{"op", t.label}, {"ms", t.ms}});
  j["operator_timings"] = std::move(timings_j);

  if (!report.warm_ms.empty()) {
    j["warm_ms"] = report.warm_ms;
    j["median_warm_ms"] = report.median_warm_ms;
  }

  nlohmann::json result;
  result["columns"] = report.result.names;
  result["rows"] = nlohmann::json::array();
  int64_t limit = std::min<int64_t>(report.result.rows, 10000);  // cap the row dump
  for (int64_t r = 0; r < limit; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t c = 0; c < report.result.columns.size(); ++c) {
      const Array& col = report.result.columns[c];
      if (report.result.dicts[c]) {
        row.push_back(report.result.dicts[c]->at(col.i64_at(r)));
      } else if (dtype_is_float(col.dtype())) {
        row.push_back(col.f64_at(r));
      } else {
        row.push_back(col.i64_at(r));
      }
    }
    result["rows"].push_back(std::move(row));
  }
  result["row_count"] = report.result.rows;
  j["result"] = std::move(result);
  return j.dump(2);
}

}  // namespace runq::query
