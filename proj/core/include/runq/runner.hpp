#pragma once

#include <map>

#include "runq/ingest.hpp"
#include "runq/plan.hpp"

namespace runq::query {

enum class RunMode { Compressed, Plain, Differential };

RunMode run_mode_from_name(std::string_view name);

struct Catalog {
  std::vector<Table> tables;

  const Table& at(std::string_view name) const {
    for (const auto& t : tables)
      if (t.name == name) return t;
    fail("no table named " + std::string(name));
  }
  bool has(std::string_view name) const {
    for (const auto& t : tables)
      if (t.name == name) return true;
    return false;
  }
};

struct RunOptions {
  io::HeuristicConfig heuristics;
  // table -> sort key columns, applied before encoding
  std::map<std::string, std::vector<std::string>> sort_by;
  int repetitions = 0;  // extra warm runs for bench timing
};

// Loads every <table>.csv + <table>.schema.json pair in the directory,
// applies the requested sort orders, and encodes per the heuristics.
Catalog load_catalog(const std::filesystem::path& dir, const RunOptions& opts = {});

// Result rows materialized as decoded plain arrays.
struct ResultTable {
  std::vector<std::string> names;
  std::vector<DictionaryPtr> dicts;  // per column, null for non-strings
  std::vector<Array> columns;
  int64_t rows = 0;
};

struct OpTiming {
  std::string label;
  double ms = 0;  // inclusive of inputs
};

struct ColumnStatsEntry {
  std::string table, column;
  std::string encoding;
  ColumnStats stats;
};

struct RunReport {
  ResultTable result;
  std::vector<ColumnStatsEntry> input_stats;
  std::vector<OpTiming> timings;
  double total_ms = 0;
  int64_t peak_alloc_bytes = 0;
  // differential mode keeps both peaks for the memory comparison
  int64_t peak_alloc_compressed = 0;
  int64_t peak_alloc_plain = 0;
  bool differential_match = true;
  std::string mismatch;          // first differing row, when not matching
  std::vector<double> warm_ms;   // bench runs (first/cold run discarded)
  double median_warm_ms = 0;
};

// Executes the plan. Compressed mode runs on the encoded columns; plain mode
// decodes all inputs and runs a straightforward row-oriented path (the
// oracle); differential runs both and compares result sets (order-insensitive,
// exact for integers, 1e-9 relative for floats).
RunReport run(const Catalog& catalog, const PlanNode& plan, RunMode mode,
              const RunOptions& opts = {});

std::vector<ColumnStatsEntry> report_stats(const Catalog& catalog);

// Canonical row ordering + tolerant comparison used by differential mode.
void canonicalize_result(ResultTable& t);
std::optional<std::string> compare_results(const ResultTable& got, const ResultTable& want);

std::string report_to_json(const RunReport& report);

namespace detail {
// Plain-path executor (oracle); defined in plain_exec.cpp and kept free of
// the encoded operator stack.
ResultTable exec_plain(const Catalog& decoded, const PlanNode& plan);
}  // namespace detail

}  // namespace runq::query
