#pragma once

#include <filesystem>

#include "runq/table.hpp"

namespace runq::io {

enum class FieldType { Int, Float, Str, Date };

struct FieldSchema {
  std::string name;
  FieldType type;
};

FieldType field_type_from_name(std::string_view name);

// Schema sidecar: a JSON list of {"name": ..., "type": "int|float|string|date"}.
std::vector<FieldSchema> load_schema(const std::filesystem::path& path);

// Comma-separated, first line is the header (must match the schema names),
// UTF-8, no quoting. Produces all-Plain columns; strings dictionary-coded,
// dates as days since 1970-01-01.
Table ingest_csv(const std::filesystem::path& csv, std::span<const FieldSchema> schema);

// "YYYY-MM-DD" to days since 1970-01-01 (plan literals against date columns).
int64_t parse_date_literal(std::string_view tok);

enum class Scheme { Plain, PlainCentered, Rle, RleIndex, PlainIndex };

std::string_view scheme_name(Scheme s);

struct EncodingChoice {
  Scheme scheme = Scheme::Plain;
  int64_t min_run = 2;
  double trim_fraction = 0.05;
  std::optional<int64_t> center;
  DType width = DType::I64;  // storage width of the (narrowed) plain base
};

struct HeuristicConfig {
  int64_t row_threshold = 1'000'000;
  double ratio_threshold = 20.0;
  double trim = 0.05;
  int64_t min_run = 2;
  // unit-run share above which a column counts as "many single-element runs"
  double unit_run_share = 0.5;
};

// Encoding-selection cascade, evaluated in order:
//   1. below row_threshold rows: Plain
//   2. RLE compression ratio above ratio_threshold: Rle
//   3. many unit runs, but the long runs alone still clear the ratio: RleIndex
//   4. trimming the extremes admits a narrower integer type: PlainIndex
//   5. otherwise Plain, centered when that alone narrows the type
EncodingChoice choose_encoding(const PlainColumn& col, const HeuristicConfig& cfg = {});

Column encode(const PlainColumn& col, const EncodingChoice& choice);

// Stable lexicographic sort of every column by the named key columns.
// Requires a table of Plain columns (the pre-encoding layout).
Table sort_table(const Table& t, std::span<const std::string> by);

Table encode_table(const Table& t, const HeuristicConfig& cfg = {});

Table decode_table(const Table& t);

}  // namespace runq::io
