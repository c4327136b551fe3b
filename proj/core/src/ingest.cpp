#include "runq/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "runq/kernels.hpp"
#include "runq/primitives.hpp"

namespace runq::io {

FieldType field_type_from_name(std::string_view name) {
  if (name == "int") return FieldType::Int;
  if (name == "float") return FieldType::Float;
  if (name == "string" || name == "str") return FieldType::Str;
  if (name == "date") return FieldType::Date;
  fail("unknown field type: " + std::string(name));
}

std::vector<FieldSchema> load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open schema file " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  require(j.is_array(), "schema must be a JSON array: " + path.string());
  std::vector<FieldSchema> out;
  for (const auto& f : j) {
    out.push_back({f.at("name").get<std::string>(),
                   field_type_from_name(f.at("type").get<std::string>())});
  }
  return out;
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  size_t at = 0;
  while (true) {
    size_t comma = line.find(',', at);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(at));
      break;
    }
    out.push_back(line.substr(at, comma - at));
    at = comma + 1;
  }
  return out;
}

int64_t parse_int(std::string_view tok, int64_t row, size_t col) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require(ec == std::errc{} && ptr == tok.data() + tok.size(),
          "parse error at row " + std::to_string(row) + ", column " + std::to_string(col) +
              ": not an integer: '" + std::string(tok) + "'");
  return v;
}

double parse_float(std::string_view tok, int64_t row, size_t col) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require(ec == std::errc{} && ptr == tok.data() + tok.size(),
          "parse error at row " + std::to_string(row) + ", column " + std::to_string(col) +
              ": not a number: '" + std::string(tok) + "'");
  return v;
}

// YYYY-MM-DD to days since 1970-01-01
int64_t parse_date(std::string_view tok, int64_t row, size_t col) {
  auto bad = [&]() {
    fail("parse error at row " + std::to_string(row) + ", column " + std::to_string(col) +
         ": not a date (YYYY-MM-DD): '" + std::string(tok) + "'");
  };
  if (tok.size() != 10 || tok[4] != '-' || tok[7] != '-') bad();
  int y = static_cast<int>(parse_int(tok.substr(0, 4), row, col));
  int m = static_cast<int>(parse_int(tok.substr(5, 2), row, col));
  int d = static_cast<int>(parse_int(tok.substr(8, 2), row, col));
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad();
  return sys_days{ymd}.time_since_epoch().count();
}

}  // namespace

int64_t parse_date_literal(std::string_view tok) { return parse_date(tok, -1, 0); }

Table ingest_csv(const std::filesystem::path& csv, std::span<const FieldSchema> schema) {
  std::ifstream in(csv);
  require(in.good(), "cannot open data file " + csv.string());

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty file: " + csv.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line);
  require(header.size() == schema.size(),
          csv.string() + ": header has " + std::to_string(header.size()) +
              " fields, schema has " + std::to_string(schema.size()));
  for (size_t i = 0; i < header.size(); ++i)
    require(header[i] == schema[i].name,
            csv.string() + ": header field '" + std::string(header[i]) +
                "' does not match schema name '" + schema[i].name + "'");

  size_t ncols = schema.size();
  std::vector<TrackedVec<int64_t>> ints(ncols);
  std::vector<TrackedVec<double>> floats(ncols);
  std::vector<std::shared_ptr<Dictionary>> dicts(ncols);
  for (size_t c = 0; c < ncols; ++c)
    if (schema[c].type == FieldType::Str) dicts[c] = std::make_shared<Dictionary>();

  int64_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    auto fields = split_line(line);
    require(fields.size() == ncols, "parse error at row " + std::to_string(row) +
                                        ": expected " + std::to_string(ncols) +
                                        " fields, got " + std::to_string(fields.size()));
    for (size_t c = 0; c < ncols; ++c) {
      switch (schema[c].type) {
        case FieldType::Int: ints[c].push_back(parse_int(fields[c], row, c)); break;
        case FieldType::Float: floats[c].push_back(parse_float(fields[c], row, c)); break;
        case FieldType::Date: ints[c].push_back(parse_date(fields[c], row, c)); break;
        case FieldType::Str: ints[c].push_back(dicts[c]->intern(fields[c])); break;
      }
    }
    ++row;
  }

  Table t;
  t.name = csv.stem().string();
  t.rows = row;
  for (size_t c = 0; c < ncols; ++c) {
    TableColumn tc;
    tc.name = schema[c].name;
    tc.is_date = schema[c].type == FieldType::Date;
    if (schema[c].type == FieldType::Float) {
      tc.column = std::make_shared<Column>(PlainColumn(Array::from(floats[c])));
    } else {
      tc.column = std::make_shared<Column>(PlainColumn(Array::from(ints[c])));
    }
    tc.dict = dicts[c];
    t.columns.push_back(std::move(tc));
  }
  return t;
}

// --- encoding selection --------------------------------------------------------

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Plain: return "plain";
    case Scheme::PlainCentered: return "plain-centered";
    case Scheme::Rle: return "rle";
    case Scheme::RleIndex: return "rle+index";
    case Scheme::PlainIndex: return "plain+index";
  }
  return "?";
}

namespace {

struct RunProfile {
  int64_t n_runs = 0;
  int64_t unit_runs = 0;
  int64_t long_runs = 0;       // runs with length >= min_run
  int64_t long_run_rows = 0;
};

RunProfile profile_runs(const PlainColumn& col, int64_t min_run) {
  RunProfile rp;
  auto ne = kernels::adjacent_ne(col.values);
  int64_t run_len = 0;
  auto close_run = [&]() {
    if (run_len == 0) return;
    ++rp.n_runs;
    if (run_len == 1) ++rp.unit_runs;
    if (run_len >= min_run) {
      ++rp.long_runs;
      rp.long_run_rows += run_len;
    }
  };
  for (size_t i = 0; i < ne.size(); ++i) {
    if (ne[i]) {
      close_run();
      run_len = 1;
    } else {
      ++run_len;
    }
  }
  close_run();
  return rp;
}

// Width the values need after centering on the mid-range, ignoring trim.
std::pair<DType, int64_t> centered_width(const PlainColumn& col) {
  auto v = col.values.to_i64();
  if (col.center)
    for (auto& x : v) x += *col.center;
  int64_t lo = *std::min_element(v.begin(), v.end());
  int64_t hi = *std::max_element(v.begin(), v.end());
  auto center = static_cast<int64_t>((static_cast<__int128>(lo) + hi) / 2);
  __int128 mag = std::max<__int128>(static_cast<__int128>(hi) - center,
                                    center - static_cast<__int128>(lo));
  DType w = DType::I64;
  if (mag <= std::numeric_limits<int8_t>::max()) w = DType::I8;
  else if (mag <= std::numeric_limits<int16_t>::max()) w = DType::I16;
  else if (mag <= std::numeric_limits<int32_t>::max()) w = DType::I32;
  return {w, center};
}

}  // namespace

EncodingChoice choose_encoding(const PlainColumn& col, const HeuristicConfig& cfg) {
  EncodingChoice choice;
  choice.min_run = cfg.min_run;
  choice.trim_fraction = cfg.trim;
  choice.width = col.values.dtype();

  int64_t n = col.size();
  if (n < cfg.row_threshold) {
    choice.scheme = Scheme::Plain;
    return choice;
  }

  int64_t vw = dtype_width(col.logical);
  int64_t plain_bytes = n * vw;
  RunProfile rp = profile_runs(col, cfg.min_run);

  if (rp.n_runs > 0) {
    double rle_bytes = static_cast<double>(rp.n_runs) * static_cast<double>(vw + 16);
    if (static_cast<double>(plain_bytes) / rle_bytes > cfg.ratio_threshold) {
      choice.scheme = Scheme::Rle;
      return choice;
    }
  }

  if (rp.n_runs > 0 && rp.long_runs > 0 &&
      static_cast<double>(rp.unit_runs) >
          cfg.unit_run_share * static_cast<double>(rp.n_runs)) {
    double long_bytes = static_cast<double>(rp.long_runs) * static_cast<double>(vw + 16);
    double long_plain = static_cast<double>(rp.long_run_rows * vw);
    if (long_plain / long_bytes > cfg.ratio_threshold) {
      choice.scheme = Scheme::RleIndex;
      return choice;
    }
  }

  if (!dtype_is_float(col.logical)) {
    PlainPlusIndexColumn split = enc::plain_to_plain_index(col, cfg.trim);
    if (split.outliers.point_count() > 0 &&
        dtype_width(split.base.values.dtype()) < vw) {
      choice.scheme = Scheme::PlainIndex;
      choice.width = split.base.values.dtype();
      choice.center = split.base.center;
      return choice;
    }
    auto [w, center] = centered_width(col);
    if (dtype_width(w) < vw) {
      choice.scheme = Scheme::PlainCentered;
      choice.width = w;
      choice.center = center;
      return choice;
    }
  }
  choice.scheme = Scheme::Plain;
  return choice;
}

Column encode(const PlainColumn& col, const EncodingChoice& choice) {
  switch (choice.scheme) {
    case Scheme::Plain: return col;
    case Scheme::PlainCentered: {
      require(!dtype_is_float(col.logical), "centering requires integer values");
      auto v = col.values.to_i64();
      if (col.center)
        for (auto& x : v) x += *col.center;
      int64_t center = choice.center.value_or(0);
      for (auto& x : v) x -= center;
      return PlainColumn(Array::from(v).cast(choice.width), col.logical, center);
    }
    case Scheme::Rle: return enc::plain_to_rle(col);
    case Scheme::RleIndex: return enc::plain_to_rle_index(col, choice.min_run);
    case Scheme::PlainIndex: return enc::plain_to_plain_index(col, choice.trim_fraction);
  }
  fail("encode: unknown scheme");
}

Table sort_table(const Table& t, std::span<const std::string> by) {
  require(!by.empty(), "sort_table: no sort columns");
  std::vector<Array> keys;
  for (const auto& name : by) {
    const TableColumn& c = t.at(name);
    require(c.column->encoding() == Encoding::Plain,
            "sort_table: expects plain columns (sort before encoding)");
    keys.push_back(decode_full(*c.column));
  }

  // widen once so the sort comparator stays branch-cheap
  struct KeyView {
    bool is_float;
    TrackedVec<int64_t> iv;
    TrackedVec<double> fv;
  };
  std::vector<KeyView> views;
  for (const auto& k : keys) {
    KeyView kv;
    kv.is_float = dtype_is_float(k.dtype());
    if (kv.is_float) kv.fv = k.to_f64();
    else kv.iv = k.to_i64();
    views.push_back(std::move(kv));
  }

  PosVec perm = kernels::iota(t.rows);
  // lexicographic over the key list; stable to keep ties in row order
  std::stable_sort(perm.begin(), perm.end(), [&](int64_t a, int64_t b) {
    for (const auto& kv : views) {
      if (kv.is_float) {
        double va = kv.fv[static_cast<size_t>(a)], vb = kv.fv[static_cast<size_t>(b)];
        if (va < vb) return true;
        if (vb < va) return false;
      } else {
        int64_t va = kv.iv[static_cast<size_t>(a)], vb = kv.iv[static_cast<size_t>(b)];
        if (va < vb) return true;
        if (vb < va) return false;
      }
    }
    return false;
  });

  Table out;
  out.name = t.name;
  out.rows = t.rows;
  for (const auto& c : t.columns) {
    TableColumn tc = c;
    Array vals = decode_full(*c.column);
    tc.column = std::make_shared<Column>(PlainColumn(kernels::gather(vals, perm)));
    out.columns.push_back(std::move(tc));
  }
  return out;
}

Table encode_table(const Table& t, const HeuristicConfig& cfg) {
  Table out;
  out.name = t.name;
  out.rows = t.rows;
  for (const auto& c : t.columns) {
    TableColumn tc = c;
    require(c.column->encoding() == Encoding::Plain, "encode_table: table already encoded");
    EncodingChoice choice = choose_encoding(c.column->plain(), cfg);
    tc.column = std::make_shared<Column>(encode(c.column->plain(), choice));
    out.columns.push_back(std::move(tc));
  }
  return out;
}

Table decode_table(const Table& t) {
  Table out;
  out.name = t.name;
  out.rows = t.rows;
  for (const auto& c : t.columns) {
    TableColumn tc = c;
    tc.column = std::make_shared<Column>(PlainColumn(decode_full(*c.column)));
    out.columns.push_back(std::move(tc));
  }
  return out;
}

}  // namespace runq::io
