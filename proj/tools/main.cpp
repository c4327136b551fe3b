// runq: batch query runner over lightweight-compressed columns.
//
//   runq run    --plan q.json --data dir --mode compressed|plain|diff [--report out.json]
//   runq encode --data dir [--sort-by t:c1,c2] [--dump outdir] [--report out.json]
//   runq stats  --data dir [--report out.json]
//
// Exit codes: 0 success, 2 differential mismatch, 1 any other error.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "runq/runner.hpp"

namespace {

using runq::query::RunOptions;

void parse_sort_specs(const std::vector<std::string>& specs, RunOptions& opts) {
  for (const auto& spec : specs) {
    auto colon = spec.find(':');
    runq::require(colon != std::string::npos,
                  "--sort-by expects table:col1,col2 (got '" + spec + "')");
    std::string table = spec.substr(0, colon);
    std::vector<std::string> cols;
    std::string rest = spec.substr(colon + 1);
    size_t at = 0;
    while (at <= rest.size()) {
      size_t comma = rest.find(',', at);
      if (comma == std::string::npos) {
        cols.push_back(rest.substr(at));
        break;
      }
      cols.push_back(rest.substr(at, comma - at));
      at = comma + 1;
    }
    opts.sort_by[table] = std::move(cols);
  }
}

void write_output(const std::string& text, const std::string& report_path) {
  if (report_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(report_path);
  runq::require(out.good(), "cannot write report file " + report_path);
  out << text << "\n";
}

nlohmann::json stats_json(const std::vector<runq::query::ColumnStatsEntry>& entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : entries) {
    arr.push_back({{"table", s.table},
                   {"column", s.column},
                   {"encoding", s.encoding},
                   {"n_runs", s.stats.n_runs},
                   {"avg_run_length", s.stats.avg_run_length},
                   {"encoded_bytes", s.stats.encoded_bytes},
                   {"plain_bytes", s.stats.plain_bytes},
                   {"compression_ratio", s.stats.compression_ratio}});
  }
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query execution on lightweight-compressed columns"};
  app.require_subcommand(1);

  std::string plan_path, data_dir, mode_name = "compressed", report_path, dump_dir;
  std::vector<std::string> sort_specs;
  int repetitions = 0;
  int64_t row_threshold = 1'000'000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_dir, "directory of <table>.csv + <table>.schema.json")
        ->required();
    cmd->add_option("--sort-by", sort_specs, "table:col1,col2 sort order before encoding");
    cmd->add_option("--report", report_path, "write JSON output here instead of stdout");
    cmd->add_option("--row-threshold", row_threshold,
                    "rows below this stay Plain (encoding heuristic)");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "execute a JSON query plan");
  run_cmd->add_option("--plan", plan_path, "query plan JSON file")->required();
  run_cmd->add_option("--mode", mode_name, "compressed|plain|diff")
      ->default_val("compressed");
  run_cmd->add_option("--repetitions", repetitions, "extra warm runs for timing");
  add_common(run_cmd);

  CLI::App* encode_cmd = app.add_subcommand("encode", "ingest, sort, and encode tables");
  encode_cmd->add_option("--dump", dump_dir, "write binary column dumps to this directory");
  add_common(encode_cmd);

  CLI::App* stats_cmd = app.add_subcommand("stats", "per-column encoding statistics");
  add_common(stats_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions opts;
    opts.heuristics.row_threshold = row_threshold;
    opts.repetitions = repetitions;
    parse_sort_specs(sort_specs, opts);

    runq::query::Catalog catalog = runq::query::load_catalog(data_dir, opts);

    if (run_cmd->parsed()) {
      auto plan = runq::query::parse_plan_file(plan_path);
      auto mode = runq::query::run_mode_from_name(mode_name);
      runq::query::RunReport report = runq::query::run(catalog, *plan, mode, opts);
      write_output(runq::query::report_to_json(report), report_path);
      if (!report.differential_match) {
        std::cerr << "differential mismatch: " << report.mismatch << "\n";
        return 2;
      }
      return 0;
    }

    if (encode_cmd->parsed() || stats_cmd->parsed()) {
      if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (const auto& t : catalog.tables) {
          for (const auto& c : t.columns) {
            auto path = std::filesystem::path(dump_dir) / (t.name + "." + c.name + ".bin");
            std::ofstream out(path, std::ios::binary);
            runq::require(out.good(), "cannot write dump file " + path.string());
            runq::dump_column(*c.column, out);
          }
        }
      }
      write_output(stats_json(runq::query::report_stats(catalog)).dump(2), report_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
