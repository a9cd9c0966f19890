#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "graspguard/batch.hpp"
#include "graspguard/error.hpp"
#include "graspguard/scenario.hpp"
#include "graspguard/trace_io.hpp"

namespace fs = std::filesystem;
using namespace graspguard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitViolation = 2;

std::vector<FilterVariant> parse_filters(const std::string& list) {
  std::vector<FilterVariant> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const FilterVariant v = parse_filter_variant(item);
    for (FilterVariant seen : out)
      if (seen == v) throw ConfigError("filter '" + item + "' listed twice");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--filters is empty");
  return out;
}

std::string report_name(ReportFormat f) { return f == ReportFormat::csv ? "report.csv" : "report.md"; }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  const fs::path probe = fs::path(dir) / ".graspguard_write_probe";
  std::ofstream f(probe);
  if (!f) throw ConfigError("output directory '" + dir + "' is not writable");
  f.close();
  fs::remove(probe, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("write to '" + path.string() + "' failed");
}

int cmd_run(const std::string& scenario_path, const std::string& filters, const std::string& out_dir,
            const std::optional<unsigned long long>& seed, const std::string& format_name) {
  const ReportFormat format = parse_report_format(format_name);
  Scenario sc = load_scenario(scenario_path);
  if (seed) sc.seed = *seed;
  const std::vector<FilterVariant> variants = filters.empty() ? sc.filters : parse_filters(filters);
  ensure_directory(out_dir);

  const std::vector<RunResult> results = run_jobs_parallel(jobs_for(sc, variants));

  std::vector<FilterMetrics> rows;
  bool violated = false;
  for (const auto& r : results) {
    write_trace_file((fs::path(out_dir) / ("trace_" + to_string(r.variant) + ".csv")).string(), r.trace);
    rows.push_back(r.metrics);
    violated = violated || r.metrics.violated();
  }
  std::ostringstream report;
  write_report(report, "Safety filter comparison: " + sc.name, rows, format);
  write_text(fs::path(out_dir) / report_name(format), report.str());
  std::cout << report.str();
  if (violated) {
    std::cerr << "safety violation detected\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
  const Scenario sc = parse_scenario_unchecked(
      [&] {
        std::ifstream f(scenario_path);
        if (!f) throw ConfigError("cannot read scenario file '" + scenario_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
      }(),
      scenario_path);
  const ValidationReport r = validate_scenario(sc);
  for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
  if (!r.ok()) {
    for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
    return kExitConfig;
  }
  std::cout << "ok\n";
  return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& format_name) {
  const ReportFormat format = parse_report_format(format_name);
  std::vector<FilterMetrics> rows;
  for (FilterVariant v : all_filter_variants()) {
    const fs::path p = fs::path(dir) / ("trace_" + to_string(v) + ".csv");
    if (!fs::exists(p)) continue;
    const Trace trace = read_trace_file(p.string());
    if (trace.empty()) throw ConfigError("'" + p.string() + "' has no records");
    rows.push_back(metrics(trace, v));
  }
  if (rows.empty()) throw ConfigError("no trace_<filter>.csv files in '" + dir + "'");
  std::ostringstream report;
  write_report(report, "Safety filter comparison: " + dir, rows, format);
  write_text(fs::path(dir) / report_name(format), report.str());
  std::cout << report.str();
  bool violated = false;
  for (const auto& m : rows) violated = violated || m.violated();
  return violated ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graspguard: safety filters for compliant grasping, simulated"};
  app.require_subcommand(1);

  std::string scenario_path, filters, out_dir = "out", format = "markdown";
  std::optional<unsigned long long> seed;

  auto* run = app.add_subcommand("run", "Run every filter of a scenario, write traces and a report");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--filters", filters, "Comma-separated subset of cbf,racbf,rcbf,dobcbf");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--format", format, "Report format: markdown or csv")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  validate->add_option("--scenario", scenario_path, "Scenario file")->required();

  auto* report = app.add_subcommand("report", "Rebuild the comparison report from trace CSVs");
  report->add_option("--out", out_dir, "Directory holding trace_<filter>.csv")->capture_default_str();
  report->add_option("--format", format, "Report format: markdown or csv")->capture_default_str();

  std::string schema_out;
  auto* schema = app.add_subcommand("schema", "Print the scenario file reference");
  schema->add_option("--out", schema_out, "Write the reference to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(scenario_path, filters, out_dir, seed, format);
    if (*validate) return cmd_validate(scenario_path);
    if (*report) return cmd_report(out_dir, format);
    if (*schema) {
      const std::string text = scenario_reference_markdown();
      if (schema_out.empty()) {
        std::cout << text;
      } else {
        write_text(schema_out, text);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
