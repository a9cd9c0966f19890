#include "graspguard/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "graspguard/error.hpp"

namespace graspguard {

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"t",     "p",  "p_dot", "f_c",         "f_c_est",     "u_nom",
                                             "u_safe", "h1", "h2",    "h3",          "h_max",       "d",
                                             "d_hat", "M_d", "theta_hat_k", "theta_hat_b", "flags"};
  return cols;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double* field(TraceRecord& r, std::size_t i) {
  double* fields[] = {&r.t,  &r.p,  &r.p_dot, &r.f_c, &r.f_c_est, &r.u_nom, &r.u_safe, &r.h1,
                      &r.h2, &r.h3, &r.h_max, &r.d,   &r.d_hat,   &r.M_d,   &r.theta_hat_k, &r.theta_hat_b};
  return fields[i];
}

constexpr std::size_t kDoubleColumns = 16;

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (TraceRecord r : trace) {
    for (std::size_t i = 0; i < kDoubleColumns; ++i) out << format_double(*field(r, i)) << ",";
    out << r.flags << "\n";
  }
}

Trace read_trace_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(source + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected;
  for (const auto& c : trace_columns()) expected += (expected.empty() ? "" : ",") + c;
  if (line != expected) throw ConfigError(source + ": unexpected trace header");

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TraceRecord r;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto bad = [&] { return ConfigError(source + ":" + std::to_string(line_no) + ": malformed trace row"); };
    for (; col < kDoubleColumns; ++col) {
      const auto res = std::from_chars(p, end, *field(r, col));
      if (res.ec != std::errc() || res.ptr == end || *res.ptr != ',') throw bad();
      p = res.ptr + 1;
    }
    const auto res = std::from_chars(p, end, r.flags);
    if (res.ec != std::errc() || res.ptr != end) throw bad();
    trace.push_back(r);
  }
  return trace;
}

void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  write_trace_csv(f, trace);
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

Trace read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  return read_trace_csv(f, path);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + name + "' (expected csv or markdown)");
}

void write_report(std::ostream& out, const std::string& title, const std::vector<FilterMetrics>& rows,
                  ReportFormat format) {
  auto verdict = [](const FilterMetrics& m) {
    std::string v;
    auto add = [&](bool hit, const char* name) {
      if (hit) v += (v.empty() ? "" : " ") + std::string(name);
    };
    add(m.violated_h1, "h1");
    add(m.violated_h2, "h2");
    add(m.violated_h3, "h3");
    add(m.violated_h_max, "h_max");
    return v;
  };
  if (format == ReportFormat::csv) {
    out << "filter,min_h1,min_h2,min_h3,min_h_max,violated,mean_input_deviation,infeasible_steps,steps\n";
    for (const auto& m : rows) {
      const std::string v = verdict(m);
      out << to_string(m.variant) << "," << format_double(m.min_h1) << "," << format_double(m.min_h2) << ","
          << format_double(m.min_h3) << "," << format_double(m.min_h_max) << "," << (v.empty() ? "none" : v)
          << "," << format_double(m.mean_input_deviation) << "," << m.infeasible_steps << "," << m.steps << "\n";
    }
    return;
  }
  out << "# " << title << "\n\n"
      << "Minimum barrier values over the run. Rows marked VIOLATED dropped below -1e-6.\n\n"
      << "| filter | min h1 | min h2 | min h3 | min h_max | safety | mean abs(u_safe - u_nom) | infeasible steps |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& m : rows) {
    const std::string v = verdict(m);
    out << "| " << to_string(m.variant) << " | " << format_double(m.min_h1) << " | " << format_double(m.min_h2)
        << " | " << format_double(m.min_h3) << " | " << format_double(m.min_h_max) << " | "
        << (v.empty() ? "ok" : "**VIOLATED** (" + v + ")") << " | " << format_double(m.mean_input_deviation)
        << " | " << m.infeasible_steps << " |\n";
  }
}

}  // namespace graspguard
