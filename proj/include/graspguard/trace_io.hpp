#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graspguard/sim_harness.hpp"

namespace graspguard {

/// Column order of every trace CSV.
const std::vector<std::string>& trace_columns();

/// Floats with 17 significant digits, so reading back is bit-exact.
void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in, const std::string& source = "<stream>");

void write_trace_file(const std::string& path, const Trace& trace);
Trace read_trace_file(const std::string& path);

enum class ReportFormat { markdown, csv };

ReportFormat parse_report_format(const std::string& name);

/// One row per filter with min h1 / h2 / h3 / h_max, the violation verdict,
/// mean input deviation and infeasible step count.
void write_report(std::ostream& out, const std::string& title, const std::vector<FilterMetrics>& rows,
                  ReportFormat format);

std::string format_double(double v);

}  // namespace graspguard
