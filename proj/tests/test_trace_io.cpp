#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "graspguard/error.hpp"
#include "graspguard/trace_io.hpp"

using namespace graspguard;

namespace {

Trace random_trace(std::size_t n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 1e3);
  Trace t;
  for (std::size_t i = 0; i < n; ++i) {
    TraceRecord r;
    double* f[] = {&r.t,  &r.p,  &r.p_dot, &r.f_c, &r.f_c_est, &r.u_nom, &r.u_safe, &r.h1,
                   &r.h2, &r.h3, &r.h_max, &r.d,   &r.d_hat,   &r.M_d,   &r.theta_hat_k, &r.theta_hat_b};
    for (double* x : f) *x = N(rng) * std::pow(10.0, static_cast<double>(static_cast<int>(i % 40) - 20));
    r.flags = static_cast<std::uint32_t>(i % 16);
    t.push_back(r);
  }
  t[0].h1 = std::numeric_limits<double>::denorm_min();
  t[0].h2 = -0.0;
  return t;
}

}  // namespace

TEST_CASE("trace CSV round trip is bit exact") {
  const Trace t = random_trace(500);
  std::stringstream ss;
  write_trace_csv(ss, t);
  const Trace back = read_trace_csv(ss);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
  CHECK(std::signbit(back[0].h2));
  CHECK(back[0].h1 == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("trace header is checked") {
  std::stringstream bad("t,p\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ConfigError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_trace_csv(empty), ConfigError);
  std::stringstream ss;
  write_trace_csv(ss, random_trace(2));
  std::string text = ss.str();
  text.back() = 'x';
  text += "\n";
  std::stringstream broken(text);
  CHECK_THROWS_AS(read_trace_csv(broken), ConfigError);
}

TEST_CASE("report formats") {
  FilterMetrics ok;
  ok.variant = FilterVariant::rcbf;
  ok.min_h1 = 0.25;
  ok.min_h2 = 0.5;
  ok.min_h3 = 0.125;
  ok.min_h_max = 1.0;
  FilterMetrics bad = ok;
  bad.variant = FilterVariant::cbf;
  bad.min_h1 = -0.1;
  bad.violated_h1 = true;
  std::stringstream md;
  write_report(md, "t", {bad, ok}, ReportFormat::markdown);
  CHECK(md.str().find("| cbf | -0.10000000000000001 |") != std::string::npos);
  CHECK(md.str().find("**VIOLATED** (h1)") != std::string::npos);
  CHECK(md.str().find("| rcbf | 0.25 | 0.5 | 0.125 | 1 | ok |") != std::string::npos);
  std::stringstream csv;
  write_report(csv, "t", {ok}, ReportFormat::csv);
  CHECK(csv.str().find("rcbf,0.25,0.5,0.125,1,none,") != std::string::npos);
  CHECK(parse_report_format("md") == ReportFormat::markdown);
  CHECK_THROWS_AS(parse_report_format("json"), ConfigError);
}
