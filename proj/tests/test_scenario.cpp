#include <doctest.h>

#include <string>

#include "graspguard/config_text.hpp"
#include "graspguard/error.hpp"
#include "graspguard/scenario.hpp"

using namespace graspguard;

namespace {

bool has_message(const std::vector<std::string>& list, const std::string& needle) {
  for (const auto& m : list)
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config text: tables, types, comments") {
  const auto doc = ConfigDocument::parse(
      "top = 1\n"
      "# comment\n"
      "[a]\n"
      "s = \"x\\ty\"   # trailing\n"
      "b = true\n"
      "n = 1_000.5\n"
      "i = -inf\n"
      "arr = [1, 2,\n"
      "       3]\n");
  CHECK(doc.at("top").number == 1.0);
  CHECK(doc.at("a.s").string == "x\ty");
  CHECK(doc.at("a.b").boolean);
  CHECK(doc.at("a.n").number == 1000.5);
  CHECK(doc.at("a.i").number == -std::numeric_limits<double>::infinity());
  REQUIRE(doc.at("a.arr").items.size() == 3);
  CHECK(doc.at("a.arr").items[2].number == 3.0);
  CHECK(doc.where("a.arr") == "<string>:8");
}

TEST_CASE("config text: malformed input names the line") {
  auto msg = [](const std::string& t) {
    try {
      ConfigDocument::parse(t, "f.toml");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg("a = 1\na = 2\n").find("f.toml:2") != std::string::npos);
  CHECK(msg("[t]\n[t]\n").find("f.toml:2") != std::string::npos);
  CHECK(msg("x = \"open\n").find("f.toml:1") != std::string::npos);
  CHECK(msg("x = 1.2.3\n").find("f.toml:1") != std::string::npos);
  CHECK(msg("just words\n").find("f.toml:1") != std::string::npos);
  CHECK(msg("x = [1, 2\n").find("f.toml") != std::string::npos);
  CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/x.toml"), ConfigError);
}

TEST_CASE("empty text gives the default scenario") {
  const Scenario s = parse_scenario("");
  const Scenario d;
  CHECK(s.stiffness == d.stiffness);
  CHECK(s.filters.size() == 4);
  CHECK(s.dt_outer == doctest::Approx(1.0 / 125.0));
  CHECK(s.inner_steps() == 8);
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK(error_of("[plant]\nstifness = 3\n").find("plant.stifness") != std::string::npos);
  CHECK(error_of("[plant]\nstiffness = \"soft\"\n").find("plant.stiffness") != std::string::npos);
  CHECK(error_of("[run]\nfilters = [\"cbf\", \"mpc\"]\n").find("mpc") != std::string::npos);
  CHECK(error_of("schema_version = 2\n").find("schema_version") != std::string::npos);
  CHECK(error_of("[racbf]\ngamma = [1.0]\n").find("racbf.gamma") != std::string::npos);
  for (const char* bad : {"-1", "1.5", "18446744073709551616", "true"})
    CHECK(error_of(std::string("[run]\nseed = ") + bad + "\n").find("run.seed") != std::string::npos);
  CHECK(parse_scenario("[run]\nseed = 9_007_199_254_740_993\n").seed == 9007199254740993ull);
}

TEST_CASE("invariant violations are reported together") {
  Scenario s;
  s.dt_inner = 3e-3;  // does not divide 1/125
  s.stiffness = -1.0;
  const ValidationReport r = validate_scenario(s);
  CHECK_FALSE(r.ok());
  CHECK(has_message(r.errors, "dt_outer"));
  CHECK(has_message(r.errors, "plant.stiffness"));
}

TEST_CASE("dobcbf nu below (alpha + c)/2 is an error") {
  Scenario s;
  s.dob_nu = 20.0;
  const ValidationReport r = validate_scenario(s);
  CHECK(has_message(r.errors, "dobcbf.nu"));
  s.filters = {FilterVariant::cbf};
  CHECK(validate_scenario(s).ok());
}

TEST_CASE("unsafe initial state is an error") {
  Scenario s;
  s.initial_force = -7.0;  // beyond f_min = -6
  const ValidationReport r = validate_scenario(s);
  CHECK(has_message(r.errors, "h1"));
  CHECK_THROWS_AS(parse_scenario("[initial]\nforce = -7.0\n"), ConfigError);
}

TEST_CASE("unreachable pinch is an error") {
  Scenario s;
  s.pinch_end = {0.5, 0.5};
  CHECK(has_message(validate_scenario(s).errors, "finger"));
}

TEST_CASE("default cube scenario validates with its known warnings") {
  const ValidationReport r = validate_scenario(Scenario{});
  CHECK(r.ok());
  CHECK(has_message(r.warnings, "tightened set"));
}

TEST_CASE("model beliefs follow the scales") {
  Scenario s;
  s.e_max = 0.005;
  const ContactParams m = s.model_params();
  CHECK(m.k[0] == doctest::Approx(0.6 * 300.0));
  CHECK(m.b[0] == doctest::Approx(0.6 * 10.0));
  CHECK(m.mu == doctest::Approx(0.05));
  const ContactState x0 = s.initial_state();
  CHECK(contact_force(x0, s.true_params())[0] == doctest::Approx(-2.0));
}

TEST_CASE("disturbance shapes respect their bounds") {
  DisturbanceSpec ramp{DisturbanceShape::ramp, 3.0, 10.0, 1.0, 3.0, 1.0, 0.0};
  CHECK(ramp.at(0.5) == 0.0);
  CHECK(ramp.at(1.1) == doctest::Approx(1.0));
  CHECK(ramp.at(2.0) == doctest::Approx(3.0));
  DisturbanceSpec sine{DisturbanceShape::sinusoid, 2.0, 4.0, 0.0, 0.0, 1.0, 0.0};
  double prev = sine.at(0.0);
  for (int i = 1; i < 10000; ++i) {
    const double d = sine.at(i * 1e-3);
    CHECK(std::abs(d) <= 2.0 + 1e-12);
    CHECK(std::abs(d - prev) <= 4.0 * 1e-3 * (1 + 1e-9));
    prev = d;
  }
}

TEST_CASE("config text round trip") {
  Scenario s;
  s.name = "trip \"quoted\"";
  s.duration = 1.25;
  s.filters = {FilterVariant::rcbf, FilterVariant::cbf};
  s.disturbance = DisturbanceSpec{DisturbanceShape::sinusoid, 1.5, 3.0, 0.0, 0.0, -1.0, 0.1};
  s.sensing = SensingMode::truth;
  s.racbf_gamma = {12345.678901234567, 0.1};
  s.seed = 18446744073709551615ull;
  const Scenario t = parse_scenario_unchecked(to_config_text(s));
  CHECK(to_config_text(t) == to_config_text(s));
  CHECK(t.name == s.name);
  CHECK(t.filters == s.filters);
  CHECK(t.racbf_gamma == s.racbf_gamma);
  CHECK(t.seed == s.seed);
  CHECK(t.disturbance.sign == -1.0);
}

TEST_CASE("reference lists every key") {
  const std::string ref = scenario_reference_markdown();
  for (const char* key : {"run.duration", "plant.stiffness", "model.stiffness_scale", "limits.cone_rows",
                          "dobcbf.nu", "racbf.theta_max", "sensing.mode", "finger.pinch_seed"})
    CHECK(ref.find(key) != std::string::npos);
}

TEST_CASE("shipped scenarios parse") {
  const Scenario cube = load_scenario(std::string(GG_SCENARIO_DIR) + "/cube_sim.toml");
  CHECK(cube.filters.size() == 4);
  const Scenario nominal = load_scenario(std::string(GG_SCENARIO_DIR) + "/nominal.toml");
  CHECK(nominal.stiffness_scale == 1.0);
  CHECK_THROWS_AS(load_scenario("/nonexistent.toml"), ConfigError);
}
