#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "memkern/app/scenario.hpp"
#include "memkern/errors.hpp"

using namespace memkern;
using namespace memkern::app;
using Json = nlohmann::ordered_json;

namespace {

const std::filesystem::path kScenarios = MEMKERN_SCENARIO_DIR;

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("memkern-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json minimal(const std::string& kind) {
  return Json{{"kind", kind},
              {"grid", Json{{"T", 1.0}, {"N", 50}}},
              {"operator", Json{{"J", 2}}},
              {"kernel", 1.0}};
}

}  // namespace

TEST_CASE("closed forms: values and exact derivatives") {
  const auto poly = ClosedForm::parse(Json::parse(R"({"type": "poly", "coefficients": [1, -2, 0, 4]})"));
  CHECK(poly(0.5) == doctest::Approx(1.0 - 1.0 + 0.5));
  CHECK(poly(0.5, 1) == doctest::Approx(-2.0 + 12.0 * 0.25));
  CHECK(poly(0.5, 2) == doctest::Approx(24.0 * 0.5));
  CHECK(poly(0.5, 3) == doctest::Approx(24.0));
  CHECK(poly(0.5, 4) == 0.0);

  // every catalogue entry against a central-difference oracle
  const char* specs[] = {
      R"(2.5)",
      R"({"type": "linear", "a": 1, "b": -3})",
      R"({"type": "exp", "a": 2, "b": -0.7})",
      R"({"type": "sin", "a": 1.5, "omega": 3, "phase": 0.2})",
      R"({"type": "sum", "terms": [{"type": "exp"}, {"type": "poly", "coefficients": [0, 0, 1]}]})",
  };
  for (const char* s : specs) {
    CAPTURE(s);
    const auto f = ClosedForm::parse(Json::parse(s));
    const double h = 1e-3;
    for (double t : {0.0, 0.3, 0.9}) {
      for (int d = 1; d <= 3; ++d) {
        const double fd = (f(t + h, d - 1) - f(t - h, d - 1)) / (2.0 * h);
        CHECK(std::abs(f(t, d) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
      }
    }
  }

  CHECK_THROWS_AS(ClosedForm::parse(Json::parse(R"({"type": "tanh"})")), ConfigError);
  CHECK_THROWS_AS(ClosedForm::parse(Json::parse(R"({"type": "const"})")), ConfigError);
  CHECK_THROWS_AS(ClosedForm::parse(Json::parse(R"({"type": "poly", "coefficients": []})")), ConfigError);
  CHECK_THROWS_AS(ClosedForm::parse(Json::parse(R"("one")")), ConfigError);
}

TEST_CASE("series from csv files") {
  const auto dir = scratch("series");
  const TimeGrid grid(1.0, 10);
  {
    std::ofstream out(dir / "k.csv");
    out << "t,h\n";
    for (std::size_t n = 0; n <= 10; ++n) out << grid.node(n) << "," << 2.0 * grid.node(n) << "\n";
  }
  const auto s = Series::parse(Json{{"csv", "k.csv"}}, dir);
  CHECK_FALSE(s.analytic());
  CHECK_FALSE(s.derivative(grid, 1).has_value());
  CHECK(s.sample(grid)[10] == doctest::Approx(2.0));
  CHECK_THROWS_AS(s.sample(TimeGrid(1.0, 20)), ConfigError);
  CHECK_THROWS_AS(Series::parse(Json{{"csv", "missing.csv"}}, dir), ConfigError);
}

TEST_CASE("config validation") {
  const std::filesystem::path here = ".";
  CHECK_NOTHROW(parse_config(minimal("ivp2"), here));

  auto bad = minimal("ivp3");
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("ivp2");
  bad["colour"] = "blue";
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("ivp2");
  bad.erase("kernel");
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("bvp2");
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);
  bad["data"] = Json{{"u2", Json::array({1.0, 0.0})}};
  CHECK_NOTHROW(parse_config(bad, here));

  bad = minimal("ivp2");
  bad["data"] = Json{{"u0", Json::array({1.0})}};
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("identify-h");
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);
  bad["data"] = Json{{"measurement", 1.0}};
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);
  bad["data"]["psi"] = 0.0;
  CHECK_NOTHROW(parse_config(bad, here));

  bad = minimal("roundtrip");
  bad["order"] = "first";
  bad["route"] = "firstkind";
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("ivp2");
  bad["operator"]["j0"] = 5;
  CHECK_THROWS_AS(parse_config(bad, here), ConfigError);

  bad = minimal("ivp2");
  bad["operator"] = Json{{"basis", "none"}, {"eigenvalues", Json::array({1.0, 4.0, 9.0})}};
  CHECK(parse_config(bad, here).make_operator().modes() == 3);

  CHECK_THROWS_AS(load_config("/definitely/not/here.json"), ConfigError);
}

TEST_CASE("spatial fields are projected onto the modes") {
  const auto dir = scratch("fields");
  SpatialField field{uniform_points(257), {}};
  for (double x : field.x) field.value.push_back(3.0 * std::numbers::sqrt2 * std::sin(std::numbers::pi * x));
  {
    std::ofstream out(dir / "u0.csv");
    write_field_csv(out, field);
  }
  auto doc = minimal("ivp2");
  doc["data"] = Json{{"u0", Json{{"csv", "u0.csv"}}}};
  const auto c = parse_config(doc, dir);
  CHECK(c.data.u0[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(std::abs(c.data.u0[1]) <= 1e-10);
}

TEST_CASE("roundtrip scenario recovers h = 1") {
  const auto c = load_config(kScenarios / "roundtrip-h1.json");
  const auto ev = evaluate(c);
  REQUIRE(ev.error.has_value());
  CHECK(*ev.error <= 5e-3);
  CHECK(ev.diagnostics["compatibility"]["all_pass"].get<bool>());
}

TEST_CASE("identify-h with g(0) = 0 is a solver error") {
  const auto c = load_config(kScenarios / "identify-zero-g0.json");
  CHECK_THROWS_WITH_AS(evaluate(c), doctest::Contains("(u_0,phi)=0"), SolverError);
}

TEST_CASE("check scenario on exact synthetic data passes") {
  const auto ev = evaluate(load_config(kScenarios / "check-exact.json"));
  CHECK(ev.diagnostics["compatibility"]["all_pass"].get<bool>());
  for (const auto& ch : ev.diagnostics["compatibility"]["checks"]) CHECK(ch["pass"].get<bool>());
}

TEST_CASE("refine: observed orders") {
  SUBCASE("roundtrip h = 1") {
    auto c = load_config(kScenarios / "roundtrip-h1.json");
    c.grid.N = 100;
    const auto t = refine(c, 3);
    CHECK(t.reference == "oracle");
    REQUIRE(t.rows.size() == 3);
    for (std::size_t k = 1; k < 3; ++k) {
      REQUIRE(t.rows[k].order.has_value());
      CHECK(*t.rows[k].order >= 1.8);
      CHECK(*t.rows[k].order <= 2.2);
    }
  }
  SUBCASE("h = 0 is reproduced exactly") {
    const auto t = refine(load_config(kScenarios / "ivp2-free.json"), 3);
    CHECK(t.exact);
    CHECK(format_refinement(t).find("exact") != std::string::npos);
  }
  SUBCASE("first-kind route") {
    const auto t = refine(load_config(kScenarios / "roundtrip-firstkind.json"), 3);
    for (std::size_t k = 1; k < 3; ++k) {
      REQUIRE(t.rows[k].order.has_value());
      CHECK(*t.rows[k].order >= 1.8);
      CHECK(*t.rows[k].order <= 2.2);
    }
  }
  SUBCASE("self-convergence without an oracle") {
    auto c = load_config(kScenarios / "bvp2-positive.json");
    c.grid.N = 100;
    const auto t = refine(c, 3);
    CHECK(t.reference == "self");
    CHECK(t.rows.size() == 2);
    CHECK(*t.rows[1].order == doctest::Approx(2.0).epsilon(0.1));
  }
  CHECK_THROWS_AS(refine(load_config(kScenarios / "ivp2-free.json"), 1), ConfigError);
}

TEST_CASE("outputs are deterministic across thread counts") {
  for (const char* name : {"bvp2-positive.json", "check-exact.json"}) {
    CAPTURE(name);
    auto c = load_config(kScenarios / name);
    c.threads = 1;
    c.output = scratch("det1");
    const auto one = write_outputs(c, evaluate(c));
    c.threads = 4;
    c.output = scratch("det4");
    const auto four = write_outputs(c, evaluate(c));
    for (const auto& entry : std::filesystem::directory_iterator(one)) {
      const auto file = entry.path().filename();
      CAPTURE(file.string());
      CHECK(slurp(one / file) == slurp(four / file));
    }
  }
}

TEST_CASE("output directory honours the environment") {
  ScenarioConfig c;
  c.output = "from-config";
  ::unsetenv("MEMKERN_OUTPUT_DIR");
  CHECK(output_directory(c) == "from-config");
  ::setenv("MEMKERN_OUTPUT_DIR", "from-env", 1);
  CHECK(output_directory(c) == "from-env");
  ::unsetenv("MEMKERN_OUTPUT_DIR");
}

TEST_CASE("demos") {
  for (const auto& name : demo_names()) {
    CAPTURE(name);
    const auto dir = scratch(name);
    const auto c = prepare_demo(name, dir);
    CHECK(std::filesystem::exists(dir / "config.json"));
    const auto ev = evaluate(c);
    REQUIRE(ev.error.has_value());
    CHECK(*ev.error <= 5e-3);
    CHECK(ev.diagnostics["compatibility"]["all_pass"].get<bool>());
  }
  CHECK_THROWS_AS(prepare_demo("example3", scratch("bad-demo")), ConfigError);
}
