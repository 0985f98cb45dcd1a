#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

#include "memkern/app/scenario.hpp"
#include "memkern/errors.hpp"

namespace memkern::app {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kFieldSamples = 129;

void write_field(const std::filesystem::path& file, const std::function<double(double)>& fn) {
  SpatialField field{uniform_points(kFieldSamples), {}};
  for (double x : field.x) field.value.push_back(fn(x));
  std::ofstream out(file);
  write_field_csv(out, field);
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

double bump(double x) { return 4.0 * x * (1.0 - x); }

double wave(double x) {
  return 0.5 * std::sin(std::numbers::pi * x) + 0.2 * std::sin(3.0 * std::numbers::pi * x);
}

Json base_config(const std::string& name, const std::string& order, const std::string& forward) {
  Json forcing = Json::array({Json{{"type", "const"}, {"value", 1.0}},
                              Json{{"type", "sin"}, {"a", 0.5}, {"omega", 2.0}}, nullptr, nullptr});
  return Json{{"description", name},
              {"kind", "roundtrip"},
              {"order", order},
              {"forward", forward},
              {"grid", Json{{"T", 1.0}, {"N", 400}}},
              {"operator", Json{{"J", 4}, {"basis", "dirichlet_laplacian_1d"}, {"j0", 1}}},
              {"data", Json{{"forcing", forcing}}},
              {"field_points", kFieldSamples}};
}

}  // namespace

std::vector<std::string> demo_names() { return {"example1-m0", "example1-m1", "example2-m0", "example2-m1"}; }

ScenarioConfig prepare_demo(const std::string& name, const std::filesystem::path& dir) {
  Json doc;
  if (name == "example1-m0") {
    // second order, u(0) and u'(0) prescribed
    doc = base_config(name, "second", "ivp");
    doc["kernel"] = Json{{"type", "exp"}, {"a", 1.0}, {"b", -1.0}};
    doc["data"]["u0"] = Json{{"csv", "u0.csv"}};
  } else if (name == "example1-m1") {
    // second order, u(0) and u(T) prescribed
    doc = base_config(name, "second", "bvp");
    doc["kernel"] = Json{{"type", "exp"}, {"a", 1.0}, {"b", -1.0}};
    doc["data"]["u0"] = Json{{"csv", "u0.csv"}};
    doc["data"]["u2"] = Json{{"csv", "u2.csv"}};
  } else if (name == "example2-m0") {
    // first order, u(0) prescribed, l(0) = 0
    doc = base_config(name, "first", "ivp");
    doc["kernel"] = Json{{"type", "linear"}, {"a", 0.0}, {"b", 1.0}};
    doc["data"]["u0"] = Json{{"csv", "u0.csv"}};
  } else if (name == "example2-m1") {
    // first order, u(T) prescribed, l(0) = 0
    doc = base_config(name, "first", "bvp");
    doc["kernel"] = Json{{"type", "linear"}, {"a", 0.0}, {"b", 1.0}};
    doc["data"]["u2"] = Json{{"csv", "u2.csv"}};
  } else {
    std::string known;
    for (const auto& n : demo_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown demo '" + name + "' (available: " + known + ")");
  }

  std::filesystem::create_directories(dir);
  if (doc["data"].contains("u0")) write_field(dir / "u0.csv", bump);
  if (doc["data"].contains("u2")) write_field(dir / "u2.csv", wave);
  {
    std::ofstream out(dir / "config.json");
    out << doc.dump(2) << '\n';
  }
  ScenarioConfig config = parse_config(doc, dir);
  config.output = dir;
  return config;
}

}  // namespace memkern::app
