#include "memkern/app/closed_form.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "memkern/csv.hpp"
#include "memkern/errors.hpp"

namespace memkern::app {

namespace {

double number(const nlohmann::ordered_json& spec, const char* key, double fallback) {
  if (!spec.contains(key)) return fallback;
  const auto& v = spec.at(key);
  if (!v.is_number()) throw ConfigError(std::string("closed form field '") + key + "' must be a number");
  return v.get<double>();
}

double required(const nlohmann::ordered_json& spec, const char* key) {
  if (!spec.contains(key)) throw ConfigError(std::string("closed form needs field '") + key + "'");
  return number(spec, key, 0.0);
}

}  // namespace

ClosedForm::ClosedForm(Type type, std::vector<double> params, std::vector<ClosedForm> terms)
    : type_(type), params_(std::move(params)), terms_(std::move(terms)) {}

ClosedForm ClosedForm::constant(double c) { return ClosedForm(Type::constant, {c}); }

ClosedForm ClosedForm::parse(const nlohmann::ordered_json& spec) {
  if (spec.is_number()) return constant(spec.get<double>());
  if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string()) {
    throw ConfigError("closed form must be a number or an object with a 'type'");
  }
  const auto type = spec.at("type").get<std::string>();
  if (type == "const") return constant(required(spec, "value"));
  if (type == "linear") return ClosedForm(Type::linear, {number(spec, "a", 0.0), number(spec, "b", 0.0)});
  if (type == "exp") return ClosedForm(Type::exp, {number(spec, "a", 1.0), number(spec, "b", 1.0)});
  if (type == "sin") {
    return ClosedForm(Type::sin, {number(spec, "a", 1.0), number(spec, "omega", 1.0), number(spec, "phase", 0.0)});
  }
  if (type == "poly") {
    const auto& c = spec.contains("coefficients") ? spec.at("coefficients") : nlohmann::ordered_json();
    if (!c.is_array() || c.empty()) throw ConfigError("poly needs a non-empty 'coefficients' array");
    std::vector<double> coeffs;
    for (const auto& v : c) {
      if (!v.is_number()) throw ConfigError("poly coefficients must be numbers");
      coeffs.push_back(v.get<double>());
    }
    return ClosedForm(Type::poly, std::move(coeffs));
  }
  if (type == "sum") {
    const auto& t = spec.contains("terms") ? spec.at("terms") : nlohmann::ordered_json();
    if (!t.is_array() || t.empty()) throw ConfigError("sum needs a non-empty 'terms' array");
    std::vector<ClosedForm> terms;
    for (const auto& term : t) terms.push_back(parse(term));
    return ClosedForm(Type::sum, {}, std::move(terms));
  }
  throw ConfigError("unknown closed form '" + type + "' (expected const, linear, poly, exp, sin or sum)");
}

double ClosedForm::operator()(double t, int derivative) const {
  if (derivative < 0) throw std::invalid_argument("ClosedForm: negative derivative order");
  const auto& p = params_;
  switch (type_) {
    case Type::constant:
      return derivative == 0 ? p[0] : 0.0;
    case Type::linear:
      return derivative == 0 ? p[0] + p[1] * t : derivative == 1 ? p[1] : 0.0;
    case Type::poly: {
      double s = 0.0;
      for (std::size_t i = p.size(); i-- > static_cast<std::size_t>(derivative);) {
        double falling = 1.0;
        for (int k = 0; k < derivative; ++k) falling *= static_cast<double>(i) - k;
        s = s * t + falling * p[i];
      }
      return s;
    }
    case Type::exp:
      return p[0] * std::pow(p[1], derivative) * std::exp(p[1] * t);
    case Type::sin:
      return p[0] * std::pow(p[1], derivative) * std::sin(p[1] * t + p[2] + derivative * std::numbers::pi / 2.0);
    case Type::sum: {
      double s = 0.0;
      for (const auto& term : terms_) s += term(t, derivative);
      return s;
    }
  }
  return 0.0;
}

GridFunction ClosedForm::sample(const TimeGrid& grid, int derivative) const {
  return GridFunction::sample(grid, [&](double t) { return (*this)(t, derivative); });
}

Series::Series(ClosedForm form) : form_(std::move(form)) {}

Series::Series(std::filesystem::path csv) : csv_(std::move(csv)) {}

Series Series::parse(const nlohmann::ordered_json& spec, const std::filesystem::path& base_dir) {
  if (spec.is_object() && spec.contains("csv")) {
    if (!spec.at("csv").is_string()) throw ConfigError("'csv' must be a path string");
    std::filesystem::path p = spec.at("csv").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("referenced file does not exist: " + p.string());
    return Series(std::move(p));
  }
  return Series(ClosedForm::parse(spec));
}

GridFunction Series::sample(const TimeGrid& grid) const {
  if (form_) return form_->sample(grid);
  std::ifstream in(csv_);
  if (!in) throw ConfigError("cannot open " + csv_.string());
  CsvTable table;
  try {
    table = read_csv(in);
  } catch (const std::exception& e) {
    throw ConfigError(csv_.string() + ": " + e.what());
  }
  if (table.header.size() != 2 || table.header[0] != "t") {
    throw ConfigError(csv_.string() + ": expected two columns with header t,<name>");
  }
  const auto& t = table.columns[0];
  if (t.size() != grid.size()) {
    throw ConfigError(csv_.string() + ": has " + std::to_string(t.size()) + " rows, the grid needs " +
                      std::to_string(grid.size()));
  }
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (std::abs(t[n] - grid.node(n)) > 1e-9 * grid.horizon()) {
      throw ConfigError(csv_.string() + ": time column does not match the grid at row " + std::to_string(n));
    }
  }
  return GridFunction(grid, table.columns[1]);
}

std::optional<GridFunction> Series::derivative(const TimeGrid& grid, int order) const {
  if (!form_) return std::nullopt;
  return form_->sample(grid, order);
}

}  // namespace memkern::app
