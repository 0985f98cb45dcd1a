#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "memkern/timegrid.hpp"

namespace memkern::app {

/// Time functions from a fixed catalogue, all with exact derivatives:
///   {"type": "const", "value": c}                      c
///   {"type": "linear", "a": a, "b": b}                 a + b t
///   {"type": "poly", "coefficients": [c0, c1, ...]}    sum c_i t^i
///   {"type": "exp", "a": a, "b": b}                    a exp(b t)
///   {"type": "sin", "a": a, "omega": w, "phase": p}    a sin(w t + p)
///   {"type": "sum", "terms": [...]}                    sum of the above
/// A bare number is shorthand for "const".
class ClosedForm {
 public:
  static ClosedForm parse(const nlohmann::ordered_json& spec);
  static ClosedForm constant(double c);

  double operator()(double t, int derivative = 0) const;
  GridFunction sample(const TimeGrid& grid, int derivative = 0) const;

 private:
  enum class Type { constant, linear, poly, exp, sin, sum };

  ClosedForm(Type type, std::vector<double> params, std::vector<ClosedForm> terms = {});

  Type type_;
  std::vector<double> params_;
  std::vector<ClosedForm> terms_;
};

/// Time series given in closed form or as a CSV file with columns t,value
/// sampled on the scenario grid. Relative paths resolve against `base_dir`.
class Series {
 public:
  static Series parse(const nlohmann::ordered_json& spec, const std::filesystem::path& base_dir);
  explicit Series(ClosedForm form);

  bool analytic() const { return form_.has_value(); }
  GridFunction sample(const TimeGrid& grid) const;
  /// Exact derivative for closed forms; nullopt for files.
  std::optional<GridFunction> derivative(const TimeGrid& grid, int order) const;

 private:
  explicit Series(std::filesystem::path csv);

  std::optional<ClosedForm> form_;
  std::filesystem::path csv_;
};

}  // namespace memkern::app
