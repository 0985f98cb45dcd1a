#include <fstream>
#include <set>

#include "memkern/app/scenario.hpp"
#include "memkern/errors.hpp"

namespace memkern::app {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::ivp2: return "ivp2";
    case Kind::ivp1: return "ivp1";
    case Kind::bvp2: return "bvp2";
    case Kind::bvp1: return "bvp1";
    case Kind::identify_h: return "identify-h";
    case Kind::identify_l: return "identify-l";
    case Kind::ip0: return "ip0";
    case Kind::roundtrip: return "roundtrip";
    case Kind::check: return "check";
  }
  return "?";
}

namespace {

using Json = nlohmann::ordered_json;

Kind parse_kind(const std::string& s) {
  for (Kind k : {Kind::ivp2, Kind::ivp1, Kind::bvp2, Kind::bvp1, Kind::identify_h, Kind::identify_l, Kind::ip0,
                 Kind::roundtrip, Kind::check}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown kind '" + s +
                    "' (expected ivp2, ivp1, bvp2, bvp1, identify-h, identify-l, ip0, roundtrip or check)");
}

void reject_unknown(const Json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

double get_number(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string get_string(const Json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::string one_of(const Json& obj, const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> options) {
  if (!obj.contains(key)) return fallback;
  const auto s = get_string(obj, key, "config");
  for (const char* o : options) {
    if (s == o) return s;
  }
  throw ConfigError("invalid value '" + s + "' for " + key);
}

Series parse_series(const Json& spec, const std::filesystem::path& base, const std::string& where) {
  try {
    return Series::parse(spec, base);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<double> parse_coefficients(const Json& spec, const SpectralOperator& op,
                                       const std::filesystem::path& base, const std::string& where) {
  if (spec.is_array()) {
    if (spec.size() != op.modes()) {
      throw ConfigError(where + " needs " + std::to_string(op.modes()) + " modal coefficients, got " +
                        std::to_string(spec.size()));
    }
    std::vector<double> c;
    for (const auto& v : spec) {
      if (!v.is_number()) throw ConfigError(where + " coefficients must be numbers");
      c.push_back(v.get<double>());
    }
    return c;
  }
  if (spec.is_object() && spec.contains("csv") && spec.at("csv").is_string()) {
    if (op.basis() != SpatialBasis::dirichlet_laplacian_1d) {
      throw ConfigError(where + ": spatial fields need the dirichlet_laplacian_1d basis");
    }
    std::filesystem::path p = spec.at("csv").get<std::string>();
    if (p.is_relative()) p = base / p;
    std::ifstream in(p);
    if (!in) throw ConfigError(where + ": referenced file does not exist: " + p.string());
    try {
      return project(read_field_csv(in), op);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + p.string() + ": " + e.what());
    }
  }
  throw ConfigError(where + " must be an array of modal coefficients or {\"csv\": <spatial field>}");
}

}  // namespace

SpectralOperator ScenarioConfig::make_operator() const {
  if (op.basis == SpatialBasis::dirichlet_laplacian_1d) return dirichlet_laplacian_1d(op.J, op.j0);
  return SpectralOperator(op.eigenvalues, op.j0, SpatialBasis::none);
}

ModalProblemData ScenarioConfig::make_modal(const TimeGrid& g) const {
  auto modal = ModalProblemData::zeros(make_operator(), g);
  if (data.has_u0) modal.u0 = data.u0;
  if (data.has_u1) modal.u1 = data.u1;
  if (data.has_u2) modal.u2 = data.u2;
  for (std::size_t j = 0; j < data.forcing.size(); ++j) {
    if (data.forcing[j]) modal.forcing[j] = data.forcing[j]->sample(g);
  }
  modal.validate();
  return modal;
}

ScenarioConfig parse_config(const Json& doc, const std::filesystem::path& base) {
  reject_unknown(doc, "config",
                 {"description", "kind", "grid", "operator", "kernel", "data", "order", "forward", "route",
                  "oracle", "tolerances", "threads", "field_points", "output"});
  ScenarioConfig c;
  c.source = doc;
  if (!doc.contains("kind")) throw ConfigError("config needs 'kind'");
  c.kind = parse_kind(get_string(doc, "kind", "config"));

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    reject_unknown(g, "grid", {"T", "N"});
    if (g.contains("T")) c.grid.T = get_number(g, "T", "grid");
    if (g.contains("N")) c.grid.N = get_count(g, "N", "grid");
  }
  if (!(c.grid.T > 0.0) || c.grid.N < 8) throw ConfigError("grid needs T > 0 and N >= 8");

  if (doc.contains("operator")) {
    const auto& o = doc.at("operator");
    reject_unknown(o, "operator", {"J", "basis", "eigenvalues", "j0"});
    if (o.contains("J")) c.op.J = get_count(o, "J", "operator");
    if (o.contains("j0")) c.op.j0 = get_count(o, "j0", "operator");
    const auto basis = one_of(o, "basis", "dirichlet_laplacian_1d", {"dirichlet_laplacian_1d", "none"});
    c.op.basis = basis == "none" ? SpatialBasis::none : SpatialBasis::dirichlet_laplacian_1d;
    if (o.contains("eigenvalues")) {
      if (c.op.basis != SpatialBasis::none) throw ConfigError("operator.eigenvalues requires basis \"none\"");
      const auto& ev = o.at("eigenvalues");
      if (!ev.is_array()) throw ConfigError("operator.eigenvalues must be an array");
      for (const auto& v : ev) {
        if (!v.is_number()) throw ConfigError("operator.eigenvalues must be numbers");
        c.op.eigenvalues.push_back(v.get<double>());
      }
      c.op.J = c.op.eigenvalues.size();
    } else if (c.op.basis == SpatialBasis::none) {
      throw ConfigError("basis \"none\" needs operator.eigenvalues");
    }
  }
  SpectralOperator op = [&] {
    try {
      return c.make_operator();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("operator: ") + e.what());
    }
  }();

  if (doc.contains("kernel")) c.kernel = parse_series(doc.at("kernel"), base, "kernel");

  c.data.forcing.assign(op.modes(), std::nullopt);
  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    reject_unknown(d, "data", {"u0", "u1", "u2", "forcing", "measurement", "psi", "g0", "lambda00", "fprime0phi"});
    if (d.contains("u0")) {
      c.data.u0 = parse_coefficients(d.at("u0"), op, base, "data.u0");
      c.data.has_u0 = true;
    }
    if (d.contains("u1")) {
      c.data.u1 = parse_coefficients(d.at("u1"), op, base, "data.u1");
      c.data.has_u1 = true;
    }
    if (d.contains("u2")) {
      c.data.u2 = parse_coefficients(d.at("u2"), op, base, "data.u2");
      c.data.has_u2 = true;
    }
    if (d.contains("forcing")) {
      const auto& f = d.at("forcing");
      if (!f.is_array() || f.size() != op.modes()) {
        throw ConfigError("data.forcing must be an array with one entry (or null) per mode");
      }
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (!f[j].is_null()) c.data.forcing[j] = parse_series(f[j], base, "data.forcing[" + std::to_string(j) + "]");
      }
    }
    if (d.contains("measurement")) c.data.measurement = parse_series(d.at("measurement"), base, "data.measurement");
    if (d.contains("psi")) c.data.psi = parse_series(d.at("psi"), base, "data.psi");
    if (d.contains("g0")) c.data.g0 = parse_series(d.at("g0"), base, "data.g0");
    if (d.contains("lambda00")) c.data.lambda00 = get_number(d, "lambda00", "data");
    if (d.contains("fprime0phi")) c.data.fprime0phi = get_number(d, "fprime0phi", "data");
  }

  c.order = one_of(doc, "order", "second", {"second", "first"});
  c.forward = one_of(doc, "forward", "ivp", {"ivp", "bvp"});
  c.route = one_of(doc, "route", "main", {"main", "firstkind"});

  if (doc.contains("oracle")) {
    const auto& o = doc.at("oracle");
    reject_unknown(o, "oracle", {"kernel", "solution"});
    if (o.contains("kernel")) c.oracle.kernel = parse_series(o.at("kernel"), base, "oracle.kernel");
    if (o.contains("solution")) {
      const auto& s = o.at("solution");
      if (!s.is_array() || s.size() != op.modes()) throw ConfigError("oracle.solution needs one entry per mode");
      for (std::size_t j = 0; j < s.size(); ++j) {
        c.oracle.solution.push_back(parse_series(s[j], base, "oracle.solution[" + std::to_string(j) + "]"));
      }
    }
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    reject_unknown(t, "tolerances", {"bvp", "compatibility"});
    if (t.contains("bvp")) c.tolerances.bvp = get_number(t, "bvp", "tolerances");
    if (t.contains("compatibility")) c.tolerances.compatibility = get_number(t, "compatibility", "tolerances");
  }
  if (doc.contains("threads")) c.threads = static_cast<unsigned>(std::max<std::size_t>(1, get_count(doc, "threads", "config")));
  if (doc.contains("field_points")) c.field_points = get_count(doc, "field_points", "config");
  if (doc.contains("output")) c.output = get_string(doc, "output", "config");

  // kind-specific requirements
  const bool needs_kernel = c.kind == Kind::ivp2 || c.kind == Kind::ivp1 || c.kind == Kind::bvp2 ||
                            c.kind == Kind::bvp1 || c.kind == Kind::roundtrip ||
                            (c.kind == Kind::check && !c.data.measurement);
  if (needs_kernel && !c.kernel) throw ConfigError(to_string(c.kind) + " needs 'kernel'");
  const bool bvp_kind = c.kind == Kind::bvp2 || c.kind == Kind::bvp1 ||
                        ((c.kind == Kind::roundtrip || c.kind == Kind::check) && c.forward == "bvp");
  if (bvp_kind && !c.data.has_u2) throw ConfigError(to_string(c.kind) + " with a boundary condition at T needs data.u2");
  const bool identify_kind = c.kind == Kind::identify_h || c.kind == Kind::identify_l || c.kind == Kind::ip0;
  if (identify_kind && !c.data.measurement) throw ConfigError(to_string(c.kind) + " needs data.measurement");
  if (identify_kind && !c.data.psi && !c.data.forcing[c.op.j0 - 1]) {
    throw ConfigError(to_string(c.kind) + " needs data.psi or a forcing entry for the measured mode");
  }
  if (c.kind == Kind::ip0 && !c.data.g0 && !c.data.lambda00) throw ConfigError("ip0 needs data.g0 or data.lambda00");
  if (c.route == "firstkind" && (c.kind == Kind::identify_l || c.order == "first")) {
    throw ConfigError("route \"firstkind\" applies to second-order kernels only");
  }
  if (c.field_points != 0 && c.op.basis != SpatialBasis::dirichlet_laplacian_1d) {
    throw ConfigError("field_points needs the dirichlet_laplacian_1d basis");
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace memkern::app
