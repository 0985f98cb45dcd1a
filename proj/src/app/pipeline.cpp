#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "memkern/app/scenario.hpp"
#include "memkern/bvp.hpp"
#include "memkern/csv.hpp"
#include "memkern/errors.hpp"
#include "memkern/identify.hpp"

namespace memkern::app {

namespace {

using Json = nlohmann::ordered_json;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

std::vector<double> nodes(const TimeGrid& grid) {
  std::vector<double> t(grid.size());
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = grid.node(n);
  return t;
}

Artifact series_artifact(const std::string& file, const std::string& column, const GridFunction& f) {
  const auto v = f.values();
  return {file, to_csv(CsvTable{{"t", column}, {nodes(f.grid()), std::vector<double>(v.begin(), v.end())}})};
}

Artifact solution_artifact(const ModalSolution& sol) {
  CsvTable table{{"t"}, {nodes(sol.grid())}};
  for (std::size_t j = 1; j <= sol.modes.size(); ++j) {
    table.header.push_back("u_" + std::to_string(j));
    const auto v = sol.mode(j).values();
    table.columns.emplace_back(v.begin(), v.end());
  }
  return {"solution.csv", to_csv(table)};
}

std::optional<Artifact> field_artifact(const ScenarioConfig& c, const ModalSolution& sol) {
  if (c.field_points == 0) return std::nullopt;
  std::vector<double> at_T;
  for (const auto& m : sol.modes) at_T.push_back(m.back());
  const auto field = synthesize(at_T, sol.op, uniform_points(c.field_points));
  std::ostringstream out;
  write_field_csv(out, field);
  return Artifact{"field_T.csv", out.str()};
}

Json to_json(const BvpModeReport& r) {
  return Json{{"mode", r.mode},
              {"status", to_string(r.status)},
              {"c", r.c},
              {"denominator", r.denominator},
              {"numerator", r.numerator},
              {"denominator_tolerance", r.denominator_tolerance},
              {"numerator_tolerance", r.numerator_tolerance}};
}

Json to_json(const ConvergenceReport& r) {
  return Json{{"order", r.order == ProblemOrder::second ? "second" : "first"},
              {"M", r.M},
              {"c", r.c},
              {"L", r.L},
              {"terms", r.terms},
              {"partial_sums", r.partial_sums},
              {"tail_sum", r.tail_sum},
              {"growing", r.growing}};
}

Json to_json(const CompatibilityReport& r) {
  Json checks = Json::array();
  for (const auto& ch : r.checks) {
    Json item{{"name", ch.name}, {"actual", ch.actual}, {"tolerance", ch.tolerance}, {"pass", ch.pass}};
    if (ch.nonzero) {
      item["requirement"] = "nonzero";
    } else {
      item["expected"] = ch.expected;
      item["defect"] = ch.defect();
    }
    checks.push_back(std::move(item));
  }
  return Json{{"all_pass", r.all_pass()}, {"checks", std::move(checks)}};
}

Json to_json(const SignConditionReport& r) {
  auto first_failure = [&](const std::vector<bool>& v) -> Json {
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (!v[n]) return r.t[n];
    }
    return nullptr;
  };
  return Json{{"first_holds", r.first_holds()},
              {"second_holds", r.second_holds()},
              {"first_fails_at", first_failure(r.first)},
              {"second_fails_at", first_failure(r.second)},
              {"analytic_derivatives", r.analytic_derivatives}};
}

// (f'(t), phi) at the measured mode.
GridFunction forcing_derivative(const ScenarioConfig& c, const ModalProblemData& modal) {
  const std::size_t j = c.op.j0 - 1;
  const TimeGrid& grid = modal.grid();
  if (c.data.forcing[j]) {
    if (auto d = c.data.forcing[j]->derivative(grid, 1)) return *d;
  }
  return differentiate(modal.forcing[j], 1);
}

double max_mode_error(const ModalSolution& sol, const std::vector<Series>& oracle) {
  double e = 0.0;
  for (std::size_t j = 1; j <= sol.modes.size(); ++j) {
    e = std::max(e, max_abs_diff(sol.mode(j), oracle[j - 1].sample(sol.grid())));
  }
  return e;
}

struct Forward {
  ModalSolution solution;
  ModalProblemData modal;  // u1 filled with the recovered slopes after a second-order BVP
  std::vector<BvpModeReport> reports;
};

// Forward solve for the configured order and problem, with diagnostics.
Forward forward_solve(const ScenarioConfig& c, const ModalProblemData& modal, const Kernel& kernel,
                      bool second, bool bvp, Evaluation& ev) {
  Forward fw{ModalSolution{modal.op, {}, std::nullopt}, modal, {}};
  if (bvp) {
    auto b = second ? solve_bvp2(modal, kernel, c.tolerances.bvp, c.threads)
                    : solve_bvp1(modal, kernel, c.tolerances.bvp, c.threads);
    fw.solution = std::move(b.solution);
    fw.reports = std::move(b.reports);
    Json reports = Json::array();
    std::size_t nonunique = 0;
    for (const auto& r : fw.reports) {
      reports.push_back(to_json(r));
      if (r.status == BvpStatus::nonunique) ++nonunique;
      if (second) {
        fw.modal.u1[r.mode - 1] = r.c;
      } else {
        fw.modal.u0[r.mode - 1] = r.c;
      }
    }
    ev.diagnostics["bvp_modes"] = std::move(reports);
    ev.summary.emplace_back("bvp modes", std::to_string(fw.reports.size()) + " solved, " +
                                             std::to_string(nonunique) + " nonunique");
    double endpoint = 0.0;
    for (std::size_t j = 1; j <= modal.op.modes(); ++j) {
      endpoint = std::max(endpoint, std::abs(fw.solution.mode(j).back() - modal.u2[j - 1]));
    }
    ev.diagnostics["endpoint_defect"] = endpoint;
    ev.summary.emplace_back("endpoint defect", sci(endpoint));

    const auto conv = convergence_diagnostic(modal, kernel, second ? ProblemOrder::second : ProblemOrder::first);
    ev.diagnostics["convergence"] = to_json(conv);
    const bool bound = check_u_bound(fw.solution, conv);
    ev.diagnostics["u_bound_holds"] = bound;
    ev.summary.emplace_back("series tail sum", sci(conv.tail_sum));
    ev.summary.emplace_back("a priori bound", bound ? "holds" : "violated");

    const auto g = measure(fw.solution);
    const auto fphi = forcing_derivative(c, modal);
    const auto signs = second ? check_sign_conditions2(g, fphi, modal.op.measure_eigenvalue())
                              : check_sign_conditions1(g, fphi, modal.op.measure_eigenvalue());
    ev.diagnostics["sign_conditions"] = to_json(signs);
    ev.summary.emplace_back("sign conditions", signs.holds() ? "hold" : "do not hold");
  } else {
    fw.solution = second ? solve_ivp2(modal, kernel, c.threads) : solve_ivp1(modal, kernel, c.threads);
  }

  const double residual =
      second ? residual_ivp2(fw.solution, kernel, modal) : residual_ivp1(fw.solution, kernel, modal);
  ev.diagnostics["residual"] = residual;
  ev.summary.emplace_back("equation residual", sci(residual));
  if (second) {
    const double defect = initial_acceleration_defect(fw.solution, modal);
    ev.diagnostics["initial_acceleration_defect"] = defect;
  }
  if (fw.solution.cross_check) {
    ev.diagnostics["reduction_cross_check"] = *fw.solution.cross_check;
    ev.summary.emplace_back("first/second-order reduction gap", sci(*fw.solution.cross_check));
  }
  return fw;
}

Kernel make_kernel(const Series& s, const TimeGrid& grid, bool second) {
  return Kernel(s.sample(grid), second ? KernelRole::second_order : KernelRole::first_order,
                s.derivative(grid, 1));
}

IdentificationInput input_from_config(const ScenarioConfig& c, const ModalProblemData& modal) {
  const TimeGrid& grid = modal.grid();
  const Series& m = *c.data.measurement;
  MeasurementTrace g{m.sample(grid), m.derivative(grid, 1), m.derivative(grid, 2), m.derivative(grid, 3),
                     m.analytic() ? TraceSource::analytic : TraceSource::measured_sampled};
  IdentificationInput inp{std::move(g), GridFunction::zeros(grid), modal.op.measure_eigenvalue()};
  const std::optional<Series>& psi = c.data.psi ? c.data.psi : c.data.forcing[c.op.j0 - 1];
  inp.psi = psi->sample(grid);
  inp.psi_derivative = psi->derivative(grid, 1);
  if (c.data.g0) inp.g0 = c.data.g0->sample(grid);
  inp.lambda00 = c.data.lambda00;
  inp.fprime0phi = c.data.fprime0phi.value_or(
      inp.psi_derivative ? (*inp.psi_derivative)[0] : differentiate(inp.psi, 1)[0]);
  return inp;
}

IdentificationInput input_from_solution(const ScenarioConfig& c, const ModalProblemData& modal,
                                        const ModalSolution& sol) {
  IdentificationInput inp{measure(sol), modal.forcing[c.op.j0 - 1], modal.op.measure_eigenvalue()};
  inp.fprime0phi = forcing_derivative(c, modal)[0];
  return inp;
}

void identify_into(const ScenarioConfig& c, const IdentificationInput& inp, bool second,
                   const std::optional<Series>& truth, Evaluation& ev) {
  const TimeGrid& grid = inp.g.g.grid();
  IdentifiedKernel rec = [&] {
    if (!second) return identify_l(inp);
    if (c.kind == Kind::ip0) return identify_h_ip0(inp);
    return c.route == "firstkind" ? identify_h_firstkind(inp) : identify_h(inp);
  }();
  const std::string name = second ? "h" : "l";
  ev.artifacts.push_back(series_artifact("kernel.csv", name, rec.kernel.values()));
  Json id{{"kernel", name},
          {"route", second ? c.route : std::string("main")},
          {"derivatives", to_string(rec.path)},
          {"g0", inp.g.g[0]},
          {"lambda0", inp.lambda0}};
  ev.summary.emplace_back("identified kernel", name + " via " + to_string(rec.path) + " derivatives");
  if (!second) {
    const double l0 = l0_from_data(inp);
    id["l0_from_data"] = l0;
    id["l0_recovered"] = rec.kernel.values()[0];
    ev.summary.emplace_back("l(0) from data", sci(l0));
  }
  if (truth) {
    const double err = max_abs_diff(rec.kernel.values(), truth->sample(grid));
    id["max_kernel_error"] = err;
    ev.summary.emplace_back("max kernel error", sci(err));
    ev.error = err;
  }
  ev.diagnostics["identification"] = std::move(id);
  ev.primary = {rec.kernel.values()};
}

CompatibilityMode compatibility_mode(bool second, bool bvp) {
  if (second) return CompatibilityMode::second_order;
  return bvp ? CompatibilityMode::bvp_first_order : CompatibilityMode::first_order;
}

CompatibilityReport compatibility_into(const ScenarioConfig& c, const IdentificationInput& inp,
                                       const ModalProblemData& modal, CompatibilityMode mode, Evaluation& ev) {
  const auto rep = check_compatibility(inp, modal, mode, c.tolerances.compatibility);
  ev.diagnostics["compatibility"] = to_json(rep);
  ev.summary.emplace_back("compatibility", rep.all_pass() ? "all checks pass" : "FAILED");
  for (const auto& ch : rep.checks) {
    ev.summary.emplace_back("  " + ch.name,
                            (ch.pass ? "pass" : "fail") +
                                (ch.nonzero ? " (value " + sci(ch.actual) + ")" : " (defect " + sci(ch.defect()) + ")"));
  }
  return rep;
}

}  // namespace

Evaluation evaluate(const ScenarioConfig& c) {
  const TimeGrid grid = c.make_grid();
  const ModalProblemData modal = c.make_modal(grid);
  Evaluation ev;
  ev.diagnostics["kind"] = to_string(c.kind);
  ev.diagnostics["grid"] = Json{{"T", grid.horizon()}, {"N", grid.steps()}};
  ev.diagnostics["modes"] = modal.op.modes();
  ev.diagnostics["measured_mode"] = modal.op.measure_mode();
  ev.summary.emplace_back("kind", to_string(c.kind));
  ev.summary.emplace_back("grid", "T = " + sci(grid.horizon()) + ", N = " + std::to_string(grid.steps()));

  const bool second = c.kind == Kind::ivp2 || c.kind == Kind::bvp2 || c.kind == Kind::identify_h ||
                      c.kind == Kind::ip0 ||
                      ((c.kind == Kind::roundtrip || c.kind == Kind::check) && c.order == "second");
  const bool bvp = c.kind == Kind::bvp2 || c.kind == Kind::bvp1 ||
                   ((c.kind == Kind::roundtrip || c.kind == Kind::check) && c.forward == "bvp");

  switch (c.kind) {
    case Kind::ivp2:
    case Kind::ivp1:
    case Kind::bvp2:
    case Kind::bvp1: {
      const auto fw = forward_solve(c, modal, make_kernel(*c.kernel, grid, second), second, bvp, ev);
      ev.artifacts.push_back(solution_artifact(fw.solution));
      ev.artifacts.push_back(series_artifact("measurement.csv", "g", measure(fw.solution).g));
      if (auto f = field_artifact(c, fw.solution)) ev.artifacts.push_back(std::move(*f));
      if (!c.oracle.solution.empty()) {
        ev.error = max_mode_error(fw.solution, c.oracle.solution);
        ev.diagnostics["max_solution_error"] = *ev.error;
        ev.summary.emplace_back("max solution error", sci(*ev.error));
      }
      ev.primary = fw.solution.modes;
      break;
    }
    case Kind::identify_h:
    case Kind::identify_l:
    case Kind::ip0: {
      const auto inp = input_from_config(c, modal);
      if (c.data.has_u0) compatibility_into(c, inp, modal, compatibility_mode(second, false), ev);
      identify_into(c, inp, second, c.oracle.kernel, ev);
      break;
    }
    case Kind::roundtrip: {
      const auto fw = forward_solve(c, modal, make_kernel(*c.kernel, grid, second), second, bvp, ev);
      ev.artifacts.push_back(series_artifact("measurement.csv", "g", measure(fw.solution).g));
      if (auto f = field_artifact(c, fw.solution)) ev.artifacts.push_back(std::move(*f));
      const auto inp = input_from_solution(c, fw.modal, fw.solution);
      compatibility_into(c, inp, fw.modal, compatibility_mode(second, bvp), ev);
      identify_into(c, inp, second, c.kernel, ev);
      break;
    }
    case Kind::check: {
      std::optional<IdentificationInput> inp;
      ModalProblemData data = modal;
      if (c.data.measurement) {
        inp = input_from_config(c, modal);
      } else {
        auto fw = forward_solve(c, modal, make_kernel(*c.kernel, grid, second), second, bvp, ev);
        inp = input_from_solution(c, fw.modal, fw.solution);
        data = std::move(fw.modal);
      }
      const auto rep = compatibility_into(c, *inp, data, compatibility_mode(second, bvp), ev);
      double worst = 0.0;
      for (const auto& ch : rep.checks) {
        if (!ch.nonzero) worst = std::max(worst, std::abs(ch.defect()));
      }
      ev.error = worst;
      ev.primary = {inp->g.g};
      ev.artifacts.push_back(series_artifact("measurement.csv", "g", inp->g.g));
      break;
    }
  }
  return ev;
}

std::filesystem::path output_directory(const ScenarioConfig& config) {
  if (const char* env = std::getenv("MEMKERN_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return config.output;
}

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::filesystem::path write_files(const ScenarioConfig& config, std::vector<Artifact> files) {
  const auto dir = output_directory(config);
  std::filesystem::create_directories(dir);
  Json listing = Json::array();
  for (const auto& a : files) {
    std::ofstream out(dir / a.name, std::ios::binary);
    out << a.content;
    if (!out) throw std::runtime_error("cannot write " + (dir / a.name).string());
    listing.push_back(Json{{"file", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  }
  const Json manifest{{"kind", to_string(config.kind)}, {"config", config.source}, {"artifacts", listing}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest");
  return dir;
}

std::string summary_text(const std::vector<std::pair<std::string, std::string>>& lines) {
  std::string s;
  for (const auto& [k, v] : lines) s += k + ": " + v + "\n";
  return s;
}

}  // namespace

std::filesystem::path write_outputs(const ScenarioConfig& config, const Evaluation& eval) {
  auto files = eval.artifacts;
  files.push_back({"diagnostics.json", eval.diagnostics.dump(2) + "\n"});
  files.push_back({"summary.txt", summary_text(eval.summary)});
  return write_files(config, std::move(files));
}

std::filesystem::path run(const ScenarioConfig& config) { return write_outputs(config, evaluate(config)); }

RefinementTable refine(const ScenarioConfig& config, std::size_t levels) {
  if (levels < 2) throw ConfigError("refine needs at least 2 levels");
  std::vector<Evaluation> evals;
  for (std::size_t k = 0; k < levels; ++k) {
    ScenarioConfig level = config;
    level.grid.N = config.grid.N << k;
    evals.push_back(evaluate(level));
  }
  RefinementTable table;
  const bool oracle = std::all_of(evals.begin(), evals.end(), [](const auto& e) { return e.error.has_value(); });
  table.reference = oracle ? "oracle" : "self";
  const std::size_t rows = oracle ? levels : levels - 1;
  for (std::size_t k = 0; k < rows; ++k) {
    RefinementRow row;
    row.N = config.grid.N << k;
    row.dt = config.grid.T / static_cast<double>(row.N);
    if (oracle) {
      row.error = *evals[k].error;
    } else {
      // coarse node n coincides with fine node 2n
      for (std::size_t i = 0; i < evals[k].primary.size(); ++i) {
        const auto& coarse = evals[k].primary[i];
        const auto& fine = evals[k + 1].primary[i];
        for (std::size_t n = 0; n < coarse.size(); ++n) {
          row.error = std::max(row.error, std::abs(coarse[n] - fine[2 * n]));
        }
      }
    }
    table.rows.push_back(row);
  }
  table.exact = std::all_of(table.rows.begin(), table.rows.end(),
                            [](const auto& r) { return r.error < kExactThreshold; });
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const double a = table.rows[k - 1].error;
    const double b = table.rows[k].error;
    if (a >= kExactThreshold && b > 0.0) table.rows[k].order = std::log2(a / b);
  }
  return table;
}

std::string format_refinement(const RefinementTable& table) {
  std::string s = "N,dt,error,order\n";
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    std::string order;
    if (r.error < kExactThreshold) {
      order = "exact";
    } else if (r.order) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", *r.order);
      order = buf;
    }
    s += std::to_string(r.N) + "," + format_double(r.dt) + "," + format_double(r.error) + "," + order + "\n";
  }
  return s;
}

std::filesystem::path write_refinement(const ScenarioConfig& config, const RefinementTable& table) {
  std::string summary = "reference: " + table.reference + "\n";
  summary += format_refinement(table);
  return write_files(config, {{"refine.csv", format_refinement(table)}, {"summary.txt", summary}});
}

}  // namespace memkern::app
