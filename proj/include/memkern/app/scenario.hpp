#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memkern/app/closed_form.hpp"
#include "memkern/direct.hpp"
#include "memkern/spectral.hpp"

namespace memkern::app {

enum class Kind { ivp2, ivp1, bvp2, bvp1, identify_h, identify_l, ip0, roundtrip, check };

std::string to_string(Kind kind);

/// A scenario file. JSON keys match the field names below; see README for
/// the full schema.
struct ScenarioConfig {
  Kind kind = Kind::ivp2;

  struct Grid {
    double T = 1.0;
    std::size_t N = 200;
  } grid;

  struct Operator {
    std::size_t J = 1;
    SpatialBasis basis = SpatialBasis::dirichlet_laplacian_1d;
    /// explicit eigenvalues when basis is none
    std::vector<double> eigenvalues;
    std::size_t j0 = 1;
  } op;

  /// h for second-order kinds, l for first-order kinds
  std::optional<Series> kernel;

  struct Data {
    std::vector<double> u0;
    std::vector<double> u1;
    std::vector<double> u2;
    std::vector<std::optional<Series>> forcing;
    std::optional<Series> measurement;
    std::optional<Series> psi;
    std::optional<Series> g0;
    std::optional<double> lambda00;
    std::optional<double> fprime0phi;
    bool has_u0 = false;
    bool has_u1 = false;
    bool has_u2 = false;
  } data;

  /// "second" or "first": equation order for roundtrip and check
  std::string order = "second";
  /// "ivp" or "bvp": forward problem for roundtrip and check
  std::string forward = "ivp";
  /// "main" or "firstkind": identification route for second-order kernels
  std::string route = "main";

  struct Oracle {
    std::optional<Series> kernel;
    std::vector<Series> solution;
  } oracle;

  struct Tolerances {
    double bvp = 1e-10;
    std::optional<double> compatibility;
  } tolerances;

  unsigned threads = 1;
  /// spatial samples for field output; 0 disables it
  std::size_t field_points = 0;
  std::filesystem::path output = "memkern-out";

  /// the parsed document, echoed into the manifest
  nlohmann::ordered_json source;

  SpectralOperator make_operator() const;
  TimeGrid make_grid() const { return TimeGrid(grid.T, grid.N); }
  ModalProblemData make_modal(const TimeGrid& g) const;
};

/// Throws ConfigError on malformed or incomplete scenarios. Relative file
/// references resolve against `base_dir`.
ScenarioConfig parse_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

struct Artifact {
  std::string name;
  std::string content;
};

/// Everything a scenario produces, before anything touches the disk.
struct Evaluation {
  std::vector<Artifact> artifacts;
  nlohmann::ordered_json diagnostics;
  std::vector<std::pair<std::string, std::string>> summary;
  /// error against the configured oracle, if there is one
  std::optional<double> error;
  /// main output on the grid (kernel or modal traces) for self-convergence
  std::vector<GridFunction> primary;
};

Evaluation evaluate(const ScenarioConfig& config);

/// MEMKERN_OUTPUT_DIR when set, otherwise the configured directory.
std::filesystem::path output_directory(const ScenarioConfig& config);

/// Writes artifacts, diagnostics.json, summary.txt and manifest.json
/// (config echo plus SHA-256 of every other file). Returns the directory.
std::filesystem::path write_outputs(const ScenarioConfig& config, const Evaluation& eval);

std::filesystem::path run(const ScenarioConfig& config);

struct RefinementRow {
  std::size_t N = 0;
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> order;
};

struct RefinementTable {
  /// "oracle" when errors come from the configured oracle, otherwise "self"
  /// (difference to the next finer level at shared nodes)
  std::string reference;
  std::vector<RefinementRow> rows;
  /// all errors below kExactThreshold
  bool exact = false;
};

inline constexpr double kExactThreshold = 1e-12;

/// Reruns the scenario at N, 2N, ..., 2^(levels-1) N.
RefinementTable refine(const ScenarioConfig& config, std::size_t levels);

std::string format_refinement(const RefinementTable& table);

/// Writes refine.csv, summary.txt and manifest.json.
std::filesystem::path write_refinement(const ScenarioConfig& config, const RefinementTable& table);

/// Names of the shipped demos.
std::vector<std::string> demo_names();

/// Writes the demo's spatial inputs and config into `dir` and returns the
/// parsed scenario.
ScenarioConfig prepare_demo(const std::string& name, const std::filesystem::path& dir);

}  // namespace memkern::app
