#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "memkern/app/scenario.hpp"
#include "memkern/errors.hpp"

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

void print_summary(const memkern::app::Evaluation& eval, const std::filesystem::path& dir) {
  for (const auto& [k, v] : eval.summary) std::cout << k << ": " << v << '\n';
  std::cout << "output: " << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  namespace app = memkern::app;
  CLI::App cli{"Memory-kernel integro-differential equations: direct, mixed and kernel identification problems"};
  cli.require_subcommand(1);
  unsigned threads = 0;
  cli.add_option("--threads", threads, "Worker threads for per-mode solves (overrides the config)");

  std::string config_path;
  auto* run = cli.add_subcommand("run", "Run a scenario file");
  run->add_option("config", config_path, "Scenario JSON")->required();

  std::size_t levels = 3;
  auto* refine = cli.add_subcommand("refine", "Rerun a scenario at N, 2N, ... and report observed orders");
  refine->add_option("config", config_path, "Scenario JSON")->required();
  refine->add_option("--levels", levels, "Number of grid levels")->check(CLI::Range(2, 12));

  std::string demo_name;
  auto* demo = cli.add_subcommand("demo", "Run a shipped example scenario");
  demo->add_option("name", demo_name, "example1-m0, example1-m1, example2-m0 or example2-m1")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*demo) {
      const char* env = std::getenv("MEMKERN_OUTPUT_DIR");
      const std::filesystem::path dir = env != nullptr && *env != '\0' ? env : "memkern-demo-" + demo_name;
      auto config = app::prepare_demo(demo_name, dir);
      if (threads != 0) config.threads = threads;
      const auto eval = app::evaluate(config);
      print_summary(eval, app::write_outputs(config, eval));
      return 0;
    }
    auto config = app::load_config(config_path);
    if (threads != 0) config.threads = threads;
    if (*run) {
      const auto eval = app::evaluate(config);
      print_summary(eval, app::write_outputs(config, eval));
    } else {
      const auto table = app::refine(config, levels);
      const auto dir = app::write_refinement(config, table);
      std::cout << "reference: " << table.reference << '\n' << app::format_refinement(table);
      std::cout << "output: " << dir.string() << '\n';
    }
    return 0;
  } catch (const memkern::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const memkern::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
