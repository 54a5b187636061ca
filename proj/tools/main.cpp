#include <omp.h>

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "runner.hpp"
#include "specdecay/errors.hpp"

#ifndef SPECDECAY_RECIPE_DIR
#define SPECDECAY_RECIPE_DIR "recipes"
#endif

namespace {

// --threads beats SPECDECAY_THREADS beats the OpenMP default.
int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SPECDECAY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    std::cerr << "ignoring SPECDECAY_THREADS=" << env << " (not a positive integer)\n";
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace specdecay::app;
  CLI::App app{"specdecay: spectral decay analysis of heat and Navier-Stokes flows"};
  app.require_subcommand(1);
  int threads = 0;
  bool as_json = false;
  std::string output_dir;
  std::string recipe_dir = SPECDECAY_RECIPE_DIR;
  app.add_option("--threads", threads, "OpenMP threads (default: SPECDECAY_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", as_json, "machine-readable output on stdout");

  auto* run = app.add_subcommand("run", "run the analyses of a config file");
  std::string config;
  run->add_option("config", config, "experiment config (.cfg)")->required();
  run->add_option("--output-dir", output_dir, "directory for artifacts and manifest.json");

  auto* list = app.add_subcommand("list-recipes", "list the bundled recipes");
  list->add_option("--recipe-dir", recipe_dir, "directory holding *.cfg recipes");

  // Flags are accepted before or after the subcommand.
  for (auto* sub : {run, list}) {
    sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    sub->add_flag("--json", as_json, "machine-readable output on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExecutionError;
  }

  const int nthreads = resolve_threads(threads);
  omp_set_num_threads(nthreads);

  if (list->parsed()) {
    try {
      const auto recipes = list_recipes(recipe_dir);
      if (as_json) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : recipes) out.push_back({{"file", r.file}, {"name", r.name}, {"claim", r.claim}});
        std::cout << out.dump(2) << '\n';
      } else {
        std::size_t w = 4;
        for (const auto& r : recipes) w = std::max(w, r.file.size());
        std::cout << std::left << std::setw(static_cast<int>(w) + 2) << "file" << "claim\n";
        for (const auto& r : recipes) std::cout << std::setw(static_cast<int>(w) + 2) << r.file << r.claim << '\n';
      }
      return kAllPass;
    } catch (const specdecay::Error& e) {
      std::cerr << e.kind() << ": " << e.what() << '\n';
      return kExecutionError;
    }
  }

  RunOptions opt;
  opt.output_dir = output_dir;
  opt.threads = nthreads;
  opt.log = as_json ? &std::cerr : &std::cout;
  const RunResult r = run_experiment(config, opt);
  if (as_json) std::cout << r.manifest.dump(2) << '\n';
  else
    std::cout << "exit " << r.exit_code << ", artifacts in " << r.output_dir << '\n';
  return r.exit_code;
}
