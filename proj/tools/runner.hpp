#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace specdecay::app {

enum ExitCode { kAllPass = 0, kCertificationFailed = 1, kExecutionError = 2 };

struct RunOptions {
  std::string output_dir;  // overrides the config when non-empty
  int threads = 0;         // recorded in the manifest; set by the caller
  std::ostream* log = nullptr;
};

struct AnalysisOutcome {
  std::string type, label;
  std::string status;  // pass | fail | error
  double runtime_s = 0.0;
  std::vector<std::string> artifacts;
  std::string error_kind, error;
  nlohmann::json summary;
};

struct RunResult {
  int exit_code = kExecutionError;
  std::string output_dir;
  std::vector<AnalysisOutcome> outcomes;
  nlohmann::json manifest;
};

/// Runs every analysis of a config and writes artifacts plus manifest.json
/// into the output directory. The manifest is written on every path that
/// reaches a usable output directory, including config errors.
RunResult run_experiment(const std::string& config_path, const RunOptions& opt);

struct RecipeInfo {
  std::string file, name, claim;
};

/// Bundled recipes (*.cfg) sorted by file name; throws ExecutionError when
/// the directory is missing.
std::vector<RecipeInfo> list_recipes(const std::string& dir);

}  // namespace specdecay::app
