#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace specdecay::app {

// An experiment file is YAML. After parsing it is held as JSON so the same
// descriptors flow into profile_from_json and into the manifest.
//
//   name: equivalence_powerlaw          required
//   claim: "..."                     one-line description for list-recipes
//   seed: 7                          default 0
//   output_dir: out/powerlaw         overridden by --output-dir
//   recipe:
//     backend: radial | grid
//     profile: {kind: power_law, dim: 2, kappa: 0.5}        radial, or grid source
//     grid: {dim: 2, resolution: 256, k0: 0.02}             grid only (or length:)
//     source: {kind: sample | random | taylor_green | file, ...}
//   analyses:
//     - {type: blocks, j_min: -20, j_max: -2}
//     ...
//
// See docs/config.md for every analysis and its keys.

struct ExperimentConfig {
  std::string name;
  std::string claim;
  std::uint64_t seed = 0;
  std::string output_dir;
  nlohmann::json recipe;
  std::vector<nlohmann::json> analyses;
  std::string source_text;  // raw file contents, hashed into the manifest
};

/// Parses and validates; throws ConfigInvalid with the offending key path.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// YAML text to JSON with scalars typed as integer, float, bool or string.
nlohmann::json yaml_to_json(const std::string& text);

/// Rejects unknown keys and wrong types anywhere in the document.
void validate(const nlohmann::json& doc);

std::string sha256_hex(const std::string& data);

}  // namespace specdecay::app
