#include "config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "specdecay/errors.hpp"

namespace specdecay::app {

namespace {

using nlohmann::json;

json convert(const YAML::Node& n, const std::string& path) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      if (n.Tag() == "!") return n.Scalar();  // quoted
      long long i;
      double d;
      bool b;
      if (YAML::convert<long long>::decode(n, i)) return i;
      if (YAML::convert<double>::decode(n, d)) return d;
      if (YAML::convert<bool>::decode(n, b)) return b;
      return n.Scalar();
    }
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (std::size_t k = 0; k < n.size(); ++k) a.push_back(convert(n[k], path + "[" + std::to_string(k) + "]"));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        if (o.contains(key)) throw ConfigInvalid(path + "." + key + ": duplicate key");
        o[key] = convert(kv.second, path + "." + key);
      }
      return o;
    }
  }
  return nullptr;
}

enum class T { number, integer, string, boolean, numbers, integers, strings, object, objects, points, profile, any };

struct Key {
  T type;
  bool required = false;
  const std::map<std::string, Key>* sub = nullptr;
};

using Schema = std::map<std::string, Key>;

const Schema kTimes = {{"from", {T::number, true}}, {"to", {T::number, true}}, {"per_decade", {T::integer}}};
const Schema kLadder = {{"lo", {T::number}}, {"hi", {T::number}}, {"per_decade", {T::integer}}};
const Schema kGrid = {{"dim", {T::integer, true}}, {"resolution", {T::integer, true}}, {"k0", {T::number}},
                      {"length", {T::number}}};
const Schema kSource = {{"kind", {T::string, true}}, {"centers", {T::points}}, {"seed", {T::integer}},
                        {"mode", {T::string}},       {"m", {T::integer}},       {"amplitude", {T::number}},
                        {"path", {T::string}}};
const Schema kRecipe = {{"backend", {T::string, true}}, {"profile", {T::profile}},
                        {"grid", {T::object, false, &kGrid}}, {"source", {T::object, false, &kSource}}};

const std::map<std::string, Schema> kAnalyses = {
    {"blocks", {{"j_min", {T::integer, true}}, {"j_max", {T::integer, true}}, {"mode", {T::string}}}},
    {"besov",
     {{"sigma", {T::number, true}},
      {"j_min", {T::integer, true}},
      {"j_max", {T::integer, true}},
      {"mode", {T::string}},
      {"expect", {T::boolean}}}},
    {"membership",
     {{"kind", {T::string, true}},
      {"sigma", {T::number}},
      {"alpha", {T::number}},
      {"M", {T::integer}},
      {"j_min", {T::integer, true}},
      {"j_max", {T::integer, true}},
      {"mode", {T::string}},
      {"expect", {T::boolean}}}},
    {"heat", {{"times", {T::object, true, &kTimes}}}},
    {"certify",
     {{"times", {T::object, true, &kTimes}},
      {"window", {T::numbers}},
      {"claimed_sigma", {T::number}},
      {"expect", {T::string}}}},
    {"splitting", {{"times", {T::object, true, &kTimes}}, {"sigma", {T::number}}}},
    {"equivalence",
     {{"sigma_grid", {T::numbers, true}},
      {"rho", {T::object, false, &kLadder}},
      {"time_window", {T::numbers}},
      {"mode", {T::string}},
      {"stride", {T::integer}},
      {"expect_positive", {T::boolean}}}},
    {"mass", {{"rho", {T::object, true, &kLadder}}, {"alpha", {T::number, true}}, {"min_growth", {T::number}}}},
    {"perturbation",
     {{"alpha", {T::number, true}},
      {"epsilon", {T::number, true}},
      {"j0", {T::integer, true}},
      {"normalization", {T::string}},
      {"report_j_min", {T::integer}}}},
    {"liminf",
     {{"times", {T::object, true, &kTimes}},
      {"alpha", {T::number, true}},
      {"levels", {T::integers}},
      {"window", {T::numbers, true}},
      {"flat_tol", {T::number}}}},
    {"nse",
     {{"t_end", {T::number, true}},
      {"dt", {T::number}},
      {"dt_growth", {T::number}},
      {"dt_max", {T::number}},
      {"cfl", {T::number}},
      {"dealias", {T::number}},
      {"integrator", {T::string}},
      {"per_decade", {T::integer}},
      {"alpha", {T::number}},
      {"checks", {T::strings}},
      {"window", {T::numbers}},
      {"checkpoint", {T::boolean}}}},
};

const std::set<std::string> kCommonAnalysisKeys = {"type", "label", "expect_error"};

const std::map<std::string, std::set<std::string>> kProfileKeys = {
    {"zero", {}},
    {"power_law", {"kappa", "cutoff"}},
    {"log_counterexample", {}},
    {"gaussian_swirl", {}},
    {"band_limited", {"r_lo", "r_hi", "kappa"}},
    {"tabulated", {"r", "A"}},
    {"combination", {"f", "g", "a", "b"}},
    {"v_alpha_perturbation", {"source", "alpha", "epsilon", "j0", "normalization"}},
};
const std::set<std::string> kProfileCommon = {"kind", "dim", "scale", "heat_time", "nodes_per_decade"};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigInvalid(path + ": " + what); }

bool is_number_list(const json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (!x.is_number()) return false;
  return true;
}

void check_profile(const json& p, const std::string& path) {
  if (!p.is_object()) fail(path, "expected a profile table");
  if (!p.contains("kind") || !p["kind"].is_string()) fail(path, "profile needs a string \"kind\"");
  const std::string kind = p["kind"];
  const auto it = kProfileKeys.find(kind);
  if (it == kProfileKeys.end()) fail(path + ".kind", "unknown profile kind \"" + kind + "\"");
  for (const auto& [key, value] : p.items()) {
    if (!kProfileCommon.count(key) && !it->second.count(key)) fail(path + "." + key, "unknown key");
    if ((key == "f" || key == "g" || key == "source")) check_profile(value, path + "." + key);
  }
}

void check_object(const json& o, const Schema& schema, const std::string& path);

void check_value(const json& v, const Key& k, const std::string& path) {
  switch (k.type) {
    case T::number:
      if (!v.is_number()) fail(path, "expected a number");
      break;
    case T::integer:
      if (!v.is_number_integer()) fail(path, "expected an integer");
      break;
    case T::string:
      if (!v.is_string()) fail(path, "expected a string");
      break;
    case T::boolean:
      if (!v.is_boolean()) fail(path, "expected true or false");
      break;
    case T::numbers:
      if (!is_number_list(v)) fail(path, "expected a list of numbers");
      break;
    case T::integers:
      if (!v.is_array()) fail(path, "expected a list of integers");
      for (const auto& x : v)
        if (!x.is_number_integer()) fail(path, "expected a list of integers");
      break;
    case T::strings:
      if (!v.is_array()) fail(path, "expected a list of strings");
      for (const auto& x : v)
        if (!x.is_string()) fail(path, "expected a list of strings");
      break;
    case T::points:
      if (!v.is_array()) fail(path, "expected a list of points");
      for (const auto& x : v)
        if (!is_number_list(x) || x.size() < 1 || x.size() > 3) fail(path, "each point needs 1 to 3 coordinates");
      break;
    case T::object:
      if (!v.is_object()) fail(path, "expected a table");
      if (k.sub) check_object(v, *k.sub, path);
      break;
    case T::objects:
      if (!v.is_array()) fail(path, "expected a list");
      break;
    case T::profile:
      check_profile(v, path);
      break;
    case T::any:
      break;
  }
}

void check_object(const json& o, const Schema& schema, const std::string& path) {
  for (const auto& [key, value] : o.items()) {
    const auto it = schema.find(key);
    if (it == schema.end()) fail(path + "." + key, "unknown key");
    check_value(value, it->second, path + "." + key);
  }
  for (const auto& [key, spec] : schema)
    if (spec.required && !o.contains(key)) fail(path + "." + key, "missing required key");
}

const Schema kTop = {{"name", {T::string, true}},     {"claim", {T::string}},
                     {"seed", {T::integer}},          {"output_dir", {T::string}},
                     {"recipe", {T::object, true, &kRecipe}}, {"analyses", {T::objects, true}}};

}  // namespace

json yaml_to_json(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigInvalid(std::string("YAML syntax: ") + e.what());
  }
  return convert(root, "");
}

void validate(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a table at the top level");
  check_object(doc, kTop, "");
  if (doc.contains("seed") && doc["seed"].get<long long>() < 0) fail(".seed", "must be non-negative");

  const json& r = doc["recipe"];
  const std::string backend = r["backend"];
  if (backend == "radial") {
    if (!r.contains("profile")) fail(".recipe.profile", "the radial backend needs a profile");
    if (r.contains("grid") || r.contains("source")) fail(".recipe", "grid keys given for the radial backend");
  } else if (backend == "grid") {
    if (!r.contains("grid")) fail(".recipe.grid", "the grid backend needs a grid");
    const json& g = r["grid"];
    const long long n = g["resolution"];
    if (n < 16 || (n & (n - 1)) != 0) fail(".recipe.grid.resolution", "must be a power of two >= 16");
    if (g["dim"] != 2 && g["dim"] != 3) fail(".recipe.grid.dim", "must be 2 or 3");
    if (g.contains("k0") == g.contains("length")) fail(".recipe.grid", "give exactly one of k0 and length");
    const double scale = g.contains("k0") ? g["k0"].get<double>() : g["length"].get<double>();
    if (!(scale > 0.0)) fail(".recipe.grid", "k0 / length must be positive");
    if (!r.contains("source")) fail(".recipe.source", "the grid backend needs a source");
    static const std::set<std::string> kinds = {"sample", "random", "taylor_green", "file", "zero"};
    const std::string kind = r["source"]["kind"];
    if (!kinds.count(kind)) fail(".recipe.source.kind", "unknown source kind \"" + kind + "\"");
    if ((kind == "sample" || kind == "random") && !r.contains("profile"))
      fail(".recipe.profile", "source \"" + kind + "\" needs a profile");
  } else {
    fail(".recipe.backend", "must be \"radial\" or \"grid\"");
  }

  const json& list = doc["analyses"];
  if (list.empty()) fail(".analyses", "at least one analysis is required");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = ".analyses[" + std::to_string(i) + "]";
    const json& a = list[i];
    if (!a.is_object()) fail(path, "expected a table");
    if (!a.contains("type") || !a["type"].is_string()) fail(path + ".type", "missing analysis type");
    const auto it = kAnalyses.find(a["type"].get<std::string>());
    if (it == kAnalyses.end()) fail(path + ".type", "unknown analysis \"" + a["type"].get<std::string>() + "\"");
    json rest = a;
    for (const auto& k : kCommonAnalysisKeys) {
      if (k != "type" && rest.contains(k) && !rest[k].is_string()) fail(path + "." + k, "expected a string");
      rest.erase(k);
    }
    check_object(rest, it->second, path);
  }
}

ExperimentConfig parse_config(const std::string& text) {
  const json doc = yaml_to_json(text);
  validate(doc);
  ExperimentConfig c;
  c.name = doc["name"];
  c.claim = doc.value("claim", "");
  c.seed = doc.value("seed", 0ULL);
  c.output_dir = doc.value("output_dir", "");
  c.recipe = doc["recipe"];
  for (const auto& a : doc["analyses"]) c.analyses.push_back(a);
  c.source_text = text;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace specdecay::app
