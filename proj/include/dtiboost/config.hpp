#pragma once

// Run configuration: a flat `key = value` file overlaid by command-line
// values. A `preset` is applied before every other key, so explicit tree or
// balancing keys override it.

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dtiboost/balance.hpp"
#include "dtiboost/detail/text.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/features.hpp"
#include "dtiboost/fetch.hpp"
#include "dtiboost/tree.hpp"

namespace dtiboost {

struct TreePreset {
  std::string_view name;
  BalanceMethod balance;
  TreeParams params;
};

// Per-dataset weak-learner settings.
inline constexpr std::array<TreePreset, 8> kTreePresets = {{
    {"enzymes-random", BalanceMethod::random, {100, 16, 1}},
    {"ion-channels-random", BalanceMethod::random, {8, 4, 1}},
    {"gpcrs-random", BalanceMethod::random, {6, 3, 1}},
    {"nuclear-receptors-random", BalanceMethod::random, {5, 7, 2}},
    {"enzymes-clustered", BalanceMethod::clustered, {110, 2, 1}},
    {"ion-channels-clustered", BalanceMethod::clustered, {9, 2, 1}},
    {"gpcrs-clustered", BalanceMethod::clustered, {6, 3, 1}},
    {"nuclear-receptors-clustered", BalanceMethod::clustered, {150, 2, 1}},
}};

inline const TreePreset& find_preset(std::string_view name) {
  for (const auto& p : kTreePresets)
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : kTreePresets) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw InvalidArgument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

struct RunConfig {
  std::filesystem::path interactions;
  std::filesystem::path pssm_dir;
  std::filesystem::path spd_dir;
  std::filesystem::path fingerprints;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path model_path;  // empty: <output_dir>/model.json
  std::filesystem::path output_dir = ".";

  FeatureGroupConfig features;
  BalanceConfig balance;
  std::string preset;
  TreeParams tree{5, 2, 1};
  int rounds = 100;
  int folds = 5;
  int repeats = 5;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  int threads = 1;
  bool allow_skips = false;
  FetchConfig fetch;

  std::filesystem::path model_file() const { return model_path.empty() ? output_dir / "model.json" : model_path; }
};

using KeyValues = std::map<std::string, std::string>;

/// Reads `key = value` lines; `#` starts a comment line.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = std::string(detail::trim(line.substr(eq + 1)));
  }
  return kv;
}

namespace detail {

inline int config_int(const std::string& key, const std::string& v) {
  const auto n = parse_int(v);
  if (!n || *n < std::numeric_limits<int>::min() || *n > std::numeric_limits<int>::max())
    throw InvalidArgument("config key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<int>(*n);
}

inline double config_double(const std::string& key, const std::string& v) {
  const auto d = parse_double(v);
  if (!d) throw InvalidArgument("config key '" + key + "': expected a number, got '" + v + "'");
  return *d;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  const auto s = to_lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw InvalidArgument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

/// Applies `values` on top of `base`. Unknown keys are rejected.
inline RunConfig resolve_config(const KeyValues& values, RunConfig cfg = {}) {
  if (auto it = values.find("preset"); it != values.end() && !it->second.empty()) {
    const auto& p = find_preset(it->second);
    cfg.preset = it->second;
    cfg.tree = p.params;
    cfg.balance.method = p.balance;
  }
  for (const auto& [key, v] : values) {
    using namespace detail;
    if (key == "preset") continue;
    else if (key == "interactions") cfg.interactions = v;
    else if (key == "pssm_dir") cfg.pssm_dir = v;
    else if (key == "spd_dir") cfg.spd_dir = v;
    else if (key == "fingerprints") cfg.fingerprints = v;
    else if (key == "cache_dir") cfg.cache_dir = v;
    else if (key == "model_path") cfg.model_path = v;
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "groups") cfg.features.groups = parse_groups(v);
    else if (key == "distance_factor") cfg.features.distance_factor = config_int(key, v);
    else if (key == "balance") cfg.balance.method = parse_balance_method(v);
    else if (key == "k") cfg.balance.k = config_int(key, v);
    else if (key == "h") cfg.balance.h = config_int(key, v);
    else if (key == "target_ratio") cfg.balance.target_ratio = config_double(key, v);
    else if (key == "max_depth") cfg.tree.max_depth = config_int(key, v);
    else if (key == "min_samples_split") cfg.tree.min_samples_split = config_int(key, v);
    else if (key == "min_samples_leaf") cfg.tree.min_samples_leaf = config_int(key, v);
    else if (key == "criterion") {
      if (v != "gini") throw InvalidArgument("only the gini criterion is supported");
    } else if (key == "rounds") cfg.rounds = config_int(key, v);
    else if (key == "folds") cfg.folds = config_int(key, v);
    else if (key == "repeats") cfg.repeats = config_int(key, v);
    else if (key == "seed") {
      const auto s = parse_int(v);
      if (!s || *s < 0) throw InvalidArgument("config key 'seed': expected a nonnegative integer");
      cfg.seed = static_cast<std::uint64_t>(*s);
    } else if (key == "threshold") cfg.threshold = config_double(key, v);
    else if (key == "threads") cfg.threads = config_int(key, v);
    else if (key == "allow_skips") cfg.allow_skips = config_bool(key, v);
    else if (key == "drug_structure_url") cfg.fetch.drug_structure_url = v;
    else if (key == "target_sequence_url") cfg.fetch.target_sequence_url = v;
    else if (key == "network") cfg.fetch.network_enabled = config_bool(key, v);
    else throw InvalidArgument("unknown config key '" + key + "'");
  }
  cfg.balance.seed = cfg.seed;
  validate(cfg.features);
  validate(cfg.balance);
  validate(cfg.tree);
  if (cfg.rounds < 1) throw InvalidArgument("rounds must be >= 1");
  if (cfg.folds < 2) throw InvalidArgument("folds must be >= 2");
  if (cfg.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  if (cfg.threads < 1) throw InvalidArgument("threads must be >= 1");
  return cfg;
}

}  // namespace dtiboost
