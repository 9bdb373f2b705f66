#pragma once

// JSON model files. Doubles are written in shortest round-trip form, so a
// loaded model scores every input bit-identically to the saved one.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dtiboost/boost.hpp"
#include "dtiboost/error.hpp"

namespace dtiboost {

inline constexpr const char* kModelFormat = "dtiboost-model";
inline constexpr const char* kModelVersion = "v1";

inline nlohmann::json to_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth},
          {"min_samples_split", p.min_samples_split},
          {"min_samples_leaf", p.min_samples_leaf},
          {"criterion", "gini"}};
}

inline nlohmann::json to_json(const BoostedEnsemble& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    nlohmann::json nodes = nlohmann::json::array();
    // [feature, threshold, left, right, label, positive_fraction]
    for (const auto& n : model.trees[t].nodes())
      nodes.push_back({n.feature, n.threshold, n.left, n.right, sign(n.label), n.positive_fraction});
    trees.push_back({{"alpha", model.alphas[t]}, {"nodes", std::move(nodes)}});
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& r : model.training_log) log.push_back({{"epsilon", r.epsilon}, {"alpha", r.alpha}, {"z", r.z}});
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"n_features", model.n_features},
          {"feature_groups", model.feature_config.groups},
          {"distance_factor", model.feature_config.distance_factor},
          {"tree_params", to_json(model.tree_params)},
          {"requested_rounds", model.requested_rounds},
          {"training_error", model.training_error},
          {"training_log", std::move(log)},
          {"trees", std::move(trees)}};
}

inline BoostedEnsemble model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kModelFormat) throw FormatError("not a dtiboost model file");
  const auto version = j.at("version").get<std::string>();
  if (version != kModelVersion)
    throw VersionError("unsupported model version '" + version + "' (expected " + kModelVersion + ")");

  BoostedEnsemble model;
  model.n_features = j.at("n_features").get<std::size_t>();
  model.feature_config.groups = j.at("feature_groups").get<std::string>();
  model.feature_config.distance_factor = j.at("distance_factor").get<int>();
  const auto& tp = j.at("tree_params");
  model.tree_params.max_depth = tp.at("max_depth").get<int>();
  model.tree_params.min_samples_split = tp.at("min_samples_split").get<int>();
  model.tree_params.min_samples_leaf = tp.at("min_samples_leaf").get<int>();
  if (tp.at("criterion").get<std::string>() != "gini") throw FormatError("unsupported split criterion");
  model.requested_rounds = j.at("requested_rounds").get<int>();
  model.training_error = j.at("training_error").get<double>();
  for (const auto& r : j.at("training_log"))
    model.training_log.push_back({r.at("epsilon").get<double>(), r.at("alpha").get<double>(), r.at("z").get<double>()});
  for (const auto& t : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& a : t.at("nodes")) {
      if (!a.is_array() || a.size() != 6) throw FormatError("malformed tree node");
      TreeNode n;
      n.feature = a[0].get<std::int32_t>();
      n.threshold = a[1].get<double>();
      n.left = a[2].get<std::int32_t>();
      n.right = a[3].get<std::int32_t>();
      const int y = a[4].get<int>();
      if (y != 1 && y != -1) throw FormatError("leaf label must be +1 or -1");
      n.label = y == 1 ? Label::positive : Label::negative;
      n.positive_fraction = a[5].get<double>();
      nodes.push_back(n);
    }
    model.trees.emplace_back(std::move(nodes), model.n_features);
    model.alphas.push_back(t.at("alpha").get<double>());
  }
  if (model.trees.empty()) throw FormatError("model has no trees");
  if (model.training_log.size() != model.trees.size()) throw FormatError("training log does not match trees");
  validate(model.feature_config);
  return model;
}

inline std::string serialize_model(const BoostedEnsemble& model) { return to_json(model).dump(1) + "\n"; }

inline BoostedEnsemble deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt model file: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("corrupt model file: ") + e.what());
  }
}

inline void save_model(const BoostedEnsemble& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize_model(model);
  if (!out) throw Error("failed writing " + path.string());
}

inline BoostedEnsemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace dtiboost
