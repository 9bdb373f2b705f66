// dtiboost command-line interface.
//
//   dtiboost build|train|evaluate|predict|rank|fetch [options]
//
// Every option maps onto a configuration key; values given on the command
// line override those read from --config.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dtiboost/dtiboost.hpp"

namespace {

struct OptionSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr OptionSpec kCommon[] = {
    {"--seed", "seed", "Random seed"},
    {"--threads", "threads", "Maximum worker threads"},
    {"--out", "output_dir", "Output (and pipeline data) directory"},
};

constexpr OptionSpec kBuild[] = {
    {"--interactions", "interactions", "Interaction list (TSV drug, target)"},
    {"--pssm-dir", "pssm_dir", "Directory of <target>.pssm files"},
    {"--spd-dir", "spd_dir", "Directory of <target>.spd files"},
    {"--fingerprints", "fingerprints", "Fingerprint table (TSV drug, 881 bits)"},
    {"--groups", "groups", "Feature groups, subset of ABCD"},
    {"--distance-factor", "distance_factor", "Auto-covariance distance factor"},
};

constexpr OptionSpec kTrain[] = {
    {"--preset", "preset", "Named tree/balancing preset, e.g. enzymes-random"},
    {"--balance", "balance", "none | random | clustered"},
    {"--clusters", "k", "Cluster count k for clustered balancing"},
    {"--per-cluster", "h", "Samples h kept per cluster (0 = automatic)"},
    {"--target-ratio", "target_ratio", "Majority:minority ratio for random balancing"},
    {"--rounds", "rounds", "Boosting rounds"},
    {"--max-depth", "max_depth", "Tree max depth"},
    {"--min-samples-split", "min_samples_split", "Tree min samples to split"},
    {"--min-samples-leaf", "min_samples_leaf", "Tree min samples per leaf"},
    {"--model", "model_path", "Model file (default <out>/model.json)"},
};

constexpr OptionSpec kEvaluate[] = {
    {"--folds", "folds", "Cross-validation folds"},
    {"--repeats", "repeats", "Cross-validation repeats"},
    {"--threshold", "threshold", "Probability threshold for class metrics"},
};

constexpr OptionSpec kPredict[] = {
    {"--model", "model_path", "Model file (default <out>/model.json)"},
    {"--fingerprints", "fingerprints", "Fingerprint table"},
    {"--threshold", "threshold", "Probability threshold"},
};

constexpr OptionSpec kFetch[] = {
    {"--cache-dir", "cache_dir", "Record cache directory"},
    {"--drug-url", "drug_structure_url", "URL template for drug records ({id} placeholder)"},
    {"--target-url", "target_sequence_url", "URL template for target records ({id} placeholder)"},
};

template <std::size_t N>
void add_options(CLI::App* app, const OptionSpec (&specs)[N], dtiboost::KeyValues& overrides) {
  for (const auto& s : specs) {
    const std::string key = s.key;
    app->add_option_function<std::string>(s.flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                          s.help);
  }
}

dtiboost::RunConfig load_config(const std::string& path, const dtiboost::KeyValues& overrides) {
  dtiboost::KeyValues values;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw dtiboost::Error("cannot open config file " + path);
    try {
      values = dtiboost::parse_key_values(in);
    } catch (const dtiboost::ParseError& e) {
      throw dtiboost::ParseError(path + ": " + e.what());
    }
  }
  for (const auto& [k, v] : overrides) values[k] = v;
  return dtiboost::resolve_config(values);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug-target interaction prediction with boosted trees"};
  app.require_subcommand(1);

  std::string config_path;
  dtiboost::KeyValues overrides;
  std::string drug, pssm_file, spd_file, record_id, record_kind = "target_sequence";
  std::size_t top_n = 10;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Key = value configuration file");
    add_options(sub, kCommon, overrides);
  };

  auto* build = app.add_subcommand("build", "Parse inputs and write the feature matrix");
  common(build);
  add_options(build, kBuild, overrides);
  build->add_flag_callback("--allow-skips", [&] { overrides["allow_skips"] = "true"; },
                           "Exit successfully even when targets are too short for the features");

  auto* train = app.add_subcommand("train", "Balance the data, train and save a model");
  common(train);
  add_options(train, kTrain, overrides);

  auto* evaluate = app.add_subcommand("evaluate", "Repeated stratified cross-validation");
  common(evaluate);
  add_options(evaluate, kTrain, overrides);
  add_options(evaluate, kEvaluate, overrides);

  auto* predict = app.add_subcommand("predict", "Score one drug against one target profile");
  common(predict);
  add_options(predict, kPredict, overrides);
  predict->add_option("--drug", drug, "Drug id from the fingerprint table")->required();
  predict->add_option("--pssm", pssm_file, "Target PSSM file")->required();
  predict->add_option("--spd", spd_file, "Target SPD file")->required();

  auto* rank = app.add_subcommand("rank", "Rank non-interacting pairs as new-interaction candidates");
  common(rank);
  rank->add_option_function<std::string>("--model", [&](const std::string& v) { overrides["model_path"] = v; },
                                         "Model file (default <out>/model.json)");
  rank->add_option("-n,--top", top_n, "Number of candidates (0 = all)");

  auto* fetch = app.add_subcommand("fetch", "Fetch a raw drug or target record into the cache");
  common(fetch);
  add_options(fetch, kFetch, overrides);
  fetch->add_option("--id", record_id, "Record identifier")->required();
  fetch->add_option("--kind", record_kind, "drug_structure | target_sequence")
      ->check(CLI::IsMember({"drug_structure", "target_sequence"}));
  fetch->add_flag_callback("--network", [&] { overrides["network"] = "true"; }, "Allow HTTP requests on cache miss");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load_config(config_path, overrides);
    if (build->parsed()) {
      dtiboost::cmd_build(cfg, std::cout);
    } else if (train->parsed()) {
      dtiboost::cmd_train(cfg, std::cout);
    } else if (evaluate->parsed()) {
      dtiboost::cmd_evaluate(cfg, std::cout);
    } else if (predict->parsed()) {
      dtiboost::cmd_predict(cfg, drug, pssm_file, spd_file, std::cout);
    } else if (rank->parsed()) {
      dtiboost::cmd_rank(cfg, top_n, std::cout);
    } else if (fetch->parsed()) {
      const auto kind = record_kind == "drug_structure" ? dtiboost::RecordKind::drug_structure
                                                        : dtiboost::RecordKind::target_sequence;
      std::cout << dtiboost::fetch_record(record_id, kind, cfg.cache_dir, cfg.fetch);
    }
  } catch (const std::exception& e) {
    std::cerr << "dtiboost: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
