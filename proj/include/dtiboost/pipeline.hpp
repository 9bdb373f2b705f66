#pragma once

// Pipeline stages behind the `dtiboost` commands. Stages communicate through
// files in the output directory:
//
//   build     -> features.tsv, pairs.tsv, manifest.json
//   train     -> model.json (or model_path)
//   evaluate  -> report.json, curves/{roc,pr}_r<repeat>_f<fold>.csv
//   rank      -> candidates.tsv

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtiboost/balance.hpp"
#include "dtiboost/boost.hpp"
#include "dtiboost/config.hpp"
#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/eval.hpp"
#include "dtiboost/features.hpp"
#include "dtiboost/io.hpp"
#include "dtiboost/model_io.hpp"

namespace dtiboost {

namespace fs = std::filesystem;

inline constexpr const char* kMatrixFile = "features.tsv";
inline constexpr const char* kPairsFile = "pairs.tsv";
inline constexpr const char* kManifestFile = "manifest.json";

namespace detail {

inline std::ifstream open_input(const fs::path& p, const std::string& what) {
  if (p.empty()) throw InvalidArgument("no " + what + " path configured");
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + what + " " + p.string());
  return in;
}

inline std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  return out;
}

inline std::optional<fs::path> find_profile(const fs::path& dir, const std::string& id,
                                            std::initializer_list<const char*> extensions) {
  for (const char* ext : extensions) {
    auto p = dir / (id + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

}  // namespace detail

struct SkippedTarget {
  std::string target;
  std::string reason;
};

struct BuildResult {
  std::size_t rows = 0;
  std::size_t columns = 0;  // features + label
  std::vector<SkippedTarget> skipped;
  std::vector<std::string> warnings;
};

/// Raised after outputs are written when targets had to be dropped and skips
/// were not allowed.
class SkippedTargetsError : public Error {
 public:
  using Error::Error;
};

inline BuildResult cmd_build(const RunConfig& cfg, std::ostream& log) {
  BuildResult result;
  auto in = detail::open_input(cfg.interactions, "interaction list");
  const auto graph = parse_interactions(in, &result.warnings);
  for (const auto& w : result.warnings) log << "warning: " << cfg.interactions.string() << ": " << w << '\n';

  auto fp_in = detail::open_input(cfg.fingerprints, "fingerprint table");
  FingerprintTable fingerprints;
  try {
    fingerprints = parse_fingerprints(fp_in);
  } catch (const ParseError& e) {
    throw ParseError(cfg.fingerprints.string() + ": " + e.what());
  }

  std::vector<std::string> errors;
  std::map<std::string, std::vector<double>> drug_rows, target_rows;
  nlohmann::json lengths = nlohmann::json::object();
  for (const auto& d : graph.drugs()) {
    const auto* fp = fingerprints.find(d);
    if (!fp) errors.push_back("drug " + d + ": not in fingerprint table " + cfg.fingerprints.string());
    else drug_rows[d] = drug_block(*fp, cfg.features);
  }
  for (const auto& t : graph.targets()) {
    const auto pssm_path = detail::find_profile(cfg.pssm_dir, t, {".pssm"});
    const auto spd_path = detail::find_profile(cfg.spd_dir, t, {".spd", ".spd3", ".spd33"});
    if (!pssm_path) errors.push_back("target " + t + ": no PSSM file " + (cfg.pssm_dir / (t + ".pssm")).string());
    if (!spd_path) errors.push_back("target " + t + ": no SPD file " + (cfg.spd_dir / (t + ".spd")).string());
    if (!pssm_path || !spd_path) continue;

    PssmProfile pssm;
    StructProfile spd;
    try {
      std::ifstream p(*pssm_path, std::ios::binary);
      pssm = parse_pssm(p, t);
    } catch (const ParseError& e) {
      errors.push_back(pssm_path->string() + ": " + e.what());
      continue;
    }
    try {
      std::ifstream s(*spd_path, std::ios::binary);
      spd = parse_spd(s, t);
    } catch (const ParseError& e) {
      errors.push_back(spd_path->string() + ": " + e.what());
      continue;
    }
    lengths[t] = {{"pssm", pssm.length()}, {"spd", spd.length()}};
    try {
      target_rows[t] = target_block(pssm, spd, cfg.features);
    } catch (const DegenerateInputError& e) {
      result.skipped.push_back({t, e.what()});
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " input error(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(msg);
  }

  InteractionGraph kept;
  for (const auto& d : graph.drugs()) kept.add_drug(d);
  for (const auto& t : graph.targets())
    if (target_rows.contains(t)) kept.add_target(t);
  for (const auto& e : graph.edges())
    if (target_rows.contains(e.target)) kept.add_edge(e.drug, e.target);

  auto lookup = [](const std::map<std::string, std::vector<double>>& rows) {
    return [&rows](const std::string& id) -> const std::vector<double>* {
      auto it = rows.find(id);
      return it == rows.end() ? nullptr : &it->second;
    };
  };
  const auto ds = build_dataset(kept, lookup(drug_rows), lookup(target_rows), group_spans(cfg.features));

  fs::create_directories(cfg.output_dir);
  {
    auto out = detail::open_output(cfg.output_dir / kMatrixFile);
    write_feature_matrix(ds, out);
  }
  {
    auto out = detail::open_output(cfg.output_dir / kPairsFile);
    write_pair_list(ds, out);
  }
  result.rows = ds.size();
  result.columns = ds.dimension() + 1;

  nlohmann::json spans = nlohmann::json::object();
  for (const auto& [g, r] : ds.group_spans) spans[std::string(1, g)] = {r.begin, r.end};
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : result.skipped) skipped.push_back({{"target", s.target}, {"reason", s.reason}});
  const nlohmann::json manifest = {
      {"matrix", kMatrixFile},
      {"pairs", kPairsFile},
      {"rows", result.rows},
      {"columns", result.columns},
      {"features", ds.dimension()},
      {"feature_groups", cfg.features.groups},
      {"distance_factor", cfg.features.distance_factor},
      {"group_spans", spans},
      {"drugs", kept.drugs().size()},
      {"targets", kept.targets().size()},
      {"positives", ds.count(Label::positive)},
      {"negatives", ds.count(Label::negative)},
      {"target_lengths", lengths},
      {"skipped", skipped},
  };
  {
    auto out = detail::open_output(cfg.output_dir / kManifestFile);
    out << manifest.dump(1) << '\n';
  }
  log << "built " << result.rows << " pairs x " << result.columns << " columns ("
      << ds.count(Label::positive) << " positive, " << ds.count(Label::negative) << " negative) in "
      << cfg.output_dir.string() << '\n';
  for (const auto& s : result.skipped) log << "skipped target " << s.target << ": " << s.reason << '\n';
  if (!result.skipped.empty() && !cfg.allow_skips)
    throw SkippedTargetsError(std::to_string(result.skipped.size()) +
                              " target(s) skipped; rerun with --allow-skips to accept");
  return result;
}

struct TrainingData {
  PairDataset dataset;
  FeatureGroupConfig feature_config;
};

/// Loads the build stage's matrix, pair list and manifest from `dir`.
inline TrainingData load_training_data(const fs::path& dir) {
  TrainingData td;
  nlohmann::json manifest;
  {
    auto in = detail::open_input(dir / kManifestFile, "manifest");
    try {
      manifest = nlohmann::json::parse(in);
      td.feature_config.groups = manifest.at("feature_groups").get<std::string>();
      td.feature_config.distance_factor = manifest.at("distance_factor").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("corrupt manifest " + (dir / kManifestFile).string() + ": " + e.what());
    }
  }
  {
    auto in = detail::open_input(dir / kMatrixFile, "feature matrix");
    td.dataset = read_feature_matrix(in);
  }
  {
    auto in = detail::open_input(dir / kPairsFile, "pair list");
    td.dataset.pairs = read_pair_list(in);
  }
  if (td.dataset.pairs.size() != td.dataset.labels.size())
    throw FormatError("pair list has " + std::to_string(td.dataset.pairs.size()) + " rows, matrix has " +
                      std::to_string(td.dataset.labels.size()));
  if (td.dataset.group_spans != group_spans(td.feature_config))
    throw FormatError("matrix columns do not match the manifest's feature groups");
  return td;
}

inline BoostedEnsemble cmd_train(const RunConfig& cfg, std::ostream& log) {
  const auto td = load_training_data(cfg.output_dir);
  const auto balanced = balance(td.dataset, cfg.balance);
  log << "balancing " << to_string(cfg.balance.method) << ": " << td.dataset.size() << " -> " << balanced.size()
      << " samples (" << balanced.count(Label::positive) << " positive)\n";

  log << "round\tepsilon\talpha\tZ\n";
  auto model = train_adaboost(balanced.features, balanced.labels, cfg.rounds, cfg.tree,
                              [&log](std::size_t t, const RoundRecord& r, auto, auto) {
                                log << t + 1 << '\t' << detail::format_double(r.epsilon) << '\t'
                                    << detail::format_double(r.alpha) << '\t' << detail::format_double(r.z)
                                    << '\n';
                              });
  model.feature_config = td.feature_config;
  save_model(model, cfg.model_file());
  log << "trained " << model.rounds() << " trees, training error " << model.training_error << " (bound "
      << training_error_bound(model) << "), model written to " << cfg.model_file().string() << '\n';
  return model;
}

inline EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const auto td = load_training_data(cfg.output_dir);
  CvConfig cv;
  cv.balance = cfg.balance;
  cv.tree = cfg.tree;
  cv.rounds = cfg.rounds;
  cv.folds = cfg.folds;
  cv.repeats = cfg.repeats;
  cv.seed = cfg.seed;
  cv.threshold = cfg.threshold;
  cv.threads = cfg.threads;
  const auto report = cross_validate(td.dataset, cv);

  {
    auto out = detail::open_output(cfg.output_dir / "report.json");
    auto j = to_json(report);
    j["config"] = {{"balance", to_string(cfg.balance.method)},
                   {"k", cfg.balance.k},
                   {"h", cfg.balance.h},
                   {"target_ratio", cfg.balance.target_ratio},
                   {"tree_params", to_json(cfg.tree)},
                   {"rounds", cfg.rounds},
                   {"folds", cfg.folds},
                   {"repeats", cfg.repeats},
                   {"seed", cfg.seed},
                   {"threshold", cfg.threshold}};
    out << j.dump(1) << '\n';
  }
  for (const auto& f : report.per_fold) {
    const auto suffix = "_r" + std::to_string(f.repeat) + "_f" + std::to_string(f.fold) + ".csv";
    auto roc = detail::open_output(cfg.output_dir / "curves" / ("roc" + suffix));
    write_curve_csv(f.roc, roc);
    auto pr = detail::open_output(cfg.output_dir / "curves" / ("pr" + suffix));
    write_curve_csv(f.pr, pr);
  }
  log << "mean auROC " << detail::format_double(report.mean.auroc) << '\n'
      << "mean auPR " << detail::format_double(report.mean.aupr) << '\n';
  return report;
}

struct Prediction {
  double probability;
  Label label;
};

inline Prediction cmd_predict(const RunConfig& cfg, const std::string& drug_id, const fs::path& pssm_file,
                              const fs::path& spd_file, std::ostream& out) {
  const auto model = load_model(cfg.model_file());
  auto fp_in = detail::open_input(cfg.fingerprints, "fingerprint table");
  const auto fingerprints = parse_fingerprints(fp_in);
  const auto* fp = fingerprints.find(drug_id);
  if (!fp) throw MissingDataError("drug not in fingerprint table: " + drug_id, drug_id);

  auto pin = detail::open_input(pssm_file, "PSSM file");
  const auto pssm = parse_pssm(pin, pssm_file.stem().string());
  auto sin = detail::open_input(spd_file, "SPD file");
  const auto spd = parse_spd(sin, spd_file.stem().string());

  const auto features = assemble_features(*fp, pssm, spd, model.feature_config);
  if (features.values.size() != model.n_features)
    throw DimensionError("pair has " + std::to_string(features.values.size()) + " features, model expects " +
                         std::to_string(model.n_features));
  const double p = predict_proba(model, features.values);
  const Prediction pred{p, p > cfg.threshold ? Label::positive : Label::negative};
  out << "probability\t" << detail::format_double(pred.probability) << '\n'
      << "class\t" << (pred.label == Label::positive ? "+1" : "-1") << '\n';
  return pred;
}

inline std::vector<Candidate> cmd_rank(const RunConfig& cfg, std::size_t top_n, std::ostream& out) {
  const auto model = load_model(cfg.model_file());
  const auto td = load_training_data(cfg.output_dir);
  const auto candidates = rank_candidates(model, td.dataset, top_n);
  {
    auto file = detail::open_output(cfg.output_dir / "candidates.tsv");
    write_candidates(candidates, file);
  }
  write_candidates(candidates, out);
  return candidates;
}

}  // namespace dtiboost
