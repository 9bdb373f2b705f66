#pragma once

// Stratified k-fold cross-validation and new-interaction ranking.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dtiboost/balance.hpp"
#include "dtiboost/boost.hpp"
#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/metrics.hpp"

namespace dtiboost {

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Shuffles each class independently and deals it round-robin into `folds`
/// folds; dealing continues across classes so fold sizes differ by at most one.
inline std::vector<Fold> stratified_kfold(std::span<const Label> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("need at least 2 folds");
  const auto k = static_cast<std::size_t>(folds);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == Label::positive ? pos : neg).push_back(i);
  for (const auto* cls : {&pos, &neg})
    if (cls->size() < k)
      throw InvalidArgument("stratified " + std::to_string(folds) + "-fold split needs at least " +
                            std::to_string(folds) + " samples per class, " +
                            (cls == &pos ? "positive" : "negative") + " class has " +
                            std::to_string(cls->size()));

  std::mt19937_64 rng(seed);
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(v[i - 1], v[pick(rng)]);
    }
  };
  shuffle(pos);
  shuffle(neg);

  std::vector<std::size_t> fold_of(labels.size());
  std::size_t deal = 0;
  for (auto i : pos) fold_of[i] = deal++ % k;
  for (auto i : neg) fold_of[i] = deal++ % k;

  std::vector<Fold> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? out[f].test : out[f].train).push_back(i);
  return out;
}

struct CvConfig {
  BalanceConfig balance;
  TreeParams tree;
  int rounds = 100;
  int folds = 5;
  int repeats = 5;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  int threads = 1;
};

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  std::vector<std::size_t> test_indices;
  std::size_t train_size = 0;
  std::size_t balanced_size = 0;
  std::size_t boosting_rounds = 0;
  ConfusionCounts counts;
  MetricRecord metrics;
  std::vector<CurvePoint> roc;
  std::vector<CurvePoint> pr;
};

struct EvalReport {
  std::vector<FoldResult> per_fold;         // repeat-major
  std::vector<MetricRecord> repeat_means;   // fold mean of each repeat
  MetricRecord mean;                        // mean over repeats
};

/// Scores one train/test split: balances the training part only, boosts,
/// then scores the untouched test part.
inline FoldResult run_fold(const PairDataset& dataset, const Fold& fold, const CvConfig& config,
                           std::uint64_t fold_seed) {
  std::vector<char> in_train(dataset.size(), 0);
  for (auto i : fold.train) in_train[i] = 1;
  for (auto i : fold.test)
    if (in_train[i]) throw std::logic_error("test sample " + std::to_string(i) + " is also in the training split");

  const auto train = dataset.subset(fold.train);
  auto bc = config.balance;
  bc.seed = fold_seed;
  const auto balanced = dataset.subset([&] {
    auto keep = balance_indices(train, bc);
    for (auto& i : keep) i = fold.train[i];
    return keep;
  }());
  const auto model = train_adaboost(balanced.features, balanced.labels, config.rounds, config.tree);

  const auto test = dataset.subset(fold.test);
  const ScoredSet scored(predict_proba(model, test.features), test.labels);
  FoldResult r;
  r.test_indices = fold.test;
  r.train_size = train.size();
  r.balanced_size = balanced.size();
  r.boosting_rounds = model.rounds();
  r.counts = confusion(scored, config.threshold);
  r.metrics = evaluate_scores(scored, config.threshold);
  r.roc = roc_curve(scored);
  r.pr = pr_curve(scored);
  return r;
}

/// Repeated stratified k-fold cross-validation. Repeats use independent
/// derived seeds; folds may run on `config.threads` threads with results
/// identical to a sequential run.
inline EvalReport cross_validate(const PairDataset& dataset, const CvConfig& config) {
  if (config.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  validate(config.balance);
  validate(config.tree);
  const auto folds = static_cast<std::size_t>(config.folds);
  const auto repeats = static_cast<std::size_t>(config.repeats);

  std::vector<std::vector<Fold>> splits;
  for (std::size_t r = 0; r < repeats; ++r)
    splits.push_back(stratified_kfold(dataset.labels, config.folds, derive_seed(config.seed, 2 * r)));

  EvalReport report;
  report.per_fold.resize(repeats * folds);
  std::vector<std::exception_ptr> errors(report.per_fold.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next++) < report.per_fold.size();) {
      const std::size_t r = task / folds, f = task % folds;
      try {
        auto res = run_fold(dataset, splits[r][f], config, derive_seed(derive_seed(config.seed, 2 * r + 1), f));
        res.repeat = static_cast<int>(r);
        res.fold = static_cast<int>(f);
        report.per_fold[task] = std::move(res);
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.threads));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, report.per_fold.size()); ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t r = 0; r < repeats; ++r) {
    std::vector<MetricRecord> fold_metrics;
    for (std::size_t f = 0; f < folds; ++f) fold_metrics.push_back(report.per_fold[r * folds + f].metrics);
    report.repeat_means.push_back(mean_of(fold_metrics));
  }
  report.mean = mean_of(report.repeat_means);
  return report;
}

struct Candidate {
  std::string drug;
  std::string target;
  double probability;
};

/// Negative-labeled pairs by descending positive-class probability, ties in
/// (drug, target) order. `top_n` = 0 keeps all.
inline std::vector<Candidate> rank_candidates(const BoostedEnsemble& model, const PairDataset& dataset,
                                              std::size_t top_n = 0) {
  if (dataset.dimension() != model.n_features)
    throw DimensionError("dataset has " + std::to_string(dataset.dimension()) + " features, model expects " +
                         std::to_string(model.n_features));
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.labels[i] != Label::negative) continue;
    out.push_back({dataset.pairs[i].drug, dataset.pairs[i].target, predict_proba(model, dataset.features.row(i))});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.drug != b.drug) return a.drug < b.drug;
    return a.target < b.target;
  });
  if (top_n > 0 && out.size() > top_n) out.resize(top_n);
  return out;
}

}  // namespace dtiboost
