#pragma once

// Discrete AdaBoost over weighted CART trees.
//
// Each round fits a tree under the current distribution D_t, takes its
// weighted error eps_t, sets alpha_t = 0.5 ln((1 - eps_t) / eps_t) and
// reweights D_{t+1}(i) = D_t(i) exp(-alpha_t y_i h_t(x_i)) / Z_t with
// Z_t = 2 sqrt(eps_t (1 - eps_t)).
//
// A perfect round (eps_t <= 1e-10) is kept with eps_t clamped to 1e-10 and
// ends training; a round no better than chance (eps_t >= 0.5) is dropped and
// ends training.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/features.hpp"
#include "dtiboost/matrix.hpp"
#include "dtiboost/tree.hpp"

namespace dtiboost {

inline constexpr double kMinRoundError = 1e-10;

inline double boosting_alpha(double epsilon) { return 0.5 * std::log((1.0 - epsilon) / epsilon); }
inline double boosting_normalizer(double epsilon) { return 2.0 * std::sqrt(epsilon * (1.0 - epsilon)); }

struct RoundRecord {
  double epsilon = 0.0;
  double alpha = 0.0;
  double z = 0.0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct BoostedEnsemble {
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;
  std::vector<RoundRecord> training_log;
  TreeParams tree_params;
  int requested_rounds = 0;
  std::size_t n_features = 0;
  FeatureGroupConfig feature_config;  // layout the model was trained on
  double training_error = 0.0;        // unweighted, on the training set

  std::size_t rounds() const noexcept { return trees.size(); }

  friend bool operator==(const BoostedEnsemble&, const BoostedEnsemble&) = default;
};

/// Called once per kept round with the distribution that round was fit under
/// and the reweighted distribution (empty after a terminating perfect round).
using RoundObserver =
    std::function<void(std::size_t round, const RoundRecord&, std::span<const double> weights,
                       std::span<const double> next_weights)>;

/// sum_t alpha_t h_t(x) / sum_t alpha_t, in [-1, 1].
inline double ensemble_margin(const BoostedEnsemble& model, std::span<const double> x) {
  if (model.trees.empty()) throw InvalidArgument("model has no trees");
  if (x.size() != model.n_features)
    throw DimensionError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.n_features));
  double vote = 0.0, total = 0.0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    vote += model.alphas[t] * sign(model.trees[t].predict(x));
    total += model.alphas[t];
  }
  if (total == 0.0) throw InvalidArgument("model weights sum to zero");
  return vote / total;
}

inline Label classify(const BoostedEnsemble& model, std::span<const double> x) {
  return ensemble_margin(model, x) > 0.0 ? Label::positive : Label::negative;
}

/// Positive-class score (margin + 1) / 2.
inline double predict_proba(const BoostedEnsemble& model, std::span<const double> x) {
  return (ensemble_margin(model, x) + 1.0) / 2.0;
}

inline std::vector<double> predict_proba(const BoostedEnsemble& model, const Matrix& samples) {
  std::vector<double> out(samples.rows());
  for (std::size_t i = 0; i < samples.rows(); ++i) out[i] = predict_proba(model, samples.row(i));
  return out;
}

inline double training_error_bound(const BoostedEnsemble& model) {
  double bound = 1.0;
  for (const auto& r : model.training_log) bound *= r.z;
  return bound;
}

inline BoostedEnsemble train_adaboost(const Matrix& samples, std::span<const Label> labels, int rounds,
                                      const TreeParams& params, const RoundObserver& observer = {}) {
  if (rounds < 1) throw InvalidArgument("number of boosting rounds must be >= 1");
  validate(params);
  const std::size_t m = samples.rows();
  if (labels.size() != m) throw DimensionError("samples and labels differ in length");
  bool has_pos = false, has_neg = false;
  for (auto y : labels) (y == Label::positive ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw InvalidArgument("boosting needs samples of both classes");

  BoostedEnsemble model;
  model.tree_params = params;
  model.requested_rounds = rounds;
  model.n_features = samples.cols();

  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  std::vector<double> next(m);
  std::vector<int> correct(m);
  for (int t = 0; t < rounds; ++t) {
    auto tree = train_tree(samples, labels, weights, params);
    double wrong = 0.0, total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      correct[i] = tree.predict(samples.row(i)) == labels[i];
      total += weights[i];
      if (!correct[i]) wrong += weights[i];
    }
    const double eps = wrong / total;
    if (eps >= 0.5) break;

    const bool perfect = eps <= kMinRoundError;
    RoundRecord rec;
    rec.epsilon = perfect ? kMinRoundError : eps;
    rec.alpha = boosting_alpha(rec.epsilon);
    rec.z = boosting_normalizer(rec.epsilon);
    model.trees.push_back(std::move(tree));
    model.alphas.push_back(rec.alpha);
    model.training_log.push_back(rec);

    if (perfect) {
      if (observer) observer(static_cast<std::size_t>(t), rec, weights, {});
      break;
    }
    const double up = std::exp(rec.alpha) / rec.z, down = std::exp(-rec.alpha) / rec.z;
    for (std::size_t i = 0; i < m; ++i) next[i] = weights[i] * (correct[i] ? down : up);
    if (observer) observer(static_cast<std::size_t>(t), rec, weights, next);
    weights.swap(next);
  }
  if (model.trees.empty())
    throw InvalidArgument("no weak learner beat chance on the first round (weighted error >= 0.5)");

  std::size_t errors = 0;
  for (std::size_t i = 0; i < m; ++i) errors += classify(model, samples.row(i)) != labels[i];
  model.training_error = static_cast<double>(errors) / static_cast<double>(m);
  if (model.training_error > training_error_bound(model) + 1e-12)
    throw std::logic_error("training error exceeds the product of round normalizers");
  return model;
}

}  // namespace dtiboost
