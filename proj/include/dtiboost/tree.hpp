#pragma once

// Weighted CART classification trees (Gini impurity) used as boosting weak
// learners. Sample weights enter the impurity directly; nothing is resampled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/matrix.hpp"

namespace dtiboost {

enum class SplitCriterion { gini };

struct TreeParams {
  int max_depth = 5;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  SplitCriterion criterion = SplitCriterion::gini;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

inline void validate(const TreeParams& p) {
  if (p.max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (p.min_samples_split < 2) throw InvalidArgument("min_samples_split must be >= 2");
  if (p.min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
}

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;  // kLeaf for leaves
  double threshold = 0.0;        // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  Label label = Label::negative;
  double positive_fraction = 0.0;  // weight share of the positive class at this node

  bool is_leaf() const noexcept { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {
    check();
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t n_features() const noexcept { return n_features_; }

  /// Edges on the longest root-to-leaf path.
  int depth() const { return nodes_.empty() ? 0 : depth_from(0); }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  Label predict(std::span<const double> x) const {
    if (x.size() != n_features_)
      throw DimensionError("input has " + std::to_string(x.size()) + " features, tree expects " +
                           std::to_string(n_features_));
    std::size_t at = 0;
    while (!nodes_[at].is_leaf()) {
      const auto& n = nodes_[at];
      at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[at].label;
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  int depth_from(std::size_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)),
                        depth_from(static_cast<std::size_t>(n.right)));
  }

  // Children must come after their parent so any node list is a finite tree.
  void check() const {
    if (nodes_.empty()) throw FormatError("tree has no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (n.is_leaf()) continue;
      const auto in_range = [&](std::int32_t c) {
        return c > static_cast<std::int32_t>(i) && static_cast<std::size_t>(c) < nodes_.size();
      };
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_features_)
        throw FormatError("node " + std::to_string(i) + " references feature " +
                          std::to_string(n.feature) + " outside [0, " + std::to_string(n_features_) + ")");
      if (!in_range(n.left) || !in_range(n.right))
        throw FormatError("node " + std::to_string(i) + " has invalid children");
    }
  }

  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

inline Label tree_predict(const DecisionTree& tree, std::span<const double> x) { return tree.predict(x); }

namespace detail {

// Weighted Gini impurity scaled by the node weight: W * (1 - p^2 - q^2).
inline double weighted_gini(double pos, double neg) {
  const double w = pos + neg;
  if (w <= 0.0) return 0.0;
  return w - (pos * pos + neg * neg) / w;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const Label> y, std::span<const double> w, const TreeParams& p)
      : x_(x), y_(y), w_(w), params_(p), n_(x.rows()), order_(x.cols() * x.rows()),
        scratch_(x.rows()), goes_left_(x.rows()) {
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      auto* seg = order_.data() + f * n_;
      std::iota(seg, seg + n_, std::uint32_t{0});
      std::stable_sort(seg, seg + n_, [&](std::uint32_t a, std::uint32_t b) { return x_(a, f) < x_(b, f); });
    }
  }

  DecisionTree build() {
    grow(0, n_, 0);
    return DecisionTree(std::move(nodes_), x_.cols());
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
    bool found = false;
  };

  std::int32_t grow(std::size_t begin, std::size_t end, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    double pos = 0.0, neg = 0.0;
    std::size_t n_pos = 0;
    // Any feature's segment lists the node's samples.
    for (std::size_t k = begin; k < end; ++k) {
      const auto i = order_[k];
      if (y_[i] == Label::positive) {
        pos += w_[i];
        ++n_pos;
      } else {
        neg += w_[i];
      }
    }
    const std::size_t count = end - begin;
    {
      auto& leaf = nodes_[static_cast<std::size_t>(id)];
      leaf.label = pos > neg ? Label::positive : Label::negative;
      leaf.positive_fraction = pos + neg > 0.0 ? pos / (pos + neg) : 0.0;
    }

    const bool pure = n_pos == 0 || n_pos == count;
    if (pure || depth >= params_.max_depth || count < static_cast<std::size_t>(params_.min_samples_split) ||
        count < 2 * static_cast<std::size_t>(params_.min_samples_leaf))
      return id;

    const Split split = best_split(begin, end, pos, neg);
    if (!split.found) return id;

    // Stable-partition every feature's segment into left then right.
    std::size_t n_left = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const auto i = order_[k];
      goes_left_[i] = x_(i, split.feature) <= split.threshold;
      n_left += goes_left_[i];
    }
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      auto* seg = order_.data() + f * n_;
      std::size_t l = begin, r = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const auto i = seg[k];
        if (goes_left_[i]) seg[l++] = i;
        else scratch_[r++] = i;
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), seg + l);
    }

    const auto left = grow(begin, begin + n_left, depth + 1);
    const auto right = grow(begin + n_left, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  // Lowest weighted Gini; earlier features and lower thresholds win ties.
  Split best_split(std::size_t begin, std::size_t end, double pos, double neg) const {
    Split best;
    const double tol = 1e-13 * (pos + neg);
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    const std::size_t count = end - begin;
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      const auto* seg = order_.data() + f * n_;
      double lp = 0.0, ln = 0.0;
      for (std::size_t k = begin; k + 1 < end; ++k) {
        const auto i = seg[k];
        (y_[i] == Label::positive ? lp : ln) += w_[i];
        const std::size_t n_left = k - begin + 1;
        const double a = x_(i, f), b = x_(seg[k + 1], f);
        if (!(a < b) || n_left < min_leaf || count - n_left < min_leaf) continue;
        const double impurity = weighted_gini(lp, ln) + weighted_gini(pos - lp, neg - ln);
        if (!best.found || impurity < best.impurity - tol) {
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = {f, mid, impurity, true};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const Label> y_;
  std::span<const double> w_;
  TreeParams params_;
  std::size_t n_;
  std::vector<std::uint32_t> order_;  // per-feature sample order, node segments contiguous
  std::vector<std::uint32_t> scratch_;
  std::vector<char> goes_left_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Greedy CART fit under the sample distribution `weights` (must sum to 1).
/// Thresholds are midpoints between consecutive distinct feature values; a
/// leaf predicts the weighted majority class, negative on ties.
inline DecisionTree train_tree(const Matrix& samples, std::span<const Label> labels,
                               std::span<const double> weights, const TreeParams& params) {
  validate(params);
  if (samples.rows() == 0) throw InvalidArgument("cannot train a tree on an empty sample set");
  if (labels.size() != samples.rows() || weights.size() != samples.rows())
    throw DimensionError("samples, labels and weights differ in length");
  if (samples.rows() > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("too many samples");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("sample weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw InvalidArgument("sample weights sum to " + std::to_string(total) + ", expected 1");
  return detail::TreeBuilder(samples, labels, weights, params).build();
}

}  // namespace dtiboost
