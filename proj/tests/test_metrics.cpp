#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtiboost/metrics.hpp"
#include "oracles.hpp"

using namespace dtiboost;

namespace {

ScoredSet scored(std::vector<double> s, std::vector<int> y) {
  std::vector<Label> labels;
  for (int v : y) labels.push_back(v > 0 ? Label::positive : Label::negative);
  return ScoredSet(std::move(s), std::move(labels));
}

std::vector<int> ints(const ScoredSet& s) {
  std::vector<int> out;
  for (auto y : s.labels) out.push_back(sign(y));
  return out;
}

ScoredSet random_scored(std::mt19937_64& rng, bool need_both) {
  std::uniform_int_distribution<std::size_t> size(2, 200);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::uniform_real_distribution<double> fine(0, 1);
  std::bernoulli_distribution use_coarse(0.5), pos(0.3);
  for (;;) {
    const auto n = size(rng);
    const bool ties = use_coarse(rng);
    std::vector<double> s;
    std::vector<Label> y;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(ties ? coarse(rng) / 10.0 : fine(rng));
      y.push_back(pos(rng) ? Label::positive : Label::negative);
    }
    ScoredSet out(s, y);
    const auto p = out.positives();
    if (p > 0 && (!need_both || p < n)) return out;
  }
}

}  // namespace

TEST(Confusion, Examples) {
  const auto c = confusion(scored({0.9, 0.1}, {1, -1}), 0.5);
  EXPECT_EQ(c, (ConfusionCounts{1, 1, 0, 0}));
  const auto above = confusion(scored({0.9, 0.1, 0.4}, {1, -1, -1}), 0.95);
  EXPECT_EQ(above.tp + above.fp, 0u);
  const auto at = confusion(scored({0.5}, {1}), 0.5);
  EXPECT_EQ(at.fn, 1u);
  EXPECT_EQ(at.total(), 1u);
}

TEST(ScalarMetrics, Examples) {
  EXPECT_EQ(sensitivity({1, 0, 0, 0}), 1.0);
  EXPECT_EQ(f1({1, 0, 1, 1}), 0.5);
  EXPECT_EQ(precision({0, 3, 0, 2}), 0.0);
  EXPECT_EQ(specificity({}), 0.0);
  EXPECT_EQ(fpr({0, 3, 1, 0}), 0.25);
}

TEST(Mcc, Examples) {
  EXPECT_EQ(mcc({1, 1, 0, 0}), 1.0);
  EXPECT_EQ(mcc({0, 0, 1, 1}), -1.0);
  EXPECT_EQ(mcc({3, 0, 4, 0}), 0.0);
}

TEST(ScalarMetrics, BoundsOnRandomTables) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> n(0, 20);
  for (int i = 0; i < 2000; ++i) {
    const ConfusionCounts c{n(rng), n(rng), n(rng), n(rng)};
    for (double v : {sensitivity(c), specificity(c), precision(c), fpr(c), f1(c)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GE(mcc(c), -1.0);
    EXPECT_LE(mcc(c), 1.0);
  }
}

TEST(Auroc, Examples) {
  EXPECT_EQ(auroc(scored({1, 0, 1, 0}, {1, -1, 1, -1})), 1.0);
  EXPECT_EQ(auroc(scored({0.8, 0.7, 0.6, 0.5}, {1, -1, 1, -1})), 0.75);
  EXPECT_EQ(auroc(scored({0.3, 0.3, 0.3, 0.3}, {1, -1, 1, -1})), 0.5);
  EXPECT_THROW(auroc(scored({0.1, 0.2}, {1, 1})), InvalidArgument);
}

TEST(RocCurve, AnchoredAtBothCorners) {
  const auto c = roc_curve(scored({0.8, 0.7, 0.7, 0.5}, {1, -1, 1, -1}));
  ASSERT_EQ(c.size(), 4u);
  EXPECT_TRUE(std::isinf(c.front().threshold));
  EXPECT_EQ(c.front().x, 0.0);
  EXPECT_EQ(c.front().y, 0.0);
  EXPECT_EQ(c.back().x, 1.0);
  EXPECT_EQ(c.back().y, 1.0);
  EXPECT_EQ(c[2].threshold, 0.7);  // tied scores form one step
  EXPECT_EQ(c[2].x, 0.5);
  EXPECT_EQ(c[2].y, 1.0);
}

TEST(Aupr, Examples) {
  EXPECT_EQ(aupr(scored({0.9, 0.8, 0.2, 0.1}, {1, 1, -1, -1})), 1.0);
  EXPECT_EQ(aupr(scored({0.4, 0.4, 0.4, 0.4}, {1, -1, -1, -1})), 0.25);
  EXPECT_NEAR(aupr(scored({0.8, 0.7, 0.6, 0.5}, {1, -1, 1, -1})), 5.0 / 6.0, 1e-15);
  EXPECT_THROW(aupr(scored({0.1, 0.2}, {-1, -1})), InvalidArgument);
}

TEST(MetricOracles, RandomSets) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_scored(rng, true);
    const auto y = ints(s);
    EXPECT_NEAR(auroc(s), oracle::mann_whitney_auc(s.scores, y), 1e-9);
    EXPECT_NEAR(aupr(s), oracle::enumerated_aupr(s.scores, y), 1e-12);
  }
}

TEST(MetricProperties, LabelFlipDuality) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_scored(rng, true);
    std::vector<double> neg;
    std::vector<Label> flipped;
    for (std::size_t i = 0; i < s.size(); ++i) {
      neg.push_back(-s.scores[i]);
      flipped.push_back(opposite(s.labels[i]));
    }
    const ScoredSet f(neg, flipped);
    EXPECT_NEAR(auroc(f), auroc(s), 1e-12);
    const double t = 0.437;  // never equal to a generated score
    const auto a = confusion(s, t), b = confusion(f, -t);
    EXPECT_EQ(sensitivity(a), specificity(b));
    EXPECT_EQ(specificity(a), sensitivity(b));
  }
}

TEST(ScoredSet, Validation) {
  EXPECT_THROW(ScoredSet({0.1}, {}), DimensionError);
  EXPECT_THROW(ScoredSet({}, {}), InvalidArgument);
}

TEST(MeanOf, ArithmeticMean) {
  MetricRecord a, b;
  a.auroc = 0.5;
  b.auroc = 1.0;
  a.mcc = -1;
  b.mcc = 0.5;
  const std::vector<MetricRecord> v{a, b};
  const auto m = mean_of(v);
  EXPECT_EQ(m.auroc, 0.75);
  EXPECT_EQ(m.mcc, -0.25);
}
