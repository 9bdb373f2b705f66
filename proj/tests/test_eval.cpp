#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dtiboost/eval.hpp"
#include "test_support.hpp"

using namespace dtiboost;

namespace {

std::vector<Label> labels_of(std::size_t pos, std::size_t neg) {
  std::vector<Label> y(pos, Label::positive);
  y.insert(y.end(), neg, Label::negative);
  return y;
}

CvConfig quick_config(std::uint64_t seed) {
  CvConfig cfg;
  cfg.balance.method = BalanceMethod::random;
  cfg.tree = {3, 2, 1};
  cfg.rounds = 20;
  cfg.folds = 5;
  cfg.repeats = 1;
  cfg.seed = seed;
  return cfg;
}

testkit::SyntheticShape separable_shape() {
  testkit::SyntheticShape s;
  s.samples = 500;
  s.features = 2;
  s.positive_fraction = 1.0 / 11.0;
  s.separation = 8.0;
  return s;
}

DecisionTree leaf(Label y, std::size_t dim) {
  std::vector<TreeNode> nodes(1);
  nodes[0].label = y;
  return DecisionTree(nodes, dim);
}

// Stump voting +1 exactly when feature 0 exceeds `cut`.
DecisionTree stump(double cut, std::size_t dim) {
  std::vector<TreeNode> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = cut;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].label = Label::negative;
  nodes[2].label = Label::positive;
  return DecisionTree(nodes, dim);
}

PairDataset tiny_pairs(std::vector<double> x0, std::vector<int> y, std::vector<DrugTargetPair> pairs) {
  PairDataset ds;
  ds.features = Matrix(0, 1);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double row[] = {x0[i]};
    ds.features.push_row(row);
    ds.labels.push_back(y[i] > 0 ? Label::positive : Label::negative);
  }
  ds.pairs = std::move(pairs);
  return ds;
}

}  // namespace

TEST(StratifiedKfold, PaperShape) {
  const auto y = labels_of(90, 1314);
  const auto folds = stratified_kfold(y, 5, 1);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f.test) pos += y[i] == Label::positive;
    EXPECT_EQ(pos, 18u);
    EXPECT_GE(f.test.size(), 280u);
    EXPECT_LE(f.test.size(), 281u);
  }
}

TEST(StratifiedKfold, OneOfEachPerFold) {
  const auto y = labels_of(5, 5);
  for (const auto& f : stratified_kfold(y, 5, 3)) {
    ASSERT_EQ(f.test.size(), 2u);
    EXPECT_NE(y[f.test[0]], y[f.test[1]]);
  }
}

TEST(StratifiedKfold, SmallClassIsError) {
  EXPECT_THROW(stratified_kfold(labels_of(1, 10), 2, 0), InvalidArgument);
  EXPECT_THROW(stratified_kfold(labels_of(4, 100), 5, 0), InvalidArgument);
  EXPECT_THROW(stratified_kfold(labels_of(10, 10), 1, 0), InvalidArgument);
}

TEST(StratifiedKfold, PartitionAndRatioProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> npos(5, 60), nneg(5, 400);
    std::uniform_int_distribution<int> nf(2, 5);
    const int k = nf(rng);
    auto y = labels_of(npos(rng), nneg(rng));
    std::shuffle(y.begin(), y.end(), rng);
    const auto folds = stratified_kfold(y, k, std::uint64_t(trial));
    std::vector<int> seen(y.size(), 0);
    const double global = double(std::count(y.begin(), y.end(), Label::positive)) / double(y.size());
    for (const auto& f : folds) {
      for (auto i : f.test) ++seen[i];
      EXPECT_EQ(f.train.size() + f.test.size(), y.size());
      std::vector<std::size_t> both;
      std::set_intersection(f.train.begin(), f.train.end(), f.test.begin(), f.test.end(), std::back_inserter(both));
      EXPECT_TRUE(both.empty());
      double pos = 0;
      for (auto i : f.test) pos += y[i] == Label::positive;
      EXPECT_LE(std::abs(pos / double(f.test.size()) - global), 1.0 / double(f.test.size()) + 1e-12);
    }
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(StratifiedKfold, SeedDeterminesSplit) {
  const auto y = labels_of(20, 80);
  const auto a = stratified_kfold(y, 4, 9), b = stratified_kfold(y, 4, 9), c = stratified_kfold(y, 4, 10);
  EXPECT_EQ(a[0].test, b[0].test);
  EXPECT_NE(a[0].test, c[0].test);
}

TEST(CrossValidate, SeparableDataRanksNearPerfectly) {
  const auto ds = testkit::synthetic_dataset(separable_shape());
  auto cfg = quick_config(3);
  cfg.repeats = 2;
  const auto report = cross_validate(ds, cfg);
  EXPECT_GE(report.mean.auroc, 0.99);
}

TEST(CrossValidate, PermutedLabelsGiveChanceAuroc) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto shape = separable_shape();
    shape.seed = 100 + seed;
    auto ds = testkit::synthetic_dataset(shape);
    std::mt19937_64 rng(seed);
    std::shuffle(ds.labels.begin(), ds.labels.end(), rng);
    total += cross_validate(ds, quick_config(seed)).mean.auroc;
  }
  const double mean = total / 10.0;
  EXPECT_GE(mean, 0.4);
  EXPECT_LE(mean, 0.6);
}

TEST(CrossValidate, EveryTestIndexOncePerRepeat) {
  const auto ds = testkit::synthetic_dataset(separable_shape());
  auto cfg = quick_config(8);
  cfg.repeats = 3;
  cfg.balance.method = BalanceMethod::clustered;
  cfg.balance.k = 5;
  const auto report = cross_validate(ds, cfg);
  ASSERT_EQ(report.per_fold.size(), 15u);
  for (int r = 0; r < 3; ++r) {
    std::vector<int> seen(ds.size(), 0);
    for (const auto& f : report.per_fold)
      if (f.repeat == r)
        for (auto i : f.test_indices) ++seen[i];
    for (int s : seen) EXPECT_EQ(s, 1);
  }
  for (const auto& f : report.per_fold) {
    EXPECT_EQ(f.train_size + f.test_indices.size(), ds.size());
    EXPECT_LT(f.balanced_size, f.train_size);
    EXPECT_EQ(f.counts.total(), f.test_indices.size());
  }
}

TEST(CrossValidate, MeansAreAveragesOfFolds) {
  const auto ds = testkit::synthetic_dataset(separable_shape());
  auto cfg = quick_config(4);
  cfg.repeats = 2;
  const auto report = cross_validate(ds, cfg);
  double grand = 0.0;
  for (int r = 0; r < 2; ++r) {
    double s = 0.0;
    for (const auto& f : report.per_fold)
      if (f.repeat == r) s += f.metrics.aupr;
    EXPECT_NEAR(report.repeat_means[std::size_t(r)].aupr, s / 5.0, 1e-12);
    grand += s / 5.0;
  }
  EXPECT_NEAR(report.mean.aupr, grand / 2.0, 1e-12);
}

TEST(CrossValidate, ThreadedRunMatchesSequential) {
  const auto ds = testkit::synthetic_dataset(separable_shape());
  auto cfg = quick_config(6);
  cfg.repeats = 2;
  const auto a = cross_validate(ds, cfg);
  cfg.threads = 4;
  const auto b = cross_validate(ds, cfg);
  ASSERT_EQ(a.per_fold.size(), b.per_fold.size());
  for (std::size_t i = 0; i < a.per_fold.size(); ++i) EXPECT_EQ(a.per_fold[i].metrics, b.per_fold[i].metrics);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(CrossValidate, StratificationErrorSurfaces) {
  auto shape = separable_shape();
  shape.samples = 100;
  shape.positive_fraction = 0.04;
  EXPECT_THROW(cross_validate(testkit::synthetic_dataset(shape), quick_config(1)), InvalidArgument);
}

TEST(RunFold, OverlappingSplitIsRejected) {
  const auto ds = testkit::synthetic_dataset(separable_shape());
  Fold bad;
  for (std::size_t i = 0; i < 400; ++i) bad.train.push_back(i);
  for (std::size_t i = 399; i < 500; ++i) bad.test.push_back(i);
  EXPECT_THROW(run_fold(ds, bad, quick_config(1), 1), std::logic_error);
}

TEST(RankCandidates, UnanimousPairRanksFirst) {
  BoostedEnsemble m;
  m.n_features = 1;
  m.trees = {stump(0.5, 1), stump(0.5, 1)};
  m.alphas = {1.0, 2.0};
  const auto ds = tiny_pairs({0, 1, 0, 0}, {1, -1, -1, -1}, {{"a", "x"}, {"a", "y"}, {"b", "x"}, {"b", "y"}});
  const auto c = rank_candidates(m, ds);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].drug, "a");
  EXPECT_EQ(c[0].target, "y");
  EXPECT_EQ(c[0].probability, 1.0);
  EXPECT_EQ(c[1].probability, 0.0);
}

TEST(RankCandidates, TiesInLexicographicOrder) {
  BoostedEnsemble m;
  m.n_features = 1;
  m.trees = {leaf(Label::positive, 1)};
  m.alphas = {1.0};
  const auto ds = tiny_pairs({0, 0, 0}, {-1, -1, -1}, {{"b", "x"}, {"a", "z"}, {"a", "y"}});
  const auto c = rank_candidates(m, ds);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].target, "y");
  EXPECT_EQ(c[1].target, "z");
  EXPECT_EQ(c[2].drug, "b");
}

TEST(RankCandidates, TopNAndClamp) {
  BoostedEnsemble m;
  m.n_features = 1;
  m.trees = {stump(0.5, 1)};
  m.alphas = {1.0};
  std::vector<double> x;
  std::vector<int> y;
  std::vector<DrugTargetPair> pairs;
  for (int i = 0; i < 30; ++i) {
    x.push_back(i % 2);
    y.push_back(i < 3 ? 1 : -1);
    pairs.push_back({"d" + std::to_string(i / 10), "t" + std::to_string(i % 10)});
  }
  const auto ds = tiny_pairs(x, y, pairs);
  EXPECT_EQ(rank_candidates(m, ds, 10).size(), 10u);
  EXPECT_EQ(rank_candidates(m, ds, 100).size(), 27u);
  EXPECT_EQ(rank_candidates(m, ds, 0).size(), 27u);
  BoostedEnsemble wide = m;
  wide.n_features = 2;
  EXPECT_THROW(rank_candidates(wide, ds), DimensionError);
}
