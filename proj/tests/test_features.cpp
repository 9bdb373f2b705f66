#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dtiboost/features.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dtiboost;

namespace {

oracle::Grid grid(const Matrix& m) {
  oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

void expect_near_all(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "index " << i;
}

Matrix rows_of(std::size_t L, std::vector<double> row) {
  Matrix m;
  for (std::size_t i = 0; i < L; ++i) m.push_row(row);
  return m;
}

StructProfile profile_of_length(std::size_t L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testkit::random_struct_profile(L, rng);
}

PssmProfile pssm_of_length(std::size_t L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PssmProfile p;
  p.raw = testkit::random_matrix(L, 20, -8, 8, rng);
  return p;
}

}  // namespace

TEST(NormalizePssm, ZerosMapToHalf) {
  const auto n = normalize_pssm(Matrix(3, 20));
  for (double v : n.data()) EXPECT_EQ(v, 0.5);
}

TEST(NormalizePssm, LogThreeMapsToThreeQuarters) {
  Matrix m(1, 20, std::log(3.0));
  EXPECT_NEAR(normalize_pssm(m)(0, 0), 0.75, 1e-15);
}

TEST(NormalizePssm, SaturatesInsideOpenInterval) {
  Matrix m(1, 20, 50.0);
  m(0, 1) = -800.0;
  m(0, 2) = 800.0;
  const auto n = normalize_pssm(m);
  EXPECT_NEAR(n(0, 0), 1.0, 1e-9);
  EXPECT_GT(n(0, 1), 0.0);
  EXPECT_LT(n(0, 2), 1.0);
  EXPECT_EQ(n.rows(), 1u);
  EXPECT_EQ(n.cols(), 20u);
}

TEST(PssmBigram, TwoRowExample) {
  Matrix n(2, 20);
  n(0, 0) = 1.0;
  n(1, 1) = 1.0;
  const auto b = pssm_bigram(n);
  ASSERT_EQ(b.size(), 400u);
  for (std::size_t i = 0; i < 400; ++i) EXPECT_EQ(b[i], i == 1 ? 0.5 : 0.0) << i;
}

TEST(PssmBigram, ZeroMatrix) {
  for (double v : pssm_bigram(Matrix(4, 20))) EXPECT_EQ(v, 0.0);
}

TEST(PssmBigram, MatchesOracle) {
  std::mt19937_64 rng(1);
  const auto n = testkit::random_matrix(5, 20, 0.0, 1.0, rng);
  expect_near_all(pssm_bigram(n), oracle::bigram(grid(n)), 1e-12);
}

TEST(PssmBigram, ShortProfileIsDegenerate) { EXPECT_THROW(pssm_bigram(Matrix(1, 20)), DegenerateInputError); }

TEST(PssmBigram, EntriesBoundedByLengthRatio) {
  std::mt19937_64 rng(9);
  for (std::size_t L = 2; L <= 10; ++L) {
    const auto n = normalize_pssm(testkit::random_matrix(L, 20, -20, 20, rng));
    const double cap = double(L - 1) / double(L);
    for (double v : pssm_bigram(n)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, cap);
    }
  }
}

TEST(SsComposition, Examples) {
  const auto a = ss_composition("HHEC");
  EXPECT_EQ(a[0], 0.5);
  EXPECT_EQ(a[1], 0.25);
  EXPECT_EQ(a[2], 0.25);
  const auto b = ss_composition("CCCC");
  EXPECT_EQ(b[0], 0.0);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_EQ(b[2], 1.0);
}

TEST(SsComposition, MatchesCountingOracle) {
  std::mt19937_64 rng(4);
  std::string s;
  const char sym[] = {'H', 'E', 'C'};
  std::uniform_int_distribution<int> pick(0, 2);
  for (int i = 0; i < 100; ++i) s += sym[pick(rng)];
  const auto c = ss_composition(s);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(c[k], double(std::count(s.begin(), s.end(), sym[k])) / 100.0);
}

TEST(SsComposition, SumsToOneOnSmallLengths) {
  // Counts over L are exact multiples of 1/L; the sum numerator must be L.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pick(0, 2);
  for (std::size_t L = 1; L <= 16; ++L) {
    std::vector<Motif> ss;
    for (std::size_t i = 0; i < L; ++i) ss.push_back(static_cast<Motif>(pick(rng)));
    const auto c = ss_composition(ss);
    long numer = 0;
    for (double v : c) numer += std::lround(v * double(L));
    EXPECT_EQ(numer, long(L));
    EXPECT_NEAR(c[0] + c[1] + c[2], 1.0, 1e-15);
  }
}

TEST(SsComposition, UnknownSymbolReportsPosition) {
  try {
    ss_composition("HHXC");
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("position 3"), std::string::npos) << e.what();
  }
}

TEST(AsaComposition, Examples) {
  const std::vector<double> c(7, 4.25), two{0.0, 10.0};
  EXPECT_EQ(asa_composition(c), 4.25);
  EXPECT_EQ(asa_composition(two), 5.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 200);
  std::vector<double> r(50);
  for (auto& v : r) v = u(rng);
  double s = 0;
  for (double v : r) s += v;
  EXPECT_NEAR(asa_composition(r), s / 50.0, 1e-12);
}

TEST(AngleMatrix, ZeroAngles) {
  const auto t = angle_matrix(Matrix(3, 4));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(t.values()(i, k), k % 2 ? 1.0 : 0.0);
}

TEST(AngleMatrix, RightAnglePhi) {
  Matrix deg(1, 4);
  deg(0, 0) = 90.0;
  const auto t = angle_matrix(deg);
  const auto& v = t.values();
  EXPECT_NEAR(v(0, 0), 1.0, 1e-15);
  EXPECT_LE(std::abs(v(0, 1)), 1e-9);
  EXPECT_EQ(v(0, 2), 0.0);
  EXPECT_EQ(v(0, 3), 1.0);
}

TEST(AngleMatrix, PythagoreanIdentityAndRange) {
  std::mt19937_64 rng(6);
  const auto t = angle_matrix(testkit::random_matrix(40, 4, -720, 720, rng));
  const auto& v = t.values();
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t a = 0; a < 4; ++a) {
      EXPECT_NEAR(v(i, 2 * a) * v(i, 2 * a) + v(i, 2 * a + 1) * v(i, 2 * a + 1), 1.0, 1e-9);
      EXPECT_LE(std::abs(v(i, 2 * a)), 1.0);
      EXPECT_LE(std::abs(v(i, 2 * a + 1)), 1.0);
    }
}

TEST(TaComposition, Examples) {
  const auto z = ta_composition(angle_matrix(Matrix(5, 4)));
  const std::vector<double> alt{0, 1, 0, 1, 0, 1, 0, 1};
  EXPECT_EQ(z, alt);

  std::mt19937_64 rng(2);
  const auto one = testkit::random_matrix(1, 4, -180, 180, rng);
  const auto t1 = angle_matrix(one);
  const auto c1 = ta_composition(t1);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(c1[k], t1.values()(0, k));

  const auto deg = testkit::random_matrix(20, 4, -180, 180, rng);
  expect_near_all(ta_composition(angle_matrix(deg)), oracle::column_means(oracle::trig_rows(grid(deg))), 1e-12);
}

TEST(TaBigram, Examples) {
  for (double v : bigram(Matrix(4, 8))) EXPECT_EQ(v, 0.0);
  const auto b = ta_bigram(angle_matrix(Matrix(3, 4)));
  ASSERT_EQ(b.size(), 64u);
  EXPECT_NEAR(b[1 * 8 + 1], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(b[0], 0.0);

  std::mt19937_64 rng(12);
  const auto deg = testkit::random_matrix(6, 4, -180, 180, rng);
  expect_near_all(ta_bigram(angle_matrix(deg)), oracle::bigram(oracle::trig_rows(grid(deg))), 1e-12);
  EXPECT_THROW(ta_bigram(angle_matrix(Matrix(1, 4))), DegenerateInputError);
}

TEST(TaFeatures, InvariantUnderFullTurns) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> cell(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto deg = testkit::random_matrix(7, 4, -180, 180, rng);
    auto shifted = deg;
    for (int s = 0; s < 5; ++s) shifted(std::size_t(cell(rng)), std::size_t(cell(rng))) += 360.0;
    expect_near_all(ta_composition(angle_matrix(shifted)), ta_composition(angle_matrix(deg)), 1e-9);
    expect_near_all(ta_bigram(angle_matrix(shifted)), ta_bigram(angle_matrix(deg)), 1e-9);
  }
}

TEST(SpBigram, Examples) {
  const auto b = sp_bigram(rows_of(4, {1, 0, 0}));
  ASSERT_EQ(b.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(b[i], i == 0 ? 0.75 : 0.0);
  for (double v : sp_bigram(Matrix(3, 3))) EXPECT_EQ(v, 0.0);
  std::mt19937_64 rng(13);
  const auto p = testkit::random_matrix(5, 3, 0, 1, rng);
  expect_near_all(sp_bigram(p), oracle::bigram(grid(p)), 1e-12);
  EXPECT_THROW(sp_bigram(Matrix(1, 3)), DegenerateInputError);
}

TEST(TaAutocovariance, Examples) {
  const auto a = autocovariance(Matrix(5, 8, 1.0), 2);
  ASSERT_EQ(a.size(), 16u);
  EXPECT_NEAR(a[8 + 1], 3.0 / 5.0, 1e-15);  // lag 2, any column

  const auto z = ta_autocovariance(angle_matrix(Matrix(5, 4)), 2);
  EXPECT_NEAR(z[8 + 1], 3.0 / 5.0, 1e-15);  // cos phi column is constant 1
  EXPECT_EQ(z[8], 0.0);

  for (double v : autocovariance(Matrix(12, 8), 10)) EXPECT_EQ(v, 0.0);

  std::mt19937_64 rng(14);
  const auto deg = testkit::random_matrix(15, 4, -180, 180, rng);
  const auto got = ta_autocovariance(angle_matrix(deg), 10);
  EXPECT_EQ(got.size(), 80u);
  expect_near_all(got, oracle::autocovariance(oracle::trig_rows(grid(deg)), 10), 1e-12);
}

TEST(TaAutocovariance, RejectsShortProfilesNamingLAndDf) {
  try {
    ta_autocovariance(angle_matrix(Matrix(5, 4)), 10);
    FAIL() << "expected DegenerateInputError";
  } catch (const DegenerateInputError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("L=5"), std::string::npos) << what;
    EXPECT_NE(what.find("DF=10"), std::string::npos) << what;
  }
  EXPECT_THROW(ta_autocovariance(angle_matrix(Matrix(10, 4)), 10), DegenerateInputError);
  EXPECT_NO_THROW(ta_autocovariance(angle_matrix(Matrix(11, 4)), 10));
}

TEST(SpAutocovariance, Examples) {
  const auto a = sp_autocovariance(rows_of(12, {1, 0, 0}), 10);
  ASSERT_EQ(a.size(), 30u);
  EXPECT_NEAR(a[9 * 3 + 0], 2.0 / 12.0, 1e-15);
  for (double v : sp_autocovariance(Matrix(12, 3), 10)) EXPECT_EQ(v, 0.0);
  std::mt19937_64 rng(15);
  const auto p = testkit::random_matrix(20, 3, 0, 1, rng);
  expect_near_all(sp_autocovariance(p, 10), oracle::autocovariance(grid(p), 10), 1e-12);
  EXPECT_THROW(sp_autocovariance(Matrix(10, 3), 10), DegenerateInputError);
}

TEST(FeatureOracles, RandomSmallProfiles) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(2, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto L = len(rng);
    const auto df = static_cast<int>(L - 1);
    const auto pssm = normalize_pssm(testkit::random_matrix(L, 20, -10, 10, rng));
    const auto deg = testkit::random_matrix(L, 4, -180, 180, rng);
    const auto probs = testkit::random_matrix(L, 3, 0, 1, rng);
    const auto t = angle_matrix(deg);
    const auto trig = oracle::trig_rows(grid(deg));
    expect_near_all(pssm_bigram(pssm), oracle::bigram(grid(pssm)), 1e-12);
    expect_near_all(ta_composition(t), oracle::column_means(trig), 1e-12);
    expect_near_all(ta_bigram(t), oracle::bigram(trig), 1e-12);
    expect_near_all(sp_bigram(probs), oracle::bigram(grid(probs)), 1e-12);
    expect_near_all(ta_autocovariance(t, df), oracle::autocovariance(trig, std::size_t(df)), 1e-12);
    expect_near_all(sp_autocovariance(probs, df), oracle::autocovariance(grid(probs), std::size_t(df)), 1e-12);
  }
}

TEST(FeatureOracles, NonnegativeInputsGiveNonnegativeOutputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = testkit::random_matrix(9, 5, 0, 3, rng);
    for (double v : bigram(m)) EXPECT_GE(v, 0.0);
    for (double v : autocovariance(m, 8)) EXPECT_GE(v, 0.0);
  }
}

TEST(FeatureGroups, WidthsMatchLayout) {
  EXPECT_EQ(group_width('A', 10), 1281u);
  EXPECT_EQ(group_width('B', 10), 12u);
  EXPECT_EQ(group_width('C', 10), 110u);
  EXPECT_EQ(group_width('C', 3), 33u);
  EXPECT_EQ(group_width('D', 10), 73u);
}

TEST(FeatureGroups, ParseCanonicalizes) {
  EXPECT_EQ(parse_groups("dba"), "ABD");
  EXPECT_EQ(parse_groups("A,B,C"), "ABC");
  EXPECT_THROW(parse_groups("AE"), InvalidArgument);
  EXPECT_THROW(parse_groups(""), InvalidArgument);
}

TEST(AssembleFeatures, WidthsPerGroupCombination) {
  const auto pssm = pssm_of_length(30, 1);
  const auto sp = profile_of_length(30, 2);
  Fingerprint fp;
  fp.set(3);
  const std::pair<const char*, std::size_t> cases[] = {{"A", 1281}, {"AB", 1293}, {"ABC", 1403}, {"ABCD", 1476}};
  for (const auto& [groups, width] : cases) {
    const auto f = assemble_features(fp, pssm, sp, {groups, 10});
    EXPECT_EQ(f.values.size(), width) << groups;
    EXPECT_EQ(total_width(f.spans), width) << groups;
  }
  const auto ab = assemble_features(fp, pssm, sp, {"AB", 10});
  EXPECT_EQ(ab.spans.at('B'), (IndexRange{1281, 1293}));
  EXPECT_EQ(ab.values[3], 1.0);
  EXPECT_EQ(ab.values[4], 0.0);
}

TEST(AssembleFeatures, SlicesReproduceEachGroupBitForBit) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pssm = pssm_of_length(14 + seed, seed);
    const auto sp = profile_of_length(14 + seed, seed + 100);
    Fingerprint fp;
    for (std::size_t i = 0; i < kFingerprintBits; i += 7 + seed) fp.set(i);
    const auto f = assemble_features(fp, pssm, sp, {"ABCD", 10});

    std::vector<double> a;
    for (std::size_t i = 0; i < kFingerprintBits; ++i) a.push_back(fp[i]);
    const auto bg = pssm_bigram(normalize_pssm(pssm.raw));
    a.insert(a.end(), bg.begin(), bg.end());

    const auto t = angle_matrix(sp.angles);
    std::vector<double> b;
    const auto ss = ss_composition(sp.ss);
    b.insert(b.end(), ss.begin(), ss.end());
    b.push_back(asa_composition(sp.asa));
    const auto tc = ta_composition(t);
    b.insert(b.end(), tc.begin(), tc.end());

    auto c = ta_autocovariance(t, 10);
    const auto sc = sp_autocovariance(sp.probs, 10);
    c.insert(c.end(), sc.begin(), sc.end());

    auto d = ta_bigram(t);
    const auto sb = sp_bigram(sp.probs);
    d.insert(d.end(), sb.begin(), sb.end());

    const std::map<char, std::vector<double>> expected{{'A', a}, {'B', b}, {'C', c}, {'D', d}};
    for (const auto& [g, r] : f.spans) {
      const std::vector<double> slice(f.values.begin() + std::ptrdiff_t(r.begin), f.values.begin() + std::ptrdiff_t(r.end));
      EXPECT_EQ(slice, expected.at(g)) << g;
    }
  }
}

TEST(AssembleFeatures, ShortProfileRejectedWhenAutocovarianceActive) {
  const auto pssm = pssm_of_length(5, 1);
  const auto sp = profile_of_length(5, 2);
  EXPECT_THROW(assemble_features(Fingerprint{}, pssm, sp, {"ABC", 10}), DegenerateInputError);
  EXPECT_EQ(assemble_features(Fingerprint{}, pssm, sp, {"ABD", 10}).values.size(), 1281u + 12u + 73u);
}

TEST(AssembleFeatures, GroupSpansAreContiguous) {
  const auto spans = group_spans({"ABCD", 4});
  EXPECT_EQ(spans.at('A'), (IndexRange{0, 1281}));
  EXPECT_EQ(spans.at('B'), (IndexRange{1281, 1293}));
  EXPECT_EQ(spans.at('C'), (IndexRange{1293, 1337}));
  EXPECT_EQ(spans.at('D'), (IndexRange{1337, 1410}));
}
