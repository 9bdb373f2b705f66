#pragma once

// Drug and target feature groups.
//
//   A  fingerprint (881) + PSSM bigram (400)                  1281
//   B  SS composition (3) + ASA composition (1) + TA comp (8)   12
//   C  TA auto-covariance (8*DF) + SP auto-covariance (3*DF)   11*DF
//   D  TA bigram (64) + SP bigram (9)                            73
//
// Bigrams are flattened row-major (first column index outer); auto-covariances
// lag-major (all columns for lag 1, then lag 2, ...). Every bigram and
// auto-covariance divides by the full profile length L.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/matrix.hpp"

namespace dtiboost {

/// Logistic squashing of raw log-odds into the open interval (0,1).
inline Matrix normalize_pssm(const Matrix& raw) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.rows(); ++i)
    for (std::size_t j = 0; j < raw.cols(); ++j)
      out(i, j) = std::clamp(1.0 / (1.0 + std::exp(-raw(i, j))), lo, hi);
  return out;
}

inline void normalize_pssm(PssmProfile& profile) { profile.normalized = normalize_pssm(profile.raw); }

/// (1/L) * sum_i M(i,k) * M(i+1,l) for every column pair (k,l).
inline std::vector<double> bigram(const Matrix& m) {
  const std::size_t L = m.rows(), n = m.cols();
  if (L < 2) throw DegenerateInputError("bigram needs at least 2 residues, got " + std::to_string(L));
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i + 1 < L; ++i) {
    const auto cur = m.row(i);
    const auto next = m.row(i + 1);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) out[k * n + l] += cur[k] * next[l];
  }
  for (auto& v : out) v /= static_cast<double>(L);
  return out;
}

/// (1/L) * sum_i M(i,j) * M(i+lag,j) for lag = 1..distance_factor, lag-major.
inline std::vector<double> autocovariance(const Matrix& m, int distance_factor) {
  const std::size_t L = m.rows(), n = m.cols();
  if (distance_factor < 1) throw InvalidArgument("distance factor must be >= 1");
  const auto df = static_cast<std::size_t>(distance_factor);
  if (L <= df)
    throw DegenerateInputError("auto-covariance needs length L > DF, got L=" + std::to_string(L) +
                               " DF=" + std::to_string(df));
  std::vector<double> out(df * n, 0.0);
  for (std::size_t lag = 1; lag <= df; ++lag) {
    double* acc = out.data() + (lag - 1) * n;
    for (std::size_t i = 0; i + lag < L; ++i) {
      const auto a = m.row(i);
      const auto b = m.row(i + lag);
      for (std::size_t j = 0; j < n; ++j) acc[j] += a[j] * b[j];
    }
    for (std::size_t j = 0; j < n; ++j) acc[j] /= static_cast<double>(L);
  }
  return out;
}

inline std::vector<double> pssm_bigram(const Matrix& normalized) {
  if (normalized.cols() != kAminoAcids) throw DimensionError("PSSM must have 20 columns");
  return bigram(normalized);
}

/// Motif frequencies in (H, E, C) order.
inline std::array<double, 3> ss_composition(std::span<const Motif> ss) {
  if (ss.empty()) throw DegenerateInputError("empty secondary-structure sequence");
  std::array<std::size_t, 3> counts{};
  for (auto m : ss) ++counts[static_cast<std::size_t>(m)];
  const auto L = static_cast<double>(ss.size());
  return {counts[0] / L, counts[1] / L, counts[2] / L};
}

inline std::array<double, 3> ss_composition(std::string_view ss) {
  std::vector<Motif> motifs;
  motifs.reserve(ss.size());
  for (std::size_t i = 0; i < ss.size(); ++i) motifs.push_back(motif_from_char(ss[i], i + 1));
  return ss_composition(motifs);
}

inline double asa_composition(std::span<const double> asa) {
  if (asa.empty()) throw DegenerateInputError("empty ASA vector");
  double sum = 0.0;
  for (double v : asa) sum += v;
  return sum / static_cast<double>(asa.size());
}

/// L x 8 sines and cosines of (phi, psi, theta, tau), sine first per angle.
class AngleMatrix {
 public:
  static constexpr std::size_t kColumns = 8;

  explicit AngleMatrix(const Matrix& degrees) : values_(degrees.rows(), kColumns) {
    if (degrees.cols() != 4) throw DimensionError("angle matrix needs 4 columns (phi, psi, theta, tau)");
    constexpr double to_rad = std::numbers::pi / 180.0;
    for (std::size_t i = 0; i < degrees.rows(); ++i)
      for (std::size_t a = 0; a < 4; ++a) {
        const double r = degrees(i, a) * to_rad;
        values_(i, 2 * a) = std::sin(r);
        values_(i, 2 * a + 1) = std::cos(r);
      }
  }

  const Matrix& values() const& noexcept { return values_; }
  Matrix values() const&& { return values_; }
  std::size_t length() const noexcept { return values_.rows(); }

 private:
  Matrix values_;
};

inline AngleMatrix angle_matrix(const Matrix& degrees) { return AngleMatrix(degrees); }

inline std::vector<double> ta_composition(const AngleMatrix& t) {
  const auto& m = t.values();
  if (m.rows() == 0) throw DegenerateInputError("empty angle matrix");
  std::vector<double> out(AngleMatrix::kColumns, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += m(i, k);
  for (auto& v : out) v /= static_cast<double>(m.rows());
  return out;
}

inline std::vector<double> ta_bigram(const AngleMatrix& t) { return bigram(t.values()); }

inline std::vector<double> sp_bigram(const Matrix& probs) {
  if (probs.cols() != 3) throw DimensionError("structural probabilities need 3 columns");
  return bigram(probs);
}

inline std::vector<double> ta_autocovariance(const AngleMatrix& t, int distance_factor) {
  return autocovariance(t.values(), distance_factor);
}

inline std::vector<double> sp_autocovariance(const Matrix& probs, int distance_factor) {
  if (probs.cols() != 3) throw DimensionError("structural probabilities need 3 columns");
  return autocovariance(probs, distance_factor);
}

/// Which groups to emit and the auto-covariance distance factor.
struct FeatureGroupConfig {
  std::string groups = "ABCD";  // canonical: sorted subset of "ABCD"
  int distance_factor = 10;

  bool has(char g) const { return groups.find(g) != std::string::npos; }

  friend bool operator==(const FeatureGroupConfig&, const FeatureGroupConfig&) = default;
};

/// Validates and canonicalizes a group string such as "a,b" or "DBA".
inline std::string parse_groups(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '+') continue;
    const char g = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (g < 'A' || g > 'D') throw InvalidArgument("unknown feature group '" + std::string(1, c) + "'");
    if (out.find(g) == std::string::npos) out += g;
  }
  if (out.empty()) throw InvalidArgument("no feature groups selected");
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t group_width(char group, int distance_factor) {
  const auto df = static_cast<std::size_t>(distance_factor);
  switch (group) {
    case 'A': return kFingerprintBits + kAminoAcids * kAminoAcids;
    case 'B': return 3 + 1 + AngleMatrix::kColumns;
    case 'C': return AngleMatrix::kColumns * df + 3 * df;
    case 'D': return AngleMatrix::kColumns * AngleMatrix::kColumns + 9;
  }
  throw InvalidArgument("unknown feature group '" + std::string(1, group) + "'");
}

inline void validate(const FeatureGroupConfig& config) {
  if (config.distance_factor < 1) throw InvalidArgument("distance factor must be >= 1");
  if (parse_groups(config.groups) != config.groups)
    throw InvalidArgument("feature groups '" + config.groups + "' are not canonical");
}

inline GroupSpans group_spans(const FeatureGroupConfig& config) {
  validate(config);
  GroupSpans spans;
  std::size_t at = 0;
  for (char g : config.groups) {
    const auto w = group_width(g, config.distance_factor);
    spans[g] = {at, at + w};
    at += w;
  }
  return spans;
}

/// Drug part of a pair row: the fingerprint when group A is active.
inline std::vector<double> drug_block(const Fingerprint& fp, const FeatureGroupConfig& config) {
  std::vector<double> out;
  if (config.has('A')) {
    out.resize(kFingerprintBits);
    for (std::size_t i = 0; i < kFingerprintBits; ++i) out[i] = fp[i] ? 1.0 : 0.0;
  }
  return out;
}

/// Target part of a pair row: everything after the fingerprint.
inline std::vector<double> target_block(const PssmProfile& pssm, const StructProfile& sp,
                                        const FeatureGroupConfig& config) {
  validate(config);
  std::vector<double> out;
  auto append = [&out](const auto& v) { out.insert(out.end(), std::begin(v), std::end(v)); };

  if (config.has('A')) {
    if (pssm.normalized.empty()) append(pssm_bigram(normalize_pssm(pssm.raw)));
    else append(pssm_bigram(pssm.normalized));
  }
  if (config.has('B') || config.has('C') || config.has('D')) {
    const auto angles = angle_matrix(sp.angles);
    if (config.has('B')) {
      append(ss_composition(sp.ss));
      out.push_back(asa_composition(sp.asa));
      append(ta_composition(angles));
    }
    if (config.has('C')) {
      append(ta_autocovariance(angles, config.distance_factor));
      append(sp_autocovariance(sp.probs, config.distance_factor));
    }
    if (config.has('D')) {
      append(ta_bigram(angles));
      append(sp_bigram(sp.probs));
    }
  }
  return out;
}

struct AssembledFeatures {
  std::vector<double> values;
  GroupSpans spans;
};

inline AssembledFeatures assemble_features(const Fingerprint& fp, const PssmProfile& pssm,
                                           const StructProfile& sp, const FeatureGroupConfig& config) {
  AssembledFeatures out{drug_block(fp, config), group_spans(config)};
  const auto target = target_block(pssm, sp, config);
  out.values.insert(out.values.end(), target.begin(), target.end());
  if (out.values.size() != total_width(out.spans))
    throw DimensionError("assembled " + std::to_string(out.values.size()) + " features, expected " +
                         std::to_string(total_width(out.spans)));
  return out;
}

}  // namespace dtiboost
