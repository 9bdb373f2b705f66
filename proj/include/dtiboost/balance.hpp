#pragma once

// Majority-class undersampling: uniform random (RUS) and cluster-based (CUS).
//
// CUS clusters the majority class with k-means and keeps at most h randomly
// chosen samples from every cluster; the minority class is kept whole.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/matrix.hpp"

namespace dtiboost {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Independent seed for a named sub-stream of `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return detail::splitmix64(seed ^ detail::splitmix64(stream + 0x5DEECE66DULL));
}

/// Draws `count` distinct elements of `pool` uniformly; result keeps pool order.
template <class Rng>
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t count,
                                                    Rng& rng) {
  count = std::min(count, pool.size());
  std::vector<std::size_t> slot(pool.size());
  std::iota(slot.begin(), slot.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, slot.size() - 1);
    std::swap(slot[i], slot[pick(rng)]);
  }
  slot.resize(count);
  std::sort(slot.begin(), slot.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (auto s : slot) out.push_back(pool[s]);
  return out;
}

enum class BalanceMethod { none, random, clustered };

struct BalanceConfig {
  BalanceMethod method = BalanceMethod::clustered;
  int k = 23;
  int h = 0;                  // per-cluster retention; 0 selects ceil(minority / k)
  double target_ratio = 1.0;  // majority:minority after RUS
  std::uint64_t seed = 0;
};

inline void validate(const BalanceConfig& c) {
  if (c.k < 1) throw InvalidArgument("k must be >= 1");
  if (c.h < 0) throw InvalidArgument("h must be >= 1 (or 0 for automatic)");
  if (!(c.target_ratio >= 1.0)) throw InvalidArgument("target ratio must be >= 1");
}

struct ClassSplit {
  Label majority_label;
  std::vector<std::size_t> majority;  // ascending dataset indices
  std::vector<std::size_t> minority;
};

/// Ties make the negative class the majority.
inline ClassSplit split_indices(std::span<const Label> labels) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == Label::positive ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw InvalidArgument("dataset must contain both classes");
  if (pos.size() > neg.size()) return {Label::positive, std::move(pos), std::move(neg)};
  return {Label::negative, std::move(neg), std::move(pos)};
}

inline std::pair<PairDataset, PairDataset> split_major_minor(const PairDataset& dataset) {
  const auto s = split_indices(dataset.labels);
  return {dataset.subset(s.majority), dataset.subset(s.minority)};
}

struct Clustering {
  std::vector<std::size_t> assignments;
  Matrix centroids;
  int iterations = 0;
  std::vector<double> distortion;  // within-cluster sum of squares after each update
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double within_cluster_ss(const Matrix& points, const Clustering& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    s += squared_distance(points.row(i), c.centroids.row(c.assignments[i]));
  return s;
}

inline void recompute_centroids(const Matrix& points, Clustering& c, std::vector<std::size_t>& sizes) {
  const std::size_t k = c.centroids.rows();
  Matrix sums(k, points.cols());
  sizes.assign(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto dst = sums.row(c.assignments[i]);
    auto src = points.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    ++sizes[c.assignments[i]];
  }
  for (std::size_t q = 0; q < k; ++q) {
    if (sizes[q] == 0) continue;
    auto dst = c.centroids.row(q);
    auto src = sums.row(q);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] / static_cast<double>(sizes[q]);
  }
}

}  // namespace detail

/// Lloyd's k-means with Euclidean distance. Starts from k distinct random
/// points; an emptied cluster takes over the point farthest from its own
/// centroid. Stops when assignments stop changing or after `max_iters`.
inline Clustering kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters = 300) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const std::size_t n = points.rows(), kk = static_cast<std::size_t>(k);
  if (n < kk)
    throw InvalidArgument("k-means needs at least k points (k=" + std::to_string(k) +
                          ", points=" + std::to_string(n) + ")");

  std::mt19937_64 rng(seed);
  // Initial centroids in draw order, not index order.
  std::vector<std::size_t> init(n);
  std::iota(init.begin(), init.end(), std::size_t{0});
  for (std::size_t i = 0; i < kk; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(init[i], init[pick(rng)]);
  }

  Clustering c;
  c.centroids = Matrix(kk, points.cols());
  for (std::size_t q = 0; q < kk; ++q) {
    auto src = points.row(init[q]);
    std::copy(src.begin(), src.end(), c.centroids.row(q).begin());
  }
  c.assignments.assign(n, kk);  // sentinel: unassigned

  std::vector<std::size_t> sizes;
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < kk; ++q) {
        const double d = detail::squared_distance(points.row(i), c.centroids.row(q));
        if (d < best_d) {
          best_d = d;
          best = q;
        }
      }
      if (c.assignments[i] != best) {
        c.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    c.iterations = iter + 1;

    detail::recompute_centroids(points, c, sizes);
    for (std::size_t q = 0; q < kk; ++q) {
      if (sizes[q] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[c.assignments[i]] < 2) continue;
        const double d = detail::squared_distance(points.row(i), c.centroids.row(c.assignments[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;  // every point already alone in its cluster
      --sizes[c.assignments[far]];
      c.assignments[far] = q;
      sizes[q] = 1;
      auto src = points.row(far);
      std::copy(src.begin(), src.end(), c.centroids.row(q).begin());
    }
    detail::recompute_centroids(points, c, sizes);
    c.distortion.push_back(detail::within_cluster_ss(points, c));
  }
  return c;
}

/// Keeps the minority plus min(target_ratio * minority, majority) random
/// majority samples. Returned indices are ascending.
inline std::vector<std::size_t> random_undersample_indices(const PairDataset& dataset,
                                                           const BalanceConfig& config) {
  validate(config);
  auto split = split_indices(dataset.labels);
  const auto want = static_cast<std::size_t>(
      std::floor(config.target_ratio * static_cast<double>(split.minority.size())));
  std::mt19937_64 rng(config.seed);
  auto kept = sample_without_replacement(std::move(split.majority), want, rng);
  kept.insert(kept.end(), split.minority.begin(), split.minority.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline std::size_t effective_h(const BalanceConfig& config, std::size_t minority) {
  if (config.h > 0) return static_cast<std::size_t>(config.h);
  const auto k = static_cast<std::size_t>(config.k);
  return std::max<std::size_t>(1, (minority + k - 1) / k);
}

inline std::vector<std::size_t> cluster_undersample_indices(const PairDataset& dataset,
                                                            const BalanceConfig& config) {
  validate(config);
  const auto split = split_indices(dataset.labels);
  if (split.majority.size() < static_cast<std::size_t>(config.k))
    throw InvalidArgument("majority class has " + std::to_string(split.majority.size()) +
                          " samples, fewer than k=" + std::to_string(config.k));

  const auto clustering = kmeans(dataset.features.select_rows(split.majority), config.k,
                                 derive_seed(config.seed, 1));
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(config.k));
  for (std::size_t i = 0; i < split.majority.size(); ++i)
    members[clustering.assignments[i]].push_back(split.majority[i]);

  const auto h = effective_h(config, split.minority.size());
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> kept;
  for (auto& cluster : members) {
    auto reduced = sample_without_replacement(std::move(cluster), h, rng);
    kept.insert(kept.end(), reduced.begin(), reduced.end());
  }
  kept.insert(kept.end(), split.minority.begin(), split.minority.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline PairDataset random_undersample(const PairDataset& dataset, const BalanceConfig& config) {
  return dataset.subset(random_undersample_indices(dataset, config));
}

inline PairDataset cluster_undersample(const PairDataset& dataset, const BalanceConfig& config) {
  return dataset.subset(cluster_undersample_indices(dataset, config));
}

/// Indices retained by the configured method; all indices for `none`.
inline std::vector<std::size_t> balance_indices(const PairDataset& dataset, const BalanceConfig& config) {
  switch (config.method) {
    case BalanceMethod::random: return random_undersample_indices(dataset, config);
    case BalanceMethod::clustered: return cluster_undersample_indices(dataset, config);
    case BalanceMethod::none: break;
  }
  std::vector<std::size_t> all(dataset.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

inline PairDataset balance(const PairDataset& dataset, const BalanceConfig& config) {
  return dataset.subset(balance_indices(dataset, config));
}

inline const char* to_string(BalanceMethod m) {
  switch (m) {
    case BalanceMethod::none: return "none";
    case BalanceMethod::random: return "random";
    case BalanceMethod::clustered: return "clustered";
  }
  return "?";
}

inline BalanceMethod parse_balance_method(const std::string& s) {
  if (s == "none") return BalanceMethod::none;
  if (s == "random" || s == "rus") return BalanceMethod::random;
  if (s == "clustered" || s == "cus") return BalanceMethod::clustered;
  throw InvalidArgument("unknown balancing method '" + s + "' (none, random, clustered)");
}

}  // namespace dtiboost
