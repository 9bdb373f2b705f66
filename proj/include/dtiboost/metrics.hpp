#pragma once

// Threshold metrics, ROC and precision-recall curves.
//
// A sample is predicted positive iff its score is strictly greater than the
// threshold. Any ratio with a zero denominator is reported as 0. Curves place
// one point per distinct score (descending), so tied scores move together.
// auPR is the non-interpolated step sum  sum_i (R_i - R_{i-1}) * P_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"

namespace dtiboost {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<Label> labels;

  ScoredSet() = default;
  ScoredSet(std::vector<double> s, std::vector<Label> y) : scores(std::move(s)), labels(std::move(y)) {
    if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
    if (scores.empty()) throw InvalidArgument("scored set is empty");
  }

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
  }
};

struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t p() const noexcept { return tp + fn; }
  std::size_t n() const noexcept { return tn + fp; }
  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const ScoredSet& s, double threshold) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool predicted = s.scores[i] > threshold;
    if (s.labels[i] == Label::positive) (predicted ? c.tp : c.fn)++;
    else (predicted ? c.fp : c.tn)++;
  }
  return c;
}

namespace detail {
inline double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace detail

inline double sensitivity(const ConfusionCounts& c) { return detail::ratio(double(c.tp), double(c.tp + c.fn)); }
inline double specificity(const ConfusionCounts& c) { return detail::ratio(double(c.tn), double(c.tn + c.fp)); }
inline double precision(const ConfusionCounts& c) { return detail::ratio(double(c.tp), double(c.tp + c.fp)); }
inline double fpr(const ConfusionCounts& c) { return detail::ratio(double(c.fp), double(c.fp + c.tn)); }
inline double f1(const ConfusionCounts& c) {
  return detail::ratio(2.0 * double(c.tp), 2.0 * double(c.tp) + double(c.fp) + double(c.fn));
}

/// Matthews correlation coefficient.
inline double mcc(const ConfusionCounts& c) {
  const double tp = double(c.tp), tn = double(c.tn), fp = double(c.fp), fn = double(c.fn);
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  if (den == 0.0) return 0.0;
  return std::clamp((tp * tn - fp * fn) / den, -1.0, 1.0);
}

/// One curve point; `threshold` is the lowest score predicted positive there
/// (+inf for the ROC origin).
struct CurvePoint {
  double threshold;
  double x;
  double y;
};

namespace detail {

struct ThresholdStep {
  double score;
  std::size_t tp;  // cumulative counts with score >= `score`
  std::size_t fp;
};

inline std::vector<ThresholdStep> threshold_steps(const ScoredSet& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });
  std::vector<ThresholdStep> steps;
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double score = s.scores[order[k]];
    for (; k < order.size() && s.scores[order[k]] == score; ++k)
      (s.labels[order[k]] == Label::positive ? tp : fp)++;
    steps.push_back({score, tp, fp});
  }
  return steps;
}

}  // namespace detail

/// (fpr, tpr) points from (0,0) to (1,1).
inline std::vector<CurvePoint> roc_curve(const ScoredSet& s) {
  const std::size_t p = s.positives(), n = s.size() - p;
  if (p == 0 || n == 0) throw InvalidArgument("ROC needs both positive and negative labels");
  std::vector<CurvePoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  for (const auto& st : detail::threshold_steps(s))
    curve.push_back({st.score, double(st.fp) / double(n), double(st.tp) / double(p)});
  return curve;
}

/// Trapezoidal area under the ROC curve.
inline double auroc(const ScoredSet& s) {
  const auto curve = roc_curve(s);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].x - curve[i - 1].x) * (curve[i].y + curve[i - 1].y) / 2.0;
  return area;
}

/// (recall, precision) points, one per distinct score.
inline std::vector<CurvePoint> pr_curve(const ScoredSet& s) {
  const std::size_t p = s.positives();
  if (p == 0) throw InvalidArgument("PR curve needs at least one positive label");
  std::vector<CurvePoint> curve;
  for (const auto& st : detail::threshold_steps(s))
    curve.push_back({st.score, double(st.tp) / double(p), double(st.tp) / double(st.tp + st.fp)});
  return curve;
}

inline double aupr(const ScoredSet& s) {
  double area = 0.0, prev_recall = 0.0;
  for (const auto& pt : pr_curve(s)) {
    area += (pt.x - prev_recall) * pt.y;
    prev_recall = pt.x;
  }
  return area;
}

struct MetricRecord {
  double sensitivity = 0, specificity = 0, precision = 0, fpr = 0, f1 = 0, mcc = 0, auroc = 0, aupr = 0;
  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

inline MetricRecord evaluate_scores(const ScoredSet& s, double threshold) {
  const auto c = confusion(s, threshold);
  return {sensitivity(c), specificity(c), precision(c), fpr(c), f1(c), mcc(c), auroc(s), aupr(s)};
}

inline MetricRecord mean_of(std::span<const MetricRecord> records) {
  MetricRecord m;
  if (records.empty()) return m;
  for (const auto& r : records) {
    m.sensitivity += r.sensitivity;
    m.specificity += r.specificity;
    m.precision += r.precision;
    m.fpr += r.fpr;
    m.f1 += r.f1;
    m.mcc += r.mcc;
    m.auroc += r.auroc;
    m.aupr += r.aupr;
  }
  const double n = double(records.size());
  m.sensitivity /= n;
  m.specificity /= n;
  m.precision /= n;
  m.fpr /= n;
  m.f1 /= n;
  m.mcc /= n;
  m.auroc /= n;
  m.aupr /= n;
  return m;
}

}  // namespace dtiboost
