#pragma once

// Interchange files shared by the pipeline stages.
//
//   feature matrix  TSV, header `<group>:<index>` per column then `label`,
//                   one pair per row, label +1 / -1 in the last column
//   pair list       TSV `<drug>\t<target>`, one line per matrix row
//   report          JSON, per-fold metric records plus means
//   curves          CSV `threshold,x,y`
//   candidates      TSV `rank  drug_id  target_id  probability`

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtiboost/corpus.hpp"
#include "dtiboost/detail/text.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/eval.hpp"
#include "dtiboost/metrics.hpp"

namespace dtiboost {

inline void write_feature_matrix(const PairDataset& ds, std::ostream& out) {
  if (total_width(ds.group_spans) != ds.dimension())
    throw DimensionError("group spans do not cover the feature columns");
  bool first = true;
  for (const auto& [group, range] : ds.group_spans)
    for (std::size_t j = 0; j < range.width(); ++j) {
      out << (first ? "" : "\t") << group << ':' << j;
      first = false;
    }
  out << (first ? "" : "\t") << "label\n";
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    line.clear();
    for (double v : ds.features.row(i)) {
      line += detail::format_double(v);
      line += '\t';
    }
    line += ds.labels[i] == Label::positive ? "1" : "-1";
    line += '\n';
    out << line;
  }
}

/// Reads a feature matrix; `pairs` is left empty (see read_pair_list).
inline PairDataset read_feature_matrix(std::istream& in) {
  PairDataset ds;
  std::string raw;
  if (!std::getline(in, raw)) throw ParseError("empty feature matrix");
  const auto header = detail::split(detail::chomp(raw), '\t');
  if (header.empty() || header.back() != "label") throw ParseError("last header column must be 'label'", 1);
  const std::size_t width = header.size() - 1;
  for (std::size_t c = 0; c < width; ++c) {
    const auto h = header[c];
    const auto colon = h.find(':');
    const auto idx = colon == std::string_view::npos ? std::nullopt : detail::parse_int(h.substr(colon + 1));
    if (colon != 1 || !idx) throw ParseError("bad column name '" + std::string(h) + "'", 1);
    const char g = h[0];
    auto it = ds.group_spans.find(g);
    if (it == ds.group_spans.end()) {
      if (*idx != 0 || (!ds.group_spans.empty() && ds.group_spans.rbegin()->first > g))
        throw ParseError("column '" + std::string(h) + "' out of order", 1);
      ds.group_spans[g] = {c, c + 1};
    } else {
      if (it->second.end != c || static_cast<std::size_t>(*idx) != it->second.width())
        throw ParseError("column '" + std::string(h) + "' out of order", 1);
      ++it->second.end;
    }
  }

  std::vector<double> row(width);
  std::size_t line_no = 1;
  ds.features = Matrix(0, width);
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::chomp(raw);
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != width + 1)
      throw ParseError("expected " + std::to_string(width + 1) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) throw ParseError("non-numeric value in column " + std::string(header[c]), line_no);
      row[c] = *v;
    }
    if (fields[width] == "1" || fields[width] == "+1") ds.labels.push_back(Label::positive);
    else if (fields[width] == "-1") ds.labels.push_back(Label::negative);
    else throw ParseError("label must be 1 or -1", line_no);
    if (width == 0) continue;
    ds.features.push_row(row);
  }
  return ds;
}

inline void write_pair_list(const PairDataset& ds, std::ostream& out) {
  for (const auto& p : ds.pairs) out << p.drug << '\t' << p.target << '\n';
}

inline std::vector<DrugTargetPair> read_pair_list(std::istream& in) {
  std::vector<DrugTargetPair> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::chomp(raw);
    if (line.empty()) continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 2) throw ParseError("expected <drug>\\t<target>", line_no);
    out.push_back({std::string(f[0]), std::string(f[1])});
  }
  return out;
}

inline nlohmann::json to_json(const MetricRecord& m) {
  return {{"sensitivity", m.sensitivity}, {"specificity", m.specificity}, {"precision", m.precision},
          {"fpr", m.fpr}, {"f1", m.f1}, {"mcc", m.mcc}, {"auroc", m.auroc}, {"aupr", m.aupr}};
}

inline MetricRecord metric_record_from_json(const nlohmann::json& j) {
  return {j.at("sensitivity").get<double>(), j.at("specificity").get<double>(), j.at("precision").get<double>(),
          j.at("fpr").get<double>(), j.at("f1").get<double>(), j.at("mcc").get<double>(),
          j.at("auroc").get<double>(), j.at("aupr").get<double>()};
}

inline nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.per_fold)
    folds.push_back({{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"train_size", f.train_size},
                     {"balanced_size", f.balanced_size},
                     {"test_size", f.test_indices.size()},
                     {"boosting_rounds", f.boosting_rounds},
                     {"confusion", {{"tp", f.counts.tp}, {"tn", f.counts.tn}, {"fp", f.counts.fp}, {"fn", f.counts.fn}}},
                     {"metrics", to_json(f.metrics)}});
  nlohmann::json repeats = nlohmann::json::array();
  for (const auto& m : report.repeat_means) repeats.push_back(to_json(m));
  return {{"per_fold", std::move(folds)}, {"repeat_means", std::move(repeats)}, {"mean", to_json(report.mean)}};
}

inline void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
  out << "threshold,x,y\n";
  for (const auto& p : curve)
    out << (std::isinf(p.threshold) ? std::string("inf") : detail::format_double(p.threshold)) << ','
        << detail::format_double(p.x) << ',' << detail::format_double(p.y) << '\n';
}

inline void write_candidates(const std::vector<Candidate>& candidates, std::ostream& out) {
  out << "rank\tdrug_id\ttarget_id\tprobability\n";
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out << i + 1 << '\t' << candidates[i].drug << '\t' << candidates[i].target << '\t'
        << detail::format_double(candidates[i].probability) << '\n';
}

}  // namespace dtiboost
