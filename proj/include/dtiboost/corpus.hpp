#pragma once

// Input formats and the labeled drug-target pair dataset.
//
// Interaction lists, PSI-BLAST ASCII profiles, SPIDER2 .spd files and
// precomputed PubChem fingerprint tables are parsed into immutable value
// types. build_dataset() expands an interaction graph into every
// (drug, target) pair, labeling known edges positive.

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtiboost/detail/text.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/matrix.hpp"

namespace dtiboost {

enum class Label : std::int8_t { negative = -1, positive = 1 };

constexpr int sign(Label y) noexcept { return static_cast<int>(y); }
constexpr Label opposite(Label y) noexcept {
  return y == Label::positive ? Label::negative : Label::positive;
}

struct DrugTargetPair {
  std::string drug;
  std::string target;

  friend auto operator<=>(const DrugTargetPair&, const DrugTargetPair&) = default;
};

/// Bipartite graph of known interactions. Drugs and targets are kept sorted.
class InteractionGraph {
 public:
  void add_drug(const std::string& id) {
    if (targets_.contains(id)) throw InvalidArgument("id '" + id + "' is already a target");
    drugs_.insert(id);
  }

  void add_target(const std::string& id) {
    if (drugs_.contains(id)) throw InvalidArgument("id '" + id + "' is already a drug");
    targets_.insert(id);
  }

  /// Returns false when the edge was already present.
  bool add_edge(const std::string& drug, const std::string& target) {
    add_drug(drug);
    add_target(target);
    return edges_.insert({drug, target}).second;
  }

  bool has_edge(const std::string& drug, const std::string& target) const {
    return edges_.contains({drug, target});
  }

  const std::set<std::string>& drugs() const noexcept { return drugs_; }
  const std::set<std::string>& targets() const noexcept { return targets_; }
  const std::set<DrugTargetPair>& edges() const noexcept { return edges_; }

  friend bool operator==(const InteractionGraph&, const InteractionGraph&) = default;

 private:
  std::set<std::string> drugs_;
  std::set<std::string> targets_;
  std::set<DrugTargetPair> edges_;
};

/// Parses `<drug>\t<target>` lines. `#` starts a comment; `#drug:<id>` and
/// `#target:<id>` declare vertices that may have no edges. Duplicate edges are
/// dropped and reported through `warnings` when given.
inline InteractionGraph parse_interactions(std::istream& in,
                                           std::vector<std::string>* warnings = nullptr) {
  InteractionGraph graph;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::chomp(raw);
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      auto decl = [&](std::string_view prefix) -> std::string_view {
        if (trimmed.substr(0, prefix.size()) != prefix) return {};
        return detail::trim(trimmed.substr(prefix.size()));
      };
      try {
        if (auto id = decl("#drug:"); !id.empty()) graph.add_drug(std::string(id));
        else if (auto id2 = decl("#target:"); !id2.empty()) graph.add_target(std::string(id2));
      } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line_no);
      }
      continue;
    }
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2)
      throw ParseError("expected 2 tab-separated fields, found " + std::to_string(fields.size()),
                       line_no);
    const auto drug = detail::trim(fields[0]);
    const auto target = detail::trim(fields[1]);
    if (drug.empty() || target.empty()) throw ParseError("empty identifier", line_no);
    try {
      if (!graph.add_edge(std::string(drug), std::string(target)) && warnings)
        warnings->push_back("line " + std::to_string(line_no) + ": duplicate edge " +
                            std::string(drug) + "\t" + std::string(target));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return graph;
}

/// Writes a graph in the format read by parse_interactions, declaring every
/// vertex so isolated ones survive a round trip.
inline void serialize_interactions(const InteractionGraph& graph, std::ostream& out) {
  for (const auto& d : graph.drugs()) out << "#drug:" << d << '\n';
  for (const auto& t : graph.targets()) out << "#target:" << t << '\n';
  for (const auto& e : graph.edges()) out << e.drug << '\t' << e.target << '\n';
}

struct PssmProfile {
  std::string target_id;
  Matrix raw;         // L x 20 log-odds
  Matrix normalized;  // L x 20 in (0,1); empty until features::normalize_pssm runs

  std::size_t length() const noexcept { return raw.rows(); }
};

inline constexpr std::size_t kAminoAcids = 20;

/// Reads a PSI-BLAST ASCII profile. A residue row starts with a position
/// number and a one-letter residue; its first 20 numbers are the log-odds
/// scores; anything after them (observed percentages, information) is ignored.
inline PssmProfile parse_pssm(std::istream& in, std::string target_id = {}) {
  PssmProfile profile;
  profile.target_id = std::move(target_id);
  std::string raw;
  std::size_t line_no = 0;
  std::vector<double> row(kAminoAcids);
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = detail::tokenize(raw);
    if (tokens.size() < 2) continue;
    const auto pos = detail::parse_int(tokens[0]);
    const bool residue = tokens[1].size() == 1 && std::isalpha(static_cast<unsigned char>(tokens[1][0]));
    if (!pos || *pos < 1 || !residue) continue;

    std::size_t n = 0;
    for (std::size_t i = 2; i < tokens.size() && n < kAminoAcids; ++i) {
      const auto v = detail::parse_double(tokens[i]);
      if (!v) break;
      row[n++] = *v;
    }
    if (n < kAminoAcids)
      throw ParseError("residue row has " + std::to_string(n) + " numeric columns, expected 20",
                       line_no);
    profile.raw.push_row(row);
  }
  if (profile.raw.rows() == 0) throw ParseError("no residue rows in PSSM");
  return profile;
}

enum class Motif : std::uint8_t { helix, strand, coil };

inline Motif motif_from_char(char c, std::size_t position) {
  switch (c) {
    case 'H': return Motif::helix;
    case 'E': return Motif::strand;
    case 'C': return Motif::coil;
  }
  throw InvalidArgument("unknown secondary-structure symbol '" + std::string(1, c) +
                        "' at position " + std::to_string(position));
}

inline char motif_char(Motif m) {
  constexpr char chars[] = {'H', 'E', 'C'};
  return chars[static_cast<int>(m)];
}

/// Per-residue SPIDER2 predictions.
struct StructProfile {
  std::string target_id;
  std::vector<Motif> ss;
  std::vector<double> asa;  // square angstroms
  Matrix angles;            // L x 4 degrees: phi, psi, theta, tau
  Matrix probs;             // L x 3: P(C), P(E), P(H)

  std::size_t length() const noexcept { return ss.size(); }

  friend bool operator==(const StructProfile&, const StructProfile&) = default;
};

namespace detail {

struct SpdColumn {
  const char* name;  // canonical name, used in error messages
  std::vector<std::string_view> aliases;
};

// Headers such as "Theta(i-1=>i+1)" are matched on the part before '('.
inline std::string spd_key(std::string_view header) {
  const auto paren = header.find('(');
  if (paren != std::string_view::npos && paren > 0 && header.substr(0, 2) != "P(" &&
      header.substr(0, 2) != "p(")
    header = header.substr(0, paren);
  return to_lower(header);
}

}  // namespace detail

/// Reads a SPIDER2 .spd file. The `#` header line names the columns; values
/// are located by name so column order does not matter.
inline StructProfile parse_spd(std::istream& in, std::string target_id = {}) {
  enum Col { kIndex, kAa, kSs, kAsa, kPhi, kPsi, kTheta, kTau, kPc, kPe, kPh, kCount };
  const std::vector<detail::SpdColumn> columns = {
      {"SEQ", {"seq", "#", "index", "no", "pos"}},
      {"AA", {"aa", "res", "residue"}},
      {"SS", {"ss"}},
      {"ASA", {"asa"}},
      {"Phi", {"phi"}},
      {"Psi", {"psi"}},
      {"Theta", {"theta"}},
      {"Tau", {"tau"}},
      {"P(C)", {"p(c)", "pc"}},
      {"P(E)", {"p(e)", "pe"}},
      {"P(H)", {"p(h)", "ph"}},
  };

  StructProfile profile;
  profile.target_id = std::move(target_id);
  std::vector<std::string> header;
  std::size_t position[kCount];
  std::string raw;
  std::size_t line_no = 0;
  std::size_t residue = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (header.empty()) {
      if (line.front() != '#') throw ParseError("expected '#' header row naming columns", line_no);
      for (auto tok : detail::tokenize(line.substr(1))) header.emplace_back(tok);
      for (int c = 0; c < kCount; ++c) {
        const auto& aliases = columns[c].aliases;
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
          const auto key = detail::spd_key(h);
          return std::find(aliases.begin(), aliases.end(), key) != aliases.end();
        });
        if (it == header.end()) throw ParseError(std::string("missing column ") + columns[c].name, line_no);
        position[c] = static_cast<std::size_t>(it - header.begin());
      }
      continue;
    }
    if (line.front() == '#') continue;

    ++residue;
    const auto tokens = detail::tokenize(line);
    if (tokens.size() != header.size())
      throw ParseError("row " + std::to_string(residue) + " has " + std::to_string(tokens.size()) +
                           " fields, header names " + std::to_string(header.size()),
                       line_no);
    auto number = [&](Col c) {
      const auto v = detail::parse_double(tokens[position[c]]);
      if (!v)
        throw ParseError("row " + std::to_string(residue) + " column " + columns[c].name +
                             ": non-numeric value '" + std::string(tokens[position[c]]) + "'",
                         line_no);
      return *v;
    };

    const auto ss = tokens[position[kSs]];
    if (ss.size() != 1) throw ParseError("row " + std::to_string(residue) + " column SS: bad motif", line_no);
    try {
      profile.ss.push_back(motif_from_char(ss[0], residue));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
    const double asa = number(kAsa);
    if (asa < 0.0) throw ParseError("row " + std::to_string(residue) + " column ASA: negative value", line_no);
    profile.asa.push_back(asa);
    const double angles[] = {number(kPhi), number(kPsi), number(kTheta), number(kTau)};
    profile.angles.push_row(angles);
    const double probs[] = {number(kPc), number(kPe), number(kPh)};
    for (std::size_t j = 0; j < 3; ++j)
      if (!(probs[j] >= 0.0 && probs[j] <= 1.0))
        throw ParseError("row " + std::to_string(residue) + " column " + columns[kPc + j].name +
                             ": probability outside [0,1]",
                         line_no);
    profile.probs.push_row(probs);
  }
  if (header.empty()) throw ParseError("missing header row");
  if (profile.ss.empty()) throw ParseError("no residue rows in SPD");
  return profile;
}

inline constexpr std::size_t kFingerprintBits = 881;
using Fingerprint = std::bitset<kFingerprintBits>;

/// Precomputed PubChem substructure fingerprints keyed by drug id.
class FingerprintTable {
 public:
  void insert(const std::string& drug, const Fingerprint& bits) {
    if (!entries_.emplace(drug, bits).second)
      throw InvalidArgument("duplicate drug id '" + drug + "' in fingerprint table");
  }

  const Fingerprint* find(const std::string& drug) const {
    auto it = entries_.find(drug);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, Fingerprint>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, Fingerprint> entries_;
};

/// Reads `<drug>\t<881 chars of 0/1>` lines; character i is bit i.
inline FingerprintTable parse_fingerprints(std::istream& in) {
  FingerprintTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::chomp(raw);
    if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2)
      throw ParseError("expected 2 tab-separated fields, found " + std::to_string(fields.size()),
                       line_no);
    const std::string id(detail::trim(fields[0]));
    const auto bits = detail::trim(fields[1]);
    if (bits.size() != kFingerprintBits)
      throw ParseError("drug " + id + ": expected 881 bits, found " + std::to_string(bits.size()),
                       line_no);
    Fingerprint fp;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1')
        throw ParseError("drug " + id + ": bit " + std::to_string(i) + " is not 0/1", line_no);
      fp[i] = bits[i] == '1';
    }
    try {
      table.insert(id, fp);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

/// Half-open column range [begin, end) of one feature group.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t width() const noexcept { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

using GroupSpans = std::map<char, IndexRange>;

inline std::size_t total_width(const GroupSpans& spans) {
  std::size_t w = 0;
  for (const auto& [g, r] : spans) w += r.width();
  return w;
}

/// Labeled drug-target pairs with one feature row each.
struct PairDataset {
  std::vector<DrugTargetPair> pairs;
  std::vector<Label> labels;
  Matrix features;
  GroupSpans group_spans;

  std::size_t size() const noexcept { return pairs.size(); }
  std::size_t dimension() const noexcept { return features.cols(); }

  std::size_t count(Label y) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), y));
  }

  PairDataset subset(std::span<const std::size_t> indices) const {
    PairDataset out;
    out.group_spans = group_spans;
    out.pairs.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (auto i : indices) {
      out.pairs.push_back(pairs.at(i));
      out.labels.push_back(labels.at(i));
    }
    out.features = features.select_rows(indices);
    return out;
  }
};

/// Expands `graph` into all |D|x|T| pairs in row-major (drug, target) order.
/// `drug_features(id)` and `target_features(id)` return a pointer to the id's
/// feature block or nullptr when none is available; a pair's feature row is
/// the drug block followed by the target block.
template <class DrugFeatures, class TargetFeatures>
PairDataset build_dataset(const InteractionGraph& graph, DrugFeatures&& drug_features,
                          TargetFeatures&& target_features, GroupSpans spans = {}) {
  if (graph.drugs().empty()) throw InvalidArgument("interaction graph has no drugs");
  if (graph.targets().empty()) throw InvalidArgument("interaction graph has no targets");

  std::vector<const std::vector<double>*> drug_rows, target_rows;
  for (const auto& d : graph.drugs()) {
    const std::vector<double>* f = drug_features(d);
    if (!f) throw MissingDataError("no features for drug '" + d + "'", d);
    if (!drug_rows.empty() && f->size() != drug_rows.front()->size())
      throw DimensionError("drug '" + d + "' has a feature block of different width");
    drug_rows.push_back(f);
  }
  for (const auto& t : graph.targets()) {
    const std::vector<double>* f = target_features(t);
    if (!f) throw MissingDataError("no features for target '" + t + "'", t);
    if (!target_rows.empty() && f->size() != target_rows.front()->size())
      throw DimensionError("target '" + t + "' has a feature block of different width");
    target_rows.push_back(f);
  }

  const std::size_t width = drug_rows.front()->size() + target_rows.front()->size();
  if (!spans.empty() && total_width(spans) != width)
    throw DimensionError("group spans cover " + std::to_string(total_width(spans)) +
                         " columns, feature rows have " + std::to_string(width));

  PairDataset ds;
  ds.group_spans = std::move(spans);
  const std::size_t n = graph.drugs().size() * graph.targets().size();
  ds.pairs.reserve(n);
  ds.labels.reserve(n);
  ds.features = Matrix(n, width);
  std::size_t row = 0, di = 0;
  for (const auto& d : graph.drugs()) {
    std::size_t ti = 0;
    for (const auto& t : graph.targets()) {
      ds.pairs.push_back({d, t});
      ds.labels.push_back(graph.has_edge(d, t) ? Label::positive : Label::negative);
      auto out = ds.features.row(row++);
      auto mid = std::copy(drug_rows[di]->begin(), drug_rows[di]->end(), out.begin());
      std::copy(target_rows[ti]->begin(), target_rows[ti]->end(), mid);
      ++ti;
    }
    ++di;
  }
  return ds;
}

}  // namespace dtiboost
