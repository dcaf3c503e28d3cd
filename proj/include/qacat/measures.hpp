#ifndef QACAT_MEASURES_HPP
#define QACAT_MEASURES_HPP

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/pipeline.hpp"

namespace qacat {

inline void require_processed(const ProcessedDocument& d) {
  if (!d.processed) fail(ErrorCode::NotProcessed, "document has not been through the pipeline");
}

inline std::size_t information_content(const ProcessedDocument& d) {
  require_processed(d);
  return d.ortho.atoms.size();
}

inline double information_density(const ProcessedDocument& d) {
  std::size_t ic = information_content(d);
  if (d.document.word_count == 0) fail(ErrorCode::ZeroLength, "document has no words");
  return static_cast<double>(ic) / static_cast<double>(d.document.word_count);
}

/// log2 of the number of heads.
inline double content_entropy(const QACategory& category) {
  ChainReport r = chain_report(category);
  if (r.heads.empty()) fail(ErrorCode::EmptyCategory, "category has no objects");
  return std::log2(static_cast<double>(r.heads.size()));
}

inline double content_entropy(const ProcessedDocument& d) {
  require_processed(d);
  return content_entropy(d.category);
}

inline double content_entropy_density(const ProcessedDocument& d) {
  double ce = content_entropy(d);
  if (d.document.word_count == 0) fail(ErrorCode::ZeroLength, "document has no words");
  return ce / static_cast<double>(d.document.word_count);
}

struct DepthEntropy {
  double e0 = 0;
  double e = 0;
  double e1 = 0;
};

/// From per-atom occurrence counts n_i, with p_i = n_i / N.
inline DepthEntropy depth_entropy_from_counts(const std::vector<std::size_t>& counts) {
  if (counts.empty()) fail(ErrorCode::EmptyDocument, "no atom occurrences");
  double total = 0;
  for (auto n : counts) total += static_cast<double>(n);
  DepthEntropy out;
  for (auto n : counts) {
    double len = -std::log2(static_cast<double>(n) / total);
    if (len == 0) len = 0;  // drop negative zero
    out.e0 += static_cast<double>(n) * len;
    out.e += len;
  }
  double u = static_cast<double>(counts.size());
  out.e1 = counts.size() <= 1 ? 0.0 : u * std::log2(u);
  return out;
}

/// Occurrences are (atom, node) incidences of the trace.
inline DepthEntropy diversity_depth_entropy(const ProcessedDocument& d) {
  require_processed(d);
  std::map<QAId, std::size_t> n;
  for (const auto& [qa, node] : d.ortho.trace.pairs()) ++n[qa];
  std::vector<std::size_t> counts;
  for (const auto& [qa, c] : n) counts.push_back(c);
  return depth_entropy_from_counts(counts);
}

/// Atoms of both documents identified up to equivalence.
struct MergedAtoms {
  std::size_t shared = 0;  // classes holding atoms of both documents
  std::size_t total = 0;   // all classes
};

inline MergedAtoms merge_atoms(const ProcessedDocument& d1, const ProcessedDocument& d2, SemanticOracle& oracle) {
  require_processed(d1);
  require_processed(d2);
  QACategory merged;
  for (const auto& a : d1.ortho.atoms) merged.add_object(a, oracle);
  for (const auto& a : d2.ortho.atoms) merged.add_object(a, oracle);
  std::set<QAId> ids1 = d1.ortho.atom_ids();
  std::set<QAId> ids2 = d2.ortho.atom_ids();
  MergedAtoms out;
  for (const auto& cls : merged.objects()) {
    ++out.total;
    bool in1 = false;
    bool in2 = false;
    for (const auto& m : cls.members) {
      in1 = in1 || ids1.count(m);
      in2 = in2 || ids2.count(m);
    }
    if (in1 && in2) ++out.shared;
  }
  return out;
}

inline std::size_t mutual_information(const ProcessedDocument& d1, const ProcessedDocument& d2,
                                      SemanticOracle& oracle) {
  return merge_atoms(d1, d2, oracle).shared;
}

/// IG(D2; D1) = IC(D2) - MI(D1, D2).
inline std::size_t information_gain(const ProcessedDocument& d2, const ProcessedDocument& d1,
                                    SemanticOracle& oracle) {
  return information_content(d2) - mutual_information(d1, d2, oracle);
}

/// Jaccard distance between the documents' merged atom sets.
inline double document_distance(const ProcessedDocument& d1, const ProcessedDocument& d2, SemanticOracle& oracle) {
  MergedAtoms m = merge_atoms(d1, d2, oracle);
  if (m.total == 0) return 0.0;
  return 1.0 - static_cast<double>(m.shared) / static_cast<double>(m.total);
}

struct MeasureReport {
  std::size_t ic = 0;
  double id = 0;
  std::optional<std::size_t> mi;
  std::optional<std::size_t> ig;
  double ce = 0;
  double ced = 0;
  DepthEntropy entropy;
};

/// Single-document measures; `other` adds MI and IG(D; other).
inline MeasureReport measure(const ProcessedDocument& d, SemanticOracle& oracle,
                             const ProcessedDocument* other = nullptr) {
  MeasureReport r;
  r.ic = information_content(d);
  r.id = information_density(d);
  r.ce = content_entropy(d);
  r.ced = content_entropy_density(d);
  r.entropy = diversity_depth_entropy(d);
  if (other) {
    r.mi = mutual_information(*other, d, oracle);
    r.ig = r.ic - *r.mi;
  }
  return r;
}

inline nlohmann::ordered_json to_json(const MeasureReport& r) {
  nlohmann::ordered_json j;
  j["ic"] = r.ic;
  j["id"] = r.id;
  j["mi"] = r.mi ? nlohmann::ordered_json(*r.mi) : nlohmann::ordered_json(nullptr);
  j["ig"] = r.ig ? nlohmann::ordered_json(*r.ig) : nlohmann::ordered_json(nullptr);
  j["ce"] = r.ce;
  j["ced"] = r.ced;
  j["e0"] = r.entropy.e0;
  j["e"] = r.entropy.e;
  j["e1"] = r.entropy.e1;
  return j;
}

}  // namespace qacat

#endif  // QACAT_MEASURES_HPP
