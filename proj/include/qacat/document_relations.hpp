#ifndef QACAT_DOCUMENT_RELATIONS_HPP
#define QACAT_DOCUMENT_RELATIONS_HPP

#include <set>
#include <string>
#include <vector>

#include "qacat/pipeline.hpp"
#include "qacat/relations.hpp"

namespace qacat {

inline std::vector<std::string> hex_labels(const std::vector<QAPair>& qas) {
  std::vector<std::string> out;
  for (const auto& q : qas) out.push_back(q.id.hex);
  return out;
}

/// Trace as a matrix: columns are atoms, rows are DAG nodes in document order.
inline Relation trace_matrix(const ProcessedDocument& d) {
  std::vector<std::string> rows;
  for (const auto& n : d.dag.nodes()) rows.push_back(n.id);
  Relation r(rows, hex_labels(d.ortho.atoms));
  for (std::size_t i = 0; i < d.dag.size(); ++i) {
    for (std::size_t j = 0; j < d.ortho.atoms.size(); ++j) {
      if (d.ortho.trace.relates(d.ortho.atoms[j].id, rows[i])) r.set(i, j);
    }
  }
  return r;
}

/// Relation from `source` QAs to the `target` QAs that answer them
/// consistently (an inclusion when the source is contained in the target).
inline Relation answer_relation(const std::vector<QAPair>& source, const std::vector<QAPair>& target,
                                SemanticOracle& oracle) {
  Relation r(hex_labels(target), hex_labels(source));
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < source.size(); ++j) {
      if (source[j].id == target[i].id || oracle.answers(target[i].core, source[j]).consistent) r.set(i, j);
    }
  }
  return r;
}

/// Inclusion of a summary's atoms into the document's atoms.
inline Relation summary_inclusion(const ProcessedDocument& d, const std::set<QAId>& summary_atoms) {
  std::vector<QAPair> kept;
  for (const auto& a : d.ortho.atoms) {
    if (summary_atoms.count(a.id)) kept.push_back(a);
  }
  Relation r(hex_labels(d.ortho.atoms), hex_labels(kept));
  for (std::size_t i = 0; i < d.ortho.atoms.size(); ++i) {
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (d.ortho.atoms[i].id == kept[j].id) r.set(i, j);
    }
  }
  return r;
}

}  // namespace qacat

#endif  // QACAT_DOCUMENT_RELATIONS_HPP
