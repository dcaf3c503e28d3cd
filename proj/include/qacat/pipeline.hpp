#ifndef QACAT_PIPELINE_HPP
#define QACAT_PIPELINE_HPP

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qacat/category.hpp"
#include "qacat/ortho.hpp"
#include "qacat/rhetoric.hpp"

namespace qacat {

struct PipelineOptions {
  std::size_t fanout_limit = 5;
  OrthoOptions ortho;
};

/// All artifacts of one document run through the pipeline.
struct ProcessedDocument {
  Document document;
  AbstractiveDag dag;
  CoreQADag core;
  std::vector<QAPair> population;  // category objects before identification
  TraceRelation population_trace;
  QACategory category;
  OrthoSet ortho;
  bool processed = false;

  /// Atoms tracing to `node`, in atom order.
  std::vector<QAPair> atoms_of(const NodeId& node) const {
    std::vector<QAPair> out;
    for (const auto& a : ortho.atoms) {
      if (ortho.trace.relates(a.id, node)) out.push_back(a);
    }
    return out;
  }

  /// Atom ids grouped by the node they trace to.
  std::set<QAId> atoms_for(const std::set<NodeId>& nodes) const {
    std::set<QAId> out;
    for (const auto& [qa, node] : ortho.trace.pairs()) {
      if (nodes.count(node)) out.insert(qa);
    }
    return out;
  }
};

/// Category population: core QAs, plus in fact-set mode one sub-QA per fact of
/// each core QA (a piece inherits its parent's nodes).
inline void build_population(ProcessedDocument& pd) {
  std::map<QAId, QAPair> uniq;
  for (const auto& n : pd.dag.nodes()) {
    for (const auto& q : pd.core.core_qas.at(n.id)) {
      uniq.emplace(q.id, q);
      pd.population_trace.add(q.id, n.id);
      if (pd.document.mode != OracleMode::fact_set || !q.core.has_facts() || q.core.fact_set().size() < 2) continue;
      for (const auto& f : q.core.fact_set()) {
        QAPair sub = qa_from_facts({f});
        uniq.emplace(sub.id, sub);
        pd.population_trace.add(sub.id, n.id);
      }
    }
  }
  for (auto& [id, q] : uniq) pd.population.push_back(q);
}

/// Objects and morphisms. Fact-set mode tests every pair; llm mode proposes
/// morphisms from each child's QAs to its parents' QAs and keeps the
/// verified ones.
inline void build_category(ProcessedDocument& pd, SemanticOracle& oracle) {
  for (const auto& q : pd.population) pd.category.add_object(q, oracle);
  if (oracle.mode() == OracleMode::fact_set) {
    pd.category.connect_all(oracle);
    return;
  }
  for (const auto& n : pd.dag.nodes()) {
    for (const auto& parent : n.parents) {
      for (const auto& src : pd.core.core_qas.at(n.id)) {
        for (const auto& dst : pd.core.core_qas.at(parent)) pd.category.try_add_morphism(src.id, dst.id, oracle);
      }
    }
  }
}

/// Abstractive DAG, core QAs, category and orthogonal atoms. The trace is
/// verified after each stage that rewrites QAs. A non-converged
/// orthogonalization is returned as is (ortho.converged == false).
inline ProcessedDocument process_document(const SourceDocument& src, SemanticOracle& oracle,
                                          const PipelineOptions& options = {}) {
  if (src.document.mode != oracle.mode()) {
    fail(ErrorCode::ModeMismatch, "document '" + src.document.id + "' is " + std::string(to_string(src.document.mode)) +
                                      " but the oracle is " + std::string(to_string(oracle.mode())));
  }
  ProcessedDocument pd;
  pd.document = src.document;
  pd.dag = build_abstractive_dag(src, oracle, options.fanout_limit);
  TraceRelation core_trace;
  pd.core = to_core_qa_dag(pd.dag, oracle, core_trace);
  std::set<QAId> core_ids;
  for (const auto& q : pd.core.all_qas()) core_ids.insert(q.id);
  core_trace.verify(core_ids, pd.dag.node_ids());

  build_population(pd);
  std::set<QAId> pop_ids;
  for (const auto& q : pd.population) pop_ids.insert(q.id);
  pd.population_trace.verify(pop_ids, pd.dag.node_ids());

  build_category(pd, oracle);
  pd.ortho = orthogonalize(pd.population, oracle, options.ortho, &pd.population_trace);
  pd.ortho.trace.verify(pd.ortho.atom_ids(), pd.dag.node_ids());
  pd.processed = true;
  return pd;
}

/// Per-node listing of the orthogonal atoms, in document order:
///   [node] summary
///     - atom assertion
inline std::string per_node_ortho_text(const ProcessedDocument& pd) {
  std::ostringstream os;
  for (const auto& n : pd.dag.nodes()) {
    os << '[' << n.id << "] " << n.assertion.text << '\n';
    for (const auto& a : pd.atoms_of(n.id)) os << "  - " << a.core.display() << '\n';
  }
  return os.str();
}

}  // namespace qacat

#endif  // QACAT_PIPELINE_HPP
