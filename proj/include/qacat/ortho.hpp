#ifndef QACAT_ORTHO_HPP
#define QACAT_ORTHO_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "qacat/algebra.hpp"
#include "qacat/trace.hpp"

namespace qacat {

/// Atomic, pairwise non-overlapping QAs spanning the input population.
struct OrthoSet {
  std::vector<QAPair> atoms;                    // sorted by id
  TraceRelation trace;                          // restricted to atoms
  std::map<QAId, std::set<QAId>> provenance;    // atom -> original QA ids
  std::vector<std::pair<QAId, QAId>> unresolved;  // pairs left overlapping
  std::size_t rounds = 0;                       // passes that changed the pool
  bool converged = true;

  std::set<QAId> atom_ids() const {
    std::set<QAId> out;
    for (const auto& a : atoms) out.insert(a.id);
    return out;
  }

  const QAPair* find(const QAId& id) const {
    for (const auto& a : atoms) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }
};

struct OrthoOptions {
  std::size_t max_rounds = 3;
  int retry_budget = 3;
};

namespace detail {

struct PoolItem {
  QAPair qa;
  std::set<QAId> provenance;
  std::set<NodeId> nodes;
};

class Orthogonalizer {
 public:
  Orthogonalizer(SemanticOracle& oracle, const OrthoOptions& options) : oracle_(oracle), options_(options) {}

  /// Compares `item` against the pool, decomposing both sides where they
  /// overlap. Pool members may be replaced by their pieces.
  void insert(PoolItem item) {
    std::deque<PoolItem> work{std::move(item)};
    while (!work.empty()) {
      PoolItem cur = std::move(work.front());
      work.pop_front();
      bool consumed = false;
      for (std::size_t i = 0; i < pool_.size() && !consumed; ++i) {
        PoolItem& p = pool_[i];
        if (p.qa.id == cur.qa.id) {
          absorb(p, cur);
          consumed = true;
          break;
        }
        auto key = ordered(cur.qa.id, p.qa.id);
        if (orthogonal_.count(key) || unresolvable_.count(key)) continue;
        DecompTriple t;
        try {
          t = decomp(cur.qa, p.qa, oracle_, options_.retry_budget);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NonConvergent) throw;
          unresolvable_.insert(key);
          continue;
        }
        if (t.mid.empty()) {
          orthogonal_.insert(key);
          continue;
        }
        changed_ = true;
        consumed = true;
        if (t.left.empty() && t.right.empty()) {
          // Equivalent: keep the smaller id as representative.
          if (t.mid.size() == 1) {
            PoolItem merged = p;
            absorb(merged, cur);
            merged.qa = cur.qa.id < p.qa.id ? cur.qa : p.qa;
            p = std::move(merged);
            break;
          }
        }
        PoolItem old = std::move(p);
        pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(i));
        std::set<QAId> both_prov = old.provenance;
        both_prov.insert(cur.provenance.begin(), cur.provenance.end());
        std::set<NodeId> both_nodes = old.nodes;
        both_nodes.insert(cur.nodes.begin(), cur.nodes.end());
        for (auto& q : t.mid) work.push_back(PoolItem{q, both_prov, both_nodes});
        for (auto& q : t.right) work.push_back(PoolItem{q, old.provenance, old.nodes});
        for (auto it = t.left.rbegin(); it != t.left.rend(); ++it) work.push_front(PoolItem{*it, cur.provenance, cur.nodes});
      }
      if (!consumed) pool_.push_back(std::move(cur));
    }
  }

  /// One pass re-inserting every pool item; returns whether anything changed.
  bool pass(std::vector<PoolItem> items) {
    changed_ = false;
    pool_.clear();
    for (auto& it : items) insert(std::move(it));
    return changed_;
  }

  std::vector<PoolItem>& pool() { return pool_; }
  const std::set<std::pair<QAId, QAId>>& unresolvable() const { return unresolvable_; }

 private:
  static std::pair<QAId, QAId> ordered(const QAId& a, const QAId& b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

  static void absorb(PoolItem& into, const PoolItem& from) {
    into.provenance.insert(from.provenance.begin(), from.provenance.end());
    into.nodes.insert(from.nodes.begin(), from.nodes.end());
  }

  SemanticOracle& oracle_;
  OrthoOptions options_;
  std::vector<PoolItem> pool_;
  std::set<std::pair<QAId, QAId>> orthogonal_;
  std::set<std::pair<QAId, QAId>> unresolvable_;
  bool changed_ = false;
};

inline std::size_t distinct_fact_count(std::span<const QAPair> qas) {
  std::set<Fact> facts;
  for (const auto& q : qas) {
    if (q.core.facts) facts.insert(q.core.facts->begin(), q.core.facts->end());
  }
  return facts.size();
}

}  // namespace detail

/// Pool-based pairwise orthogonalization. Inputs are processed in canonical
/// id order; each is atomized against every pooled QA and pooled QAs may be
/// replaced by their pieces. Passes repeat until one makes no change or the
/// round budget is spent (fact-set mode always has enough budget).
inline OrthoSet orthogonalize(std::span<const QAPair> qas, SemanticOracle& oracle, const OrthoOptions& options = {},
                              const TraceRelation* input_trace = nullptr) {
  if (qas.empty()) fail(ErrorCode::EmptyInput, "nothing to orthogonalize");
  std::vector<QAPair> sorted(qas.begin(), qas.end());
  std::sort(sorted.begin(), sorted.end(), by_id);

  std::size_t budget = options.max_rounds;
  if (oracle.mode() == OracleMode::fact_set) budget = std::max(budget, detail::distinct_fact_count(sorted) + 1);

  std::vector<detail::PoolItem> items;
  for (const auto& q : sorted) {
    detail::PoolItem it{q, {q.id}, {}};
    if (input_trace) it.nodes = input_trace->nodes_of(q.id);
    items.push_back(std::move(it));
  }

  detail::Orthogonalizer engine(oracle, options);
  OrthoSet out;
  out.converged = false;
  for (std::size_t pass = 0; pass < budget; ++pass) {
    bool changed = engine.pass(std::move(items));
    items = engine.pool();
    if (!changed) {
      out.converged = true;
      break;
    }
    ++out.rounds;
  }

  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.qa.id < b.qa.id; });
  for (auto& it : items) {
    out.atoms.push_back(it.qa);
    out.provenance[it.qa.id] = it.provenance;
    out.trace.add_all(it.qa.id, it.nodes);
  }
  for (const auto& p : engine.unresolvable()) out.unresolved.push_back(p);
  if (!out.unresolved.empty()) out.converged = false;
  return out;
}

/// Pairs of atoms not at distance 1; empty iff the set is orthogonal.
inline std::vector<std::pair<QAId, QAId>> verify_orthogonal(const OrthoSet& set, SemanticOracle& oracle) {
  std::vector<std::pair<QAId, QAId>> out;
  for (std::size_t i = 0; i < set.atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < set.atoms.size(); ++j) {
      if (!distance_counts(set.atoms[i].core, set.atoms[j].core, oracle).is_one()) {
        out.emplace_back(set.atoms[i].id, set.atoms[j].id);
      }
    }
  }
  return out;
}

/// Brute-force ground truth: every fact is labelled with the set of inputs
/// containing it, and each distinct label becomes one atom.
inline OrthoSet signature_partition(std::span<const QAPair> qas) {
  std::map<Fact, std::set<QAId>> signature;
  for (const auto& q : qas) {
    if (!q.core.facts) fail(ErrorCode::ModeMismatch, "signature partition needs fact payloads");
    for (const auto& f : *q.core.facts) signature[f].insert(q.id);
  }
  std::map<std::set<QAId>, std::vector<Fact>> groups;
  for (const auto& [f, sig] : signature) groups[sig].push_back(f);
  OrthoSet out;
  for (const auto& [sig, facts] : groups) {
    QAPair atom = qa_from_facts(facts);
    out.provenance[atom.id] = sig;
    out.atoms.push_back(std::move(atom));
  }
  std::sort(out.atoms.begin(), out.atoms.end(), by_id);
  return out;
}

}  // namespace qacat

#endif  // QACAT_ORTHO_HPP
