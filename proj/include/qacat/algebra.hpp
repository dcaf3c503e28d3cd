#ifndef QACAT_ALGEBRA_HPP
#define QACAT_ALGEBRA_HPP

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "qacat/oracle.hpp"

namespace qacat {

/// |Q(a) ∩ Q(b)| and |Q(a) ∪ Q(b)|, kept as integers so callers can compare
/// distances exactly.
struct JaccardCounts {
  std::size_t shared = 0;
  std::size_t total = 0;

  /// 1 - shared/total; two empty question sets are at distance 0.
  double value() const { return total == 0 ? 0.0 : 1.0 - static_cast<double>(shared) / static_cast<double>(total); }
  bool is_zero() const { return shared == total; }
  bool is_one() const { return shared == 0 && total > 0; }
};

inline JaccardCounts distance_counts(const Assertion& a, const Assertion& b, SemanticOracle& oracle) {
  JaccardCounts c;
  if (oracle.mode() == OracleMode::fact_set) {
    std::set<std::string> qa = oracle.question_keys(a);
    std::set<std::string> qb = oracle.question_keys(b);
    for (const auto& k : qa) c.shared += qb.count(k);
    c.total = qa.size() + qb.size() - c.shared;
    return c;
  }
  // Probe panel generated once from the pair, then addressability per side.
  for (const auto& probe : oracle.probe_panel(a, b)) {
    bool in_a = oracle.answers(a, probe).addressable;
    bool in_b = oracle.answers(b, probe).addressable;
    if (in_a || in_b) ++c.total;
    if (in_a && in_b) ++c.shared;
  }
  return c;
}

inline double distance(const Assertion& a, const Assertion& b, SemanticOracle& oracle) {
  return distance_counts(a, b, oracle).value();
}

/// Same answerable questions, each answered consistently by the other side.
inline bool equiv(const QAPair& qa1, const QAPair& qa2, SemanticOracle& oracle) {
  if (qa1.id == qa2.id) return true;
  if (oracle.mode() == OracleMode::fact_set) {
    return qa1.core.fact_set() == qa2.core.fact_set();
  }
  for (const auto& probe : oracle.probe_panel(qa1.core, qa2.core)) {
    AnswerVerdict x = oracle.answers(qa1.core, probe);
    AnswerVerdict y = oracle.answers(qa2.core, probe);
    if (!x.consistent || !y.consistent) return false;
  }
  return true;
}

inline QAPair unite(const QAPair& qa1, const QAPair& qa2, SemanticOracle& oracle) { return oracle.unite(qa1, qa2); }

/// Left-fold of unite over a non-empty list.
inline QAPair unite_all(const std::vector<QAPair>& qas, SemanticOracle& oracle) {
  if (qas.empty()) fail(ErrorCode::EmptyInput, "union of zero QAs");
  QAPair acc = qas.front();
  for (std::size_t i = 1; i < qas.size(); ++i) acc = oracle.unite(acc, qas[i]);
  return acc;
}

inline std::vector<QAPair> all_pieces(const DecompTriple& t) {
  std::vector<QAPair> out = t.left;
  out.insert(out.end(), t.mid.begin(), t.mid.end());
  out.insert(out.end(), t.right.begin(), t.right.end());
  return out;
}

/// Conservation: left ∪ mid ≡ qa1, mid ∪ right ≡ qa2, and left/right share no
/// key with mid. Exact in fact-set mode; oracle-judged otherwise.
inline bool decomp_conserves(const QAPair& qa1, const QAPair& qa2, const DecompTriple& t, SemanticOracle& oracle,
                             int attempt = 0) {
  if (oracle.mode() == OracleMode::fact_set) {
    auto merged = [](const std::vector<QAPair>& a, const std::vector<QAPair>& b) {
      FactSet acc;
      for (const auto* list : {&a, &b}) {
        for (const auto& q : *list) acc = merge_facts(acc, q.core.fact_set());
      }
      return acc;
    };
    FactSet mid = merged(t.mid, {});
    FactSet left = merged(t.left, {});
    FactSet right = merged(t.right, {});
    return merged(t.left, t.mid) == qa1.core.fact_set() && merged(t.mid, t.right) == qa2.core.fact_set() &&
           keys_disjoint(left, mid) && keys_disjoint(right, mid);
  }
  return oracle.pieces_conserve({qa1, qa2}, all_pieces(t), attempt);
}

/// Oracle decomposition with a conservation round-trip check; retried with a
/// fresh attempt index up to `retry_budget` times.
inline DecompTriple decomp(const QAPair& qa1, const QAPair& qa2, SemanticOracle& oracle, int retry_budget = 3) {
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    DecompTriple t = oracle.decompose_pair(qa1, qa2, attempt);
    if (decomp_conserves(qa1, qa2, t, oracle, attempt)) return t;
  }
  fail(ErrorCode::NonConvergent, "decomposition of " + qa1.id.short_hex() + " and " + qa2.id.short_hex() +
                                     " failed validation after " + std::to_string(retry_budget) + " attempts");
}

}  // namespace qacat

#endif  // QACAT_ALGEBRA_HPP
