#ifndef QACAT_CATEGORY_HPP
#define QACAT_CATEGORY_HPP

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qacat/algebra.hpp"

namespace qacat {

/// Heads are classes that are the source of no non-trivial morphism; each
/// head's chain holds every class with a path into it (the head included).
struct ChainReport {
  std::set<QAId> heads;
  std::map<QAId, std::set<QAId>> chains;
};

/// Thin partial-order category over QA equivalence classes. A morphism
/// [QA1] -> [QA2] exists iff core(QA2) answers QA1 consistently. Classes are
/// keyed by their least member id; the transitive reduction is stored and the
/// strict closure is kept derived from it.
class QACategory {
 public:
  /// Adds `qa`, merging it into every class whose representative it is
  /// equivalent to.
  EquivClass add_object(const QAPair& qa, SemanticOracle& oracle) {
    if (auto it = rep_of_.find(qa.id); it != rep_of_.end()) return class_of(qa.id);
    std::set<QAId> equal_reps;
    for (const auto& [rep, members] : members_) {
      if (equiv(qa, qas_.at(rep), oracle)) equal_reps.insert(rep);
    }
    insert_member(qa, qa.id);
    equal_reps.insert(qa.id);
    merge_classes(equal_reps);
    return class_of(qa.id);
  }

  /// Adds `qa` to the class of `known_equivalent` without consulting an oracle.
  void add_equivalent_member(const QAPair& qa, const QAId& known_equivalent) {
    if (rep_of_.count(qa.id)) {
      merge_classes({rep_of_.at(qa.id), rep_of_.at(known_equivalent)});
      return;
    }
    insert_member(qa, qa.id);
    merge_classes({qa.id, rep_of_.at(known_equivalent)});
  }

  /// Records src -> dst after the oracle confirms core(dst) answers src.
  void add_morphism(const QAId& src, const QAId& dst, SemanticOracle& oracle) {
    if (!try_add_morphism(src, dst, oracle)) {
      fail(ErrorCode::NotAnswerable, dst.short_hex() + " cannot answer " + src.short_hex());
    }
  }

  bool try_add_morphism(const QAId& src, const QAId& dst, SemanticOracle& oracle) {
    QAId a = rep(src);
    QAId b = rep(dst);
    if (a == b || has_morphism(a, b)) return true;
    AnswerVerdict v = oracle.answers(qas_.at(b).core, qas_.at(a));
    if (!v.consistent) return false;
    link(a, b);
    return true;
  }

  /// Adds an already-verified morphism between the classes of two members.
  void link_verified(const QAId& src, const QAId& dst) { link(rep(src), rep(dst)); }

  /// Tests every ordered pair of classes; used where the oracle is exact.
  void connect_all(SemanticOracle& oracle) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<QAId> reps = representatives();
      for (const auto& a : reps) {
        for (const auto& b : reps) {
          if (!members_.count(a) || !members_.count(b) || a == b || has_morphism(a, b)) continue;
          if (oracle.answers(qas_.at(b).core, qas_.at(a)).consistent) {
            std::size_t before = members_.size();
            link(a, b);
            if (members_.size() != before) {
              changed = true;
              break;
            }
          }
        }
        if (changed) break;
      }
    }
  }

  bool contains(const QAId& member) const { return rep_of_.count(member) > 0; }

  QAId rep(const QAId& member) const {
    auto it = rep_of_.find(member);
    if (it == rep_of_.end()) fail(ErrorCode::UnknownNode, "QA " + member.short_hex() + " is not in the category");
    return it->second;
  }

  EquivClass class_of(const QAId& member) const {
    QAId r = rep(member);
    return EquivClass{r, members_.at(r)};
  }

  const QAPair& qa(const QAId& member) const {
    auto it = qas_.find(member);
    if (it == qas_.end()) fail(ErrorCode::UnknownNode, "QA " + member.short_hex() + " is not in the category");
    return it->second;
  }

  std::vector<QAPair> all_qas() const {
    std::vector<QAPair> out;
    for (const auto& [id, q] : qas_) out.push_back(q);
    return out;
  }

  std::vector<QAId> representatives() const {
    std::vector<QAId> out;
    for (const auto& [r, m] : members_) out.push_back(r);
    return out;
  }

  std::vector<EquivClass> objects() const {
    std::vector<EquivClass> out;
    for (const auto& [r, m] : members_) out.push_back(EquivClass{r, m});
    return out;
  }

  std::size_t object_count() const { return members_.size(); }

  /// Morphism in the closure (identities included) between members' classes.
  bool has_morphism(const QAId& src, const QAId& dst) const {
    QAId a = rep(src);
    QAId b = rep(dst);
    if (a == b) return true;
    auto it = closure_.find(a);
    return it != closure_.end() && it->second.count(b) > 0;
  }

  /// Strict successors of a class in the closure.
  std::set<QAId> successors(const QAId& member) const {
    auto it = closure_.find(rep(member));
    return it == closure_.end() ? std::set<QAId>{} : it->second;
  }

  const std::set<std::pair<QAId, QAId>>& reduction() const { return reduction_; }

  std::set<std::pair<QAId, QAId>> closure_edges() const {
    std::set<std::pair<QAId, QAId>> out;
    for (const auto& [a, succ] : closure_) {
      for (const auto& b : succ) out.emplace(a, b);
    }
    return out;
  }

  /// One "src → dst" line per reduction edge, by representative id.
  std::string edge_list() const {
    std::ostringstream os;
    for (const auto& [a, b] : reduction_) os << a.hex << " → " << b.hex << "\n";
    return os.str();
  }

  std::string dot() const {
    std::ostringstream os;
    os << "digraph qa_category {\n";
    for (const auto& [r, m] : members_) {
      std::string label = qas_.at(r).core.display();
      std::string escaped;
      for (char c : label) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c;
      }
      os << "  \"" << r.short_hex() << "\" [label=\"" << escaped << "\"];\n";
    }
    for (const auto& [a, b] : reduction_) os << "  \"" << a.short_hex() << "\" -> \"" << b.short_hex() << "\";\n";
    os << "}\n";
    return os.str();
  }

 private:
  void insert_member(const QAPair& qa, const QAId& rep) {
    qas_.emplace(qa.id, qa);
    rep_of_[qa.id] = rep;
    members_[rep].insert(qa.id);
  }

  void link(const QAId& a, const QAId& b) {
    if (a == b) return;
    if (closure_.count(a) && closure_.at(a).count(b)) return;
    if (closure_.count(b) && closure_.at(b).count(a)) {
      // b reaches a: everything on a path b ->* a collapses with a and b.
      std::set<QAId> cycle{a, b};
      for (const auto& c : closure_.at(b)) {
        if (closure_.count(c) && closure_.at(c).count(a)) cycle.insert(c);
      }
      merge_classes(cycle);
      return;
    }
    reduction_.emplace(a, b);
    rebuild();
  }

  void merge_classes(const std::set<QAId>& reps) {
    if (reps.size() < 2) {
      rebuild();
      return;
    }
    std::set<QAId> all;
    for (const auto& r : reps) all.insert(members_.at(r).begin(), members_.at(r).end());
    QAId new_rep = *all.begin();
    for (const auto& r : reps) members_.erase(r);
    members_[new_rep] = all;
    for (const auto& m : all) rep_of_[m] = new_rep;
    std::set<std::pair<QAId, QAId>> remapped;
    for (const auto& [a, b] : reduction_) {
      QAId x = reps.count(a) ? new_rep : a;
      QAId y = reps.count(b) ? new_rep : b;
      if (x != y) remapped.emplace(x, y);
    }
    reduction_ = std::move(remapped);
    rebuild();
  }

  /// Recomputes the closure from the stored edges, then re-reduces.
  void rebuild() {
    std::map<QAId, std::set<QAId>> adj;
    for (const auto& [a, b] : reduction_) adj[a].insert(b);
    closure_.clear();
    for (const auto& [r, m] : members_) {
      std::set<QAId> seen;
      std::vector<QAId> stack(adj[r].begin(), adj[r].end());
      while (!stack.empty()) {
        QAId x = stack.back();
        stack.pop_back();
        if (!seen.insert(x).second) continue;
        for (const auto& y : adj[x]) stack.push_back(y);
      }
      seen.erase(r);
      if (!seen.empty()) closure_[r] = std::move(seen);
    }
    std::set<std::pair<QAId, QAId>> reduced;
    for (const auto& [a, succ] : closure_) {
      for (const auto& b : succ) {
        bool implied = std::any_of(succ.begin(), succ.end(), [&](const QAId& c) {
          return c != b && closure_.count(c) && closure_.at(c).count(b);
        });
        if (!implied) reduced.emplace(a, b);
      }
    }
    reduction_ = std::move(reduced);
  }

  std::map<QAId, QAPair> qas_;
  std::map<QAId, QAId> rep_of_;
  std::map<QAId, std::set<QAId>> members_;
  std::set<std::pair<QAId, QAId>> reduction_;
  std::map<QAId, std::set<QAId>> closure_;
};

inline ChainReport chain_report(const QACategory& cat) {
  ChainReport report;
  for (const auto& r : cat.representatives()) {
    if (cat.successors(r).empty()) report.heads.insert(r);
  }
  for (const auto& h : report.heads) report.chains[h].insert(h);
  for (const auto& r : cat.representatives()) {
    for (const auto& s : cat.successors(r)) {
      if (report.heads.count(s)) report.chains[s].insert(r);
    }
  }
  return report;
}

/// Union of objects with cross-category isomorphism detection; morphisms of
/// both inputs are carried over and re-closed.
inline QACategory merge_categories(const QACategory& c1, const QACategory& c2, SemanticOracle& oracle) {
  QACategory out = c1;
  for (const auto& cls : c2.objects()) {
    out.add_object(c2.qa(cls.representative), oracle);
    for (const auto& m : cls.members) {
      if (m != cls.representative) out.add_equivalent_member(c2.qa(m), cls.representative);
    }
  }
  for (const auto& [a, b] : c2.reduction()) out.link_verified(a, b);
  return out;
}

}  // namespace qacat

#endif  // QACAT_CATEGORY_HPP
