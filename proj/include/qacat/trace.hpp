#ifndef QACAT_TRACE_HPP
#define QACAT_TRACE_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qacat/core.hpp"

namespace qacat {

using NodeId = std::string;

/// Relation f between QAs and the abstractive-DAG nodes they were constructed
/// or decomposed from. Must be total on QAs and surjective on nodes.
class TraceRelation {
 public:
  void add(const QAId& qa, const NodeId& node) { pairs_.emplace(qa, node); }

  void add_all(const QAId& qa, const std::set<NodeId>& nodes) {
    for (const auto& n : nodes) add(qa, n);
  }

  std::set<NodeId> nodes_of(const QAId& qa) const {
    std::set<NodeId> out;
    for (auto it = pairs_.lower_bound({qa, NodeId{}}); it != pairs_.end() && it->first == qa; ++it) out.insert(it->second);
    return out;
  }

  std::set<QAId> qas_of(const NodeId& node) const {
    std::set<QAId> out;
    for (const auto& [q, n] : pairs_) {
      if (n == node) out.insert(q);
    }
    return out;
  }

  bool relates(const QAId& qa, const NodeId& node) const { return pairs_.count({qa, node}) > 0; }

  const std::set<std::pair<QAId, NodeId>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  /// Restriction to the given QAs.
  TraceRelation restricted_to(const std::set<QAId>& qas) const {
    TraceRelation out;
    for (const auto& p : pairs_) {
      if (qas.count(p.first)) out.pairs_.insert(p);
    }
    return out;
  }

  bool is_total(const std::set<QAId>& qas) const {
    for (const auto& q : qas) {
      if (nodes_of(q).empty()) return false;
    }
    return true;
  }

  bool is_surjective(const std::set<NodeId>& nodes) const {
    std::set<NodeId> hit;
    for (const auto& p : pairs_) hit.insert(p.second);
    for (const auto& n : nodes) {
      if (!hit.count(n)) return false;
    }
    return true;
  }

  /// Throws BrokenTrace naming the first QA or node left unrelated.
  void verify(const std::set<QAId>& qas, const std::set<NodeId>& nodes) const {
    for (const auto& q : qas) {
      if (nodes_of(q).empty()) fail(ErrorCode::BrokenTrace, "QA " + q.short_hex() + " traces to no node");
    }
    std::set<NodeId> hit;
    for (const auto& p : pairs_) hit.insert(p.second);
    for (const auto& n : nodes) {
      if (!hit.count(n)) fail(ErrorCode::BrokenTrace, "node '" + n + "' has no QA");
    }
  }

  friend bool operator==(const TraceRelation&, const TraceRelation&) = default;

 private:
  std::set<std::pair<QAId, NodeId>> pairs_;
};

}  // namespace qacat

#endif  // QACAT_TRACE_HPP
