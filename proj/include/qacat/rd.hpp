#ifndef QACAT_RD_HPP
#define QACAT_RD_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qacat/lattice.hpp"
#include "qacat/measures.hpp"

namespace qacat {

struct RDPoint {
  std::string method;
  std::size_t rate = 0;  // words
  double distortion = 1.0;

  friend bool operator==(const RDPoint&, const RDPoint&) = default;
};

struct CurveStep {
  std::size_t rate = 0;
  double distortion = 1.0;

  friend bool operator==(const CurveStep&, const CurveStep&) = default;
};

/// What a summary carries for grading: its text and, in fact-set mode, the
/// facts it states.
struct SummaryContent {
  std::string text;
  FactSet facts;
};

inline SummaryContent content_of(const ProcessedDocument& d, const Selection& sel, std::string text) {
  SummaryContent c{std::move(text), {}};
  if (d.document.mode == OracleMode::fact_set) {
    for (const auto& n : d.dag.nodes()) {
      if (sel.count(n.id)) c.facts = merge_facts(c.facts, n.assertion.fact_set());
    }
  }
  return c;
}

/// Fraction of the document's atoms the summary does not answer consistently.
inline RDPoint evaluate_summary(const ProcessedDocument& d, const SummaryContent& summary, SemanticOracle& oracle,
                                std::string method = "summary") {
  std::size_t ic = information_content(d);
  RDPoint p{std::move(method), text::word_count(summary.text), 1.0};
  if (ic == 0) {
    p.distortion = 0.0;
    return p;
  }
  if (text::trim(summary.text).empty() && summary.facts.empty()) return p;
  Assertion a;
  a.text = summary.text;
  if (d.document.mode == OracleMode::fact_set) a.facts = summary.facts;
  std::size_t missed = 0;
  for (const auto& atom : d.ortho.atoms) {
    if (!oracle.answers(a, atom).consistent) ++missed;
  }
  p.distortion = static_cast<double>(missed) / static_cast<double>(ic);
  return p;
}

inline RDPoint evaluate_summary(const ProcessedDocument& d, const Summary& s, SemanticOracle& oracle,
                                std::string method = "summary") {
  return evaluate_summary(d, content_of(d, s.selection, s.text), oracle, std::move(method));
}

inline const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {"lattice-greedy", "random-selection", "leading-text"};
  return names;
}

/// Fisher-Yates with a plain modulo index so the order is the same on every
/// standard library.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

namespace detail {

inline std::size_t node_words(const DagNode& n) { return text::word_count(n.assertion.text); }

/// Adds nodes in `order` while they fit the budget; with `hierarchical`, a
/// node also needs all its parents kept.
inline Selection fill_budget(const ProcessedDocument& d, const std::vector<NodeId>& order, std::size_t budget,
                             bool hierarchical) {
  Selection sel;
  std::size_t used = 0;
  for (const auto& id : order) {
    const DagNode& n = d.dag.node(id);
    if (used + node_words(n) > budget) continue;
    if (hierarchical && !std::all_of(n.parents.begin(), n.parents.end(),
                                     [&](const NodeId& p) { return sel.count(p) > 0; })) {
      continue;
    }
    sel.insert(id);
    used += node_words(n);
  }
  return sel;
}

/// Shallow nodes first, then more atoms, then the least core QA id.
inline std::vector<NodeId> greedy_order(const ProcessedDocument& d) {
  struct Key {
    std::size_t depth;
    std::size_t degree;
    QAId least;
    NodeId id;
  };
  std::vector<Key> keys;
  for (const auto& n : d.dag.nodes()) {
    QAId least;
    for (const auto& q : d.core.core_qas.at(n.id)) {
      if (least.hex.empty() || q.id < least) least = q.id;
    }
    keys.push_back({d.dag.depth(n.id), d.atoms_of(n.id).size(), least, n.id});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.degree != b.degree) return a.degree > b.degree;
    if (a.least != b.least) return a.least < b.least;
    return a.id < b.id;
  });
  std::vector<NodeId> out;
  for (const auto& k : keys) out.push_back(k.id);
  return out;
}

/// Nodes whose text span ends inside the first `budget` words.
inline Selection leading_nodes(const ProcessedDocument& d, std::size_t cut) {
  const std::string& raw = d.document.raw_text;
  Selection sel;
  for (const auto& n : d.dag.nodes()) {
    std::size_t end = n.span.end;
    while (end > n.span.begin && text::is_space(raw[end - 1])) --end;
    if (end <= cut && n.span.begin < end) sel.insert(n.id);
  }
  return sel;
}

}  // namespace detail

inline void require_strategy(const std::string& strategy) {
  if (std::find(strategy_names().begin(), strategy_names().end(), strategy) == strategy_names().end()) {
    fail(ErrorCode::UnknownStrategy, "unknown summarizer '" + strategy + "'");
  }
}

/// Node order a fill-based strategy walks; empty for leading-text.
inline std::vector<NodeId> strategy_order(const ProcessedDocument& d, const std::string& strategy, std::uint64_t seed) {
  require_strategy(strategy);
  std::vector<NodeId> order;
  if (strategy == "lattice-greedy") {
    order = detail::greedy_order(d);
  } else if (strategy == "random-selection") {
    for (const auto& n : d.dag.nodes()) order.push_back(n.id);
    std::mt19937_64 rng(seed);
    seeded_shuffle(order, rng);
  }
  return order;
}

/// The selection a strategy makes under a word budget.
inline Selection select_for_budget(const ProcessedDocument& d, const std::string& strategy, std::size_t budget,
                                   std::uint64_t seed = 0) {
  std::vector<NodeId> order = strategy_order(d, strategy, seed);
  if (strategy == "leading-text") {
    return detail::leading_nodes(d, text::prefix_end_after_words(d.document.raw_text, budget));
  }
  return detail::fill_budget(d, order, budget, strategy == "lattice-greedy");
}

/// One point per budget; budgets must be non-empty and strictly increasing.
inline std::vector<RDPoint> sweep(const ProcessedDocument& d, const std::string& strategy,
                                  const std::vector<std::size_t>& budgets, SemanticOracle& oracle,
                                  std::uint64_t seed = 0) {
  require_strategy(strategy);
  if (budgets.empty()) fail(ErrorCode::InvalidArgument, "no budgets");
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) fail(ErrorCode::InvalidArgument, "budgets must be strictly increasing");
  }
  require_processed(d);
  std::vector<NodeId> order = strategy_order(d, strategy, seed);
  std::vector<RDPoint> out;
  for (std::size_t b : budgets) {
    if (strategy == "leading-text") {
      std::size_t cut = text::prefix_end_after_words(d.document.raw_text, b);
      Selection sel = detail::leading_nodes(d, cut);
      out.push_back(evaluate_summary(d, content_of(d, sel, d.document.raw_text.substr(0, cut)), oracle, strategy));
    } else {
      Selection sel = detail::fill_budget(d, order, b, strategy == "lattice-greedy");
      out.push_back(evaluate_summary(d, content_of(d, sel, selection_text(sel, d.dag)), oracle, strategy));
    }
  }
  return out;
}

/// Lowest distortion at each distinct rate or lower.
inline std::vector<CurveStep> operational_curve(const std::vector<RDPoint>& points) {
  if (points.empty()) fail(ErrorCode::EmptyInput, "no rate-distortion points");
  std::map<std::size_t, double> best;
  for (const auto& p : points) {
    auto [it, inserted] = best.emplace(p.rate, p.distortion);
    if (!inserted) it->second = std::min(it->second, p.distortion);
  }
  std::vector<CurveStep> out;
  double running = 1.0;
  bool first = true;
  for (const auto& [rate, d] : best) {
    running = first ? d : std::min(running, d);
    first = false;
    out.push_back({rate, running});
  }
  return out;
}

/// Distortion of the staircase at `rate` (1 below its first step).
inline double curve_at(const std::vector<CurveStep>& curve, std::size_t rate) {
  double v = 1.0;
  for (const auto& s : curve) {
    if (s.rate > rate) break;
    v = s.distortion;
  }
  return v;
}

inline void write_points_csv(std::ostream& os, const std::vector<RDPoint>& points) {
  os << "method,rate_words,distortion\n";
  for (const auto& p : points) os << p.method << ',' << p.rate << ',' << text::format_real(p.distortion) << '\n';
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurveStep>& curve) {
  os << "rate_words,distortion\n";
  for (const auto& s : curve) os << s.rate << ',' << text::format_real(s.distortion) << '\n';
}

}  // namespace qacat

#endif  // QACAT_RD_HPP
