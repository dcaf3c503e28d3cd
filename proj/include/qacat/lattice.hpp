#ifndef QACAT_LATTICE_HPP
#define QACAT_LATTICE_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "qacat/algebra.hpp"
#include "qacat/pipeline.hpp"

namespace qacat {

/// Kept DAG nodes.
using Selection = std::set<NodeId>;

inline void check_nodes(const Selection& sel, const AbstractiveDag& dag) {
  for (const auto& n : sel) {
    if (!dag.contains(n)) fail(ErrorCode::UnknownNode, "selection names unknown node '" + n + "'");
  }
}

/// Ancestor-closed: every kept node has all its parents kept.
inline bool is_hierarchical(const Selection& sel, const AbstractiveDag& dag) {
  check_nodes(sel, dag);
  for (const auto& n : sel) {
    for (const auto& p : dag.node(n).parents) {
      if (!sel.count(p)) return false;
    }
  }
  return true;
}

inline Selection meet(const Selection& a, const Selection& b) {
  Selection out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline Selection join(const Selection& a, const Selection& b) {
  Selection out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline Selection full_selection(const AbstractiveDag& dag) { return dag.node_ids(); }

/// Topological order; ties broken by document order.
inline std::vector<NodeId> topological_order(const AbstractiveDag& dag) {
  std::map<NodeId, std::size_t> indegree;
  for (const auto& n : dag.nodes()) indegree[n.id] = n.parents.size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (const auto& n : dag.nodes()) {
    if (n.parents.empty()) ready.push(dag.position(n.id));
  }
  std::vector<NodeId> out;
  while (!ready.empty()) {
    const DagNode& n = dag.nodes()[ready.top()];
    ready.pop();
    out.push_back(n.id);
    for (const auto& c : n.children) {
      if (--indegree[c] == 0) ready.push(dag.position(c));
    }
  }
  return out;
}

/// Canonical order: by size, then by the kept nodes' document positions.
inline bool selection_less(const Selection& a, const Selection& b, const AbstractiveDag& dag) {
  if (a.size() != b.size()) return a.size() < b.size();
  auto positions = [&](const Selection& s) {
    std::vector<std::size_t> p;
    for (const auto& n : s) p.push_back(dag.position(n));
    std::sort(p.begin(), p.end());
    return p;
  };
  return positions(a) < positions(b);
}

/// All ancestor-closed selections; TooLarge once more than `limit` exist.
inline std::vector<Selection> enumerate_hierarchical(const AbstractiveDag& dag, std::size_t limit = 4096) {
  std::vector<NodeId> order = topological_order(dag);
  std::vector<Selection> out;
  Selection cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == order.size()) {
      if (out.size() >= limit) {
        fail(ErrorCode::TooLarge, "more than " + std::to_string(limit) + " hierarchical selections");
      }
      out.push_back(cur);
      return;
    }
    rec(i + 1);
    const auto& parents = dag.node(order[i]).parents;
    if (std::all_of(parents.begin(), parents.end(), [&](const NodeId& p) { return cur.count(p) > 0; })) {
      cur.insert(order[i]);
      rec(i + 1);
      cur.erase(order[i]);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [&](const Selection& a, const Selection& b) { return selection_less(a, b, dag); });
  return out;
}

struct Summary {
  Selection selection;
  std::set<QAId> atoms;  // included into the document's atoms
  std::string text;
  bool hierarchical = true;
};

/// Kept node texts in document order.
inline std::string selection_text(const Selection& sel, const AbstractiveDag& dag) {
  std::string out;
  for (const auto& n : dag.nodes()) {
    if (!sel.count(n.id)) continue;
    if (!out.empty()) out += ' ';
    out += n.assertion.text;
  }
  return out;
}

/// Removes everything outside `sel`. With an llm oracle the text is
/// regenerated from the kept atoms; otherwise kept node texts are joined.
inline Summary suppress(const ProcessedDocument& pd, const Selection& sel, bool allow_nonhierarchical = false,
                        SemanticOracle* oracle = nullptr) {
  Summary s;
  s.selection = sel;
  s.hierarchical = is_hierarchical(sel, pd.dag);
  if (!s.hierarchical && !allow_nonhierarchical) {
    fail(ErrorCode::NonHierarchical, "selection drops an ancestor of a kept node");
  }
  s.atoms = pd.atoms_for(sel);
  if (oracle && oracle->mode() == OracleMode::llm && !s.atoms.empty()) {
    std::string joined;
    for (const auto& a : pd.ortho.atoms) {
      if (!s.atoms.count(a.id)) continue;
      if (!joined.empty()) joined += ' ';
      joined += a.core.text;
    }
    s.text = oracle->summarize_chunk(joined).text;
  } else {
    s.text = selection_text(sel, pd.dag);
  }
  return s;
}

enum class SummaryKind { subdocument, quotient, mixed };

inline std::string_view to_string(SummaryKind k) {
  switch (k) {
    case SummaryKind::subdocument: return "subdocument";
    case SummaryKind::quotient: return "quotient";
    case SummaryKind::mixed: return "mixed";
  }
  return "mixed";
}

/// Category classes with a member tracing to a kept node.
inline std::set<QAId> kept_classes(const Selection& sel, const QACategory& category, const TraceRelation& trace) {
  std::set<QAId> out;
  for (const auto& [qa, node] : trace.pairs()) {
    if (sel.count(node) && category.contains(qa)) out.insert(category.rep(qa));
  }
  return out;
}

namespace detail {

inline std::set<QAId> heads_above(const QAId& cls, const ChainReport& chains) {
  std::set<QAId> out;
  for (const auto& [h, chain] : chains.chains) {
    if (chain.count(cls)) out.insert(h);
  }
  return out;
}

/// Every kept class must reach a kept head.
inline void require_valid(const std::set<QAId>& kept, const ChainReport& chains) {
  for (const auto& c : kept) {
    std::set<QAId> heads = heads_above(c, chains);
    if (std::none_of(heads.begin(), heads.end(), [&](const QAId& h) { return kept.count(h) > 0; })) {
      fail(ErrorCode::InvalidSummary, "class " + c.short_hex() + " is kept without any of its heads");
    }
  }
}

}  // namespace detail

/// Subdocument: every chain touching the kept classes lies wholly inside
/// them. Quotient: every removed class lies in the chain of a kept head.
/// Classes are compared against `base` (the full document by default).
inline SummaryKind classify_summary(const Selection& sel, const QACategory& category, const TraceRelation& trace,
                                    const std::optional<Selection>& base = std::nullopt) {
  ChainReport chains = chain_report(category);
  std::set<QAId> kept = kept_classes(sel, category, trace);
  detail::require_valid(kept, chains);
  std::set<QAId> universe;
  if (base) {
    universe = kept_classes(*base, category, trace);
  } else {
    for (const auto& r : category.representatives()) universe.insert(r);
  }
  for (const auto& c : kept) {
    if (!universe.count(c)) fail(ErrorCode::InvalidSummary, "summary keeps content outside its base");
  }

  bool subdocument = true;
  for (const auto& [h, chain] : chains.chains) {
    bool touches = false;
    bool whole = true;
    for (const auto& c : chain) {
      if (!universe.count(c)) continue;
      if (kept.count(c)) {
        touches = true;
      } else {
        whole = false;
      }
    }
    if (touches && !whole) subdocument = false;
  }
  if (subdocument) return SummaryKind::subdocument;

  bool quotient = true;
  for (const auto& c : universe) {
    if (kept.count(c)) continue;
    std::set<QAId> heads = detail::heads_above(c, chains);
    if (std::none_of(heads.begin(), heads.end(), [&](const QAId& h) { return kept.count(h) > 0; })) quotient = false;
  }
  return quotient ? SummaryKind::quotient : SummaryKind::mixed;
}

inline SummaryKind classify_summary(const ProcessedDocument& pd, const Selection& sel,
                                    const std::optional<Selection>& base = std::nullopt) {
  check_nodes(sel, pd.dag);
  return classify_summary(sel, pd.category, pd.population_trace, base);
}

struct SummaryFactors {
  Selection subdocument_step;  // whole chains of the kept heads
  Selection quotient_step;     // trimmed down to the selection
};

/// The subdocument step keeps every node whose classes lie in the chains of
/// the selection's kept heads; the quotient step then trims to `sel`.
inline SummaryFactors factor_summary(const ProcessedDocument& pd, const Selection& sel) {
  check_nodes(sel, pd.dag);
  ChainReport chains = chain_report(pd.category);
  std::set<QAId> kept = kept_classes(sel, pd.category, pd.population_trace);
  detail::require_valid(kept, chains);
  std::set<QAId> reach;
  for (const auto& h : chains.heads) {
    if (kept.count(h)) reach.insert(chains.chains.at(h).begin(), chains.chains.at(h).end());
  }
  SummaryFactors out{sel, sel};
  for (const auto& n : pd.dag.nodes()) {
    std::set<QAId> cls = kept_classes({n.id}, pd.category, pd.population_trace);
    if (!cls.empty() && std::all_of(cls.begin(), cls.end(), [&](const QAId& c) { return reach.count(c) > 0; })) {
      out.subdocument_step.insert(n.id);
    }
  }
  return out;
}

/// Markup of a summary against its document: removed node texts are
/// wrapped in ~~ ~~.
inline std::string summary_markup(const ProcessedDocument& pd, const Selection& sel) {
  std::string out;
  for (const auto& n : pd.dag.nodes()) {
    if (!out.empty()) out += ' ';
    out += sel.count(n.id) ? n.assertion.text : "~~" + n.assertion.text + "~~";
  }
  return out;
}

// ---- extensions ----

struct Addition {
  std::string id;
  Assertion assertion;
  std::optional<NodeId> attach_under;  // absent: new chain head
  bool allow_overlap = false;          // elaborates content already present
};

struct ExtensionSpec {
  std::vector<Addition> additions;
};

enum class ExtensionKind { superdocument, elaboration };

inline std::string_view to_string(ExtensionKind k) {
  return k == ExtensionKind::superdocument ? "superdocument" : "elaboration";
}

struct Extension {
  AbstractiveDag dag;
  ProcessedDocument processed;
  std::map<std::string, ExtensionKind> kinds;
  std::set<QAId> new_atoms;
};

inline ExtensionSpec parse_extension_spec(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("additions") || !j["additions"].is_array()) {
    fail(ErrorCode::ParseError, "extension spec needs an 'additions' array");
  }
  ExtensionSpec spec;
  std::size_t index = 0;
  for (const auto& ja : j["additions"]) {
    if (!ja.is_object() || !ja.contains("text")) fail(ErrorCode::ParseError, "addition needs 'text'");
    Addition a;
    a.id = ja.value("id", "x" + std::to_string(index));
    std::optional<std::vector<Fact>> facts;
    if (ja.contains("facts")) facts = facts_from_json(ja["facts"]);
    a.assertion = make_assertion(ja["text"].get<std::string>(), facts);
    if (ja.contains("attach_under") && !ja["attach_under"].is_null()) a.attach_under = ja["attach_under"].get<std::string>();
    a.allow_overlap = ja.value("allow_overlap", false);
    spec.additions.push_back(std::move(a));
    ++index;
  }
  return spec;
}

inline nlohmann::ordered_json extension_spec_to_json(const ExtensionSpec& spec) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& a : spec.additions) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["text"] = a.assertion.text;
    if (a.assertion.facts) j["facts"] = facts_to_json(*a.assertion.facts);
    if (a.attach_under) j["attach_under"] = *a.attach_under;
    if (a.allow_overlap) j["allow_overlap"] = true;
    arr.push_back(std::move(j));
  }
  return {{"additions", std::move(arr)}};
}

namespace detail {

/// Heads sorted by id, then attached additions in dependency order (ties by id).
inline std::vector<const Addition*> application_order(const ExtensionSpec& spec, const AbstractiveDag& dag) {
  std::map<std::string, const Addition*> by_id;
  for (const auto& a : spec.additions) {
    if (dag.contains(a.id) || !by_id.emplace(a.id, &a).second) {
      fail(ErrorCode::InvalidArgument, "addition id '" + a.id + "' is already used");
    }
  }
  std::vector<const Addition*> out;
  std::set<std::string> placed;
  for (const auto& [id, a] : by_id) {
    if (!a->attach_under) {
      out.push_back(a);
      placed.insert(id);
    }
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& [id, a] : by_id) {
      if (placed.count(id)) continue;
      const NodeId& target = *a->attach_under;
      if (dag.contains(target) || placed.count(target)) {
        out.push_back(a);
        placed.insert(id);
        progress = true;
        break;
      }
    }
  }
  for (const auto& [id, a] : by_id) {
    if (!placed.count(id)) fail(ErrorCode::UnknownAttachNode, "addition '" + id + "' attaches under unknown node '" + *a->attach_under + "'");
  }
  return out;
}

inline Assertion enrich(const Assertion& base, const Assertion& added) {
  Assertion out;
  out.text = base.text + " " + added.text;
  if (base.facts && added.facts) out.facts = merge_facts(*base.facts, *added.facts);
  return out;
}

}  // namespace detail

/// Applies additions to a DAG. A new head hangs under the root. An
/// elaboration becomes a child of its target and enriches the target's
/// assertion; a target leaf first gets a "<id>~base" child carrying its
/// original assertion.
inline AbstractiveDag apply_extension(const AbstractiveDag& dag, const ExtensionSpec& spec) {
  std::vector<const Addition*> order = detail::application_order(spec, dag);
  std::vector<DagNode> nodes = dag.nodes();
  auto find = [&](const NodeId& id) -> DagNode& {
    return *std::find_if(nodes.begin(), nodes.end(), [&](const DagNode& n) { return n.id == id; });
  };
  for (const Addition* a : order) {
    NodeId target = a->attach_under.value_or(dag.root());
    DagNode added;
    added.id = a->id;
    added.assertion = a->assertion;
    if (a->attach_under) {
      DagNode& t = find(target);
      if (t.children.empty()) {
        DagNode base;
        base.id = t.id + "~base";
        base.assertion = t.assertion;
        t.children.push_back(base.id);
        nodes.push_back(std::move(base));
      }
      DagNode& t2 = find(target);
      t2.assertion = detail::enrich(t2.assertion, a->assertion);
      t2.children.push_back(added.id);
    } else {
      find(target).children.push_back(added.id);
    }
    nodes.push_back(std::move(added));
  }
  AbstractiveDag out(std::move(nodes), dag.root());
  assign_spans(out);
  return out;
}

/// Extends the document, rejecting additions that overlap existing atoms
/// unless marked as elaborating overlaps, and reprocesses the result.
inline Extension extend(const ProcessedDocument& pd, const ExtensionSpec& spec, SemanticOracle& oracle,
                        const PipelineOptions& options = {}) {
  for (const auto& a : spec.additions) {
    if (a.attach_under && !pd.dag.contains(*a.attach_under) &&
        std::none_of(spec.additions.begin(), spec.additions.end(),
                     [&](const Addition& b) { return b.id == *a.attach_under; })) {
      fail(ErrorCode::UnknownAttachNode, "addition '" + a.id + "' attaches under unknown node '" + *a.attach_under + "'");
    }
    if (oracle.mode() == OracleMode::fact_set && !a.assertion.has_facts()) {
      fail(ErrorCode::ModeMismatch, "addition '" + a.id + "' has no facts");
    }
    if (a.allow_overlap) continue;
    for (const auto& atom : pd.ortho.atoms) {
      if (!distance_counts(a.assertion, atom.core, oracle).is_one()) {
        fail(ErrorCode::OverlapWithExisting, "addition '" + a.id + "' overlaps existing content");
      }
    }
  }
  Extension ext;
  ext.dag = apply_extension(pd.dag, spec);
  for (const auto& a : spec.additions) {
    ext.kinds[a.id] = a.attach_under ? ExtensionKind::elaboration : ExtensionKind::superdocument;
  }
  std::string raw = assign_spans(ext.dag);
  SourceDocument src{make_document(pd.document.id + "+ext", raw, pd.document.mode), ext.dag};
  ext.processed = process_document(src, oracle, options);
  std::set<QAId> old_atoms = pd.ortho.atom_ids();
  for (const auto& id : ext.processed.ortho.atom_ids()) {
    if (!old_atoms.count(id)) ext.new_atoms.insert(id);
  }
  return ext;
}

struct ExtensionFactors {
  ExtensionSpec superdocument_step;  // the new heads
  ExtensionSpec elaboration_step;    // everything attached under a node
};

inline ExtensionFactors factor_extension(const ExtensionSpec& spec) {
  ExtensionFactors out;
  for (const auto& a : spec.additions) {
    (a.attach_under ? out.elaboration_step : out.superdocument_step).additions.push_back(a);
  }
  return out;
}

/// Extension text against its base: new nodes wrapped in __ __, enriched
/// nodes show their added tail the same way. "~base" copies are omitted.
inline std::string extension_markup(const AbstractiveDag& base, const AbstractiveDag& extended) {
  std::string out;
  for (const auto& n : extended.nodes()) {
    if (n.id.size() > 5 && n.id.ends_with("~base")) continue;
    std::string piece;
    if (!base.contains(n.id)) {
      piece = "__" + n.assertion.text + "__";
    } else {
      const std::string& old = base.node(n.id).assertion.text;
      if (n.assertion.text == old) {
        piece = old;
      } else {
        piece = old + " __" + n.assertion.text.substr(std::min(old.size() + 1, n.assertion.text.size())) + "__";
      }
    }
    if (!out.empty()) out += ' ';
    out += piece;
  }
  return out;
}

}  // namespace qacat

#endif  // QACAT_LATTICE_HPP
