#ifndef QACAT_RHETORIC_HPP
#define QACAT_RHETORIC_HPP

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/oracle.hpp"
#include "qacat/trace.hpp"

namespace qacat {

struct DagNode {
  NodeId id;
  Assertion assertion;
  TextSpan span;
  std::vector<NodeId> parents;
  std::vector<NodeId> children;
};

/// Rhetorical structure: every node is a one-sentence summary of a contiguous
/// chunk, the root summarizes the whole document. Nodes are held in document
/// order (depth-first preorder from the root).
class AbstractiveDag {
 public:
  AbstractiveDag() = default;

  /// Builds from nodes in any order; validates ids, acyclicity and
  /// reachability, then orders nodes by preorder.
  AbstractiveDag(std::vector<DagNode> nodes, NodeId root) : root_(std::move(root)) {
    std::map<NodeId, DagNode> by_id;
    for (auto& n : nodes) {
      if (n.id.empty()) fail(ErrorCode::InvalidDag, "node with empty id");
      NodeId id = n.id;
      if (!by_id.emplace(id, std::move(n)).second) fail(ErrorCode::InvalidDag, "duplicate node id '" + id + "'");
    }
    if (!by_id.count(root_)) fail(ErrorCode::InvalidDag, "root '" + root_ + "' is not a node");
    for (auto& [id, n] : by_id) n.parents.clear();
    for (auto& [id, n] : by_id) {
      std::set<NodeId> seen;
      for (const auto& c : n.children) {
        if (!by_id.count(c)) fail(ErrorCode::InvalidDag, "node '" + id + "' names unknown child '" + c + "'");
        if (!seen.insert(c).second) fail(ErrorCode::InvalidDag, "node '" + id + "' lists child '" + c + "' twice");
        by_id.at(c).parents.push_back(id);
      }
    }
    if (!by_id.at(root_).parents.empty()) fail(ErrorCode::InvalidDag, "root has a parent");
    // Cycle check and preorder.
    std::map<NodeId, int> state;
    std::vector<NodeId> order;
    std::function<void(const NodeId&)> visit = [&](const NodeId& id) {
      state[id] = 1;
      order.push_back(id);
      for (const auto& c : by_id.at(id).children) {
        if (state[c] == 1) fail(ErrorCode::InvalidDag, "cycle through '" + c + "'");
        if (state[c] == 0) visit(c);
      }
      state[id] = 2;
    };
    visit(root_);
    if (order.size() != by_id.size()) fail(ErrorCode::InvalidDag, "some nodes are unreachable from the root");
    for (const auto& id : order) {
      index_[id] = nodes_.size();
      nodes_.push_back(std::move(by_id.at(id)));
    }
  }

  const NodeId& root() const { return root_; }
  const std::vector<DagNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const NodeId& id) const { return index_.count(id) > 0; }
  std::size_t position(const NodeId& id) const { return index_.at(require(id)); }

  const DagNode& node(const NodeId& id) const { return nodes_[index_.at(require(id))]; }

  std::set<NodeId> node_ids() const {
    std::set<NodeId> out;
    for (const auto& n : nodes_) out.insert(n.id);
    return out;
  }

  std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
      if (n.children.empty()) out.push_back(n.id);
    }
    return out;
  }

  /// Shortest distance from the root.
  std::size_t depth(const NodeId& id) const {
    std::map<NodeId, std::size_t> d{{root_, 0}};
    for (const auto& n : nodes_) {
      for (const auto& c : n.children) {
        std::size_t cand = d.at(n.id) + 1;
        if (!d.count(c) || cand < d.at(c)) d[c] = cand;
      }
    }
    return d.at(require(id));
  }

  /// Nodes grouped by depth, in document order within each level.
  std::vector<std::vector<NodeId>> levels() const {
    std::vector<std::vector<NodeId>> out;
    for (const auto& n : nodes_) {
      std::size_t d = depth(n.id);
      if (out.size() <= d) out.resize(d + 1);
      out[d].push_back(n.id);
    }
    return out;
  }

  /// Children spans tile the parent span, for every node with a single parent
  /// chain (multi-parent nodes are exempt).
  bool spans_partition() const {
    for (const auto& n : nodes_) {
      if (n.children.empty()) continue;
      bool tree_children = std::all_of(n.children.begin(), n.children.end(),
                                       [&](const NodeId& c) { return node(c).parents.size() == 1; });
      if (!tree_children) continue;
      std::size_t cursor = n.span.begin;
      for (const auto& c : n.children) {
        if (node(c).span.begin != cursor) return false;
        cursor = node(c).span.end;
      }
      if (cursor != n.span.end) return false;
    }
    return true;
  }

  DagNode& mutable_node(const NodeId& id) { return nodes_[index_.at(require(id))]; }

  friend bool operator==(const AbstractiveDag& a, const AbstractiveDag& b);

 private:
  const NodeId& require(const NodeId& id) const {
    if (!index_.count(id)) fail(ErrorCode::UnknownNode, "unknown node '" + id + "'");
    return id;
  }

  NodeId root_;
  std::vector<DagNode> nodes_;
  std::map<NodeId, std::size_t> index_;
};

inline nlohmann::ordered_json dag_to_json(const AbstractiveDag& dag) {
  nlohmann::ordered_json j;
  j["root"] = dag.root();
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : dag.nodes()) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["assertion"] = assertion_to_json(n.assertion);
    jn["span"] = {n.span.begin, n.span.end};
    jn["parents"] = n.parents;
    jn["children"] = n.children;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline bool operator==(const AbstractiveDag& a, const AbstractiveDag& b) { return dag_to_json(a) == dag_to_json(b); }

/// Assigns spans over the leaf concatenation (leaves joined by one space, each
/// leaf span owning its trailing separator) and returns that text.
inline std::string assign_spans(AbstractiveDag& dag) {
  std::vector<NodeId> leaves = dag.leaves();
  std::string raw;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    DagNode& leaf = dag.mutable_node(leaves[i]);
    std::size_t begin = raw.size();
    raw += leaf.assertion.text;
    if (i + 1 < leaves.size()) raw += ' ';
    leaf.span = TextSpan{begin, raw.size()};
  }
  // Internal spans from children, bottom-up (reverse preorder).
  for (auto it = dag.nodes().rbegin(); it != dag.nodes().rend(); ++it) {
    if (it->children.empty()) continue;
    DagNode& n = dag.mutable_node(it->id);
    n.span = TextSpan{raw.size(), 0};
    for (const auto& c : n.children) {
      n.span.begin = std::min(n.span.begin, dag.node(c).span.begin);
      n.span.end = std::max(n.span.end, dag.node(c).span.end);
    }
  }
  return raw;
}

/// A document plus, in fact-set mode, its annotated rhetorical structure.
struct SourceDocument {
  Document document;
  std::optional<AbstractiveDag> annotated;
};

/// Fact-set synthetic document:
/// {id, text?, nodes:[{id, text, facts:[{key, values[]}], children:[ids]}], root}.
/// The raw text is the leaf concatenation; a given `text` must match it up to
/// whitespace.
inline SourceDocument parse_synthetic_document(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "document must be a JSON object");
  for (const char* k : {"id", "nodes", "root"}) {
    if (!j.contains(k)) fail(ErrorCode::ParseError, std::string("document is missing '") + k + "'");
  }
  std::vector<DagNode> nodes;
  for (const auto& jn : j["nodes"]) {
    if (!jn.contains("id") || !jn.contains("text") || !jn.contains("facts")) {
      fail(ErrorCode::ParseError, "node needs 'id', 'text' and 'facts'");
    }
    DagNode n;
    n.id = jn["id"].get<std::string>();
    FactSet fs = facts_from_json(jn["facts"]);
    if (fs.empty()) fail(ErrorCode::ParseError, "node '" + n.id + "' has no facts");
    n.assertion = make_assertion(jn["text"].get<std::string>(), fs);
    if (jn.contains("children")) n.children = jn["children"].get<std::vector<NodeId>>();
    nodes.push_back(std::move(n));
  }
  AbstractiveDag dag(std::move(nodes), j["root"].get<std::string>());
  std::string raw = assign_spans(dag);
  if (j.contains("text") && text::normalize_space(j["text"].get<std::string>()) != text::normalize_space(raw)) {
    fail(ErrorCode::ParseError, "document text does not match the leaf concatenation");
  }
  return SourceDocument{make_document(j["id"].get<std::string>(), raw, OracleMode::fact_set), std::move(dag)};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

/// `.json` files are synthetic fact-set documents; anything else is raw text.
inline SourceDocument load_source_document(const std::string& path) {
  std::string content = read_file(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, path + ": " + e.what());
    }
    return parse_synthetic_document(j);
  }
  return SourceDocument{make_document(file_stem(path), content, OracleMode::llm), std::nullopt};
}

/// Fact-set: the annotated DAG as given. LLM: recursive chunk + summarize
/// until leaves are single sentences.
inline AbstractiveDag build_abstractive_dag(const SourceDocument& src, SemanticOracle& oracle,
                                            std::size_t fanout_limit = 5) {
  if (text::trim(src.document.raw_text).empty()) fail(ErrorCode::EmptyDocument, src.document.id);
  if (src.annotated) return *src.annotated;

  const std::string& raw = src.document.raw_text;
  std::vector<DagNode> nodes;
  std::size_t counter = 0;
  std::function<NodeId(TextSpan)> build = [&](TextSpan span) -> NodeId {
    DagNode n;
    n.id = "n" + std::to_string(counter++);
    n.span = span;
    std::string_view chunk_text(raw.data() + span.begin, span.end - span.begin);
    n.assertion = oracle.summarize_chunk(text::trim(chunk_text));
    std::size_t slot = nodes.size();
    nodes.push_back(n);
    ChunkResult parts = oracle.chunk(chunk_text, fanout_limit);
    if (!parts.leaf) {
      std::vector<NodeId> kids;
      for (const auto& p : parts.spans) kids.push_back(build(TextSpan{span.begin + p.begin, span.begin + p.end}));
      nodes[slot].children = std::move(kids);
    }
    return nodes[slot].id;
  };
  NodeId root = build(TextSpan{0, raw.size()});
  return AbstractiveDag(std::move(nodes), root);
}

/// Per-level fact unions against the document's fact universe. Only
/// meaningful for fact-set documents whose summaries are lossless.
inline bool levels_complete(const AbstractiveDag& dag) {
  FactSet universe;
  for (const auto& n : dag.nodes()) universe = merge_facts(universe, n.assertion.fact_set());
  // A level is the frontier at depth d: nodes at depth d plus shallower leaves.
  std::vector<std::vector<NodeId>> lv = dag.levels();
  for (std::size_t d = 0; d < lv.size(); ++d) {
    FactSet acc;
    for (const auto& n : dag.nodes()) {
      std::size_t nd = dag.depth(n.id);
      if (nd == d || (nd < d && n.children.empty())) acc = merge_facts(acc, n.assertion.fact_set());
    }
    if (acc != universe) return false;
  }
  return true;
}

/// Abstractive DAG with each node's core QAs.
struct CoreQADag {
  AbstractiveDag dag;
  std::map<NodeId, std::vector<QAPair>> core_qas;

  std::vector<QAPair> all_qas() const {
    std::map<QAId, QAPair> uniq;
    for (const auto& [n, qs] : core_qas) {
      for (const auto& q : qs) uniq.emplace(q.id, q);
    }
    std::vector<QAPair> out;
    for (auto& [id, q] : uniq) out.push_back(q);
    return out;
  }
};

/// Converts every node to core QAs and records the trace (QA -> node).
inline CoreQADag to_core_qa_dag(const AbstractiveDag& dag, SemanticOracle& oracle, TraceRelation& trace) {
  CoreQADag out{dag, {}};
  for (const auto& n : dag.nodes()) {
    std::vector<QAPair> qas = oracle.core_qas(n.assertion);
    if (qas.empty()) fail(ErrorCode::OracleFailure, "node '" + n.id + "' produced no core QA");
    for (const auto& q : qas) trace.add(q.id, n.id);
    out.core_qas[n.id] = std::move(qas);
  }
  return out;
}

}  // namespace qacat

#endif  // QACAT_RHETORIC_HPP
