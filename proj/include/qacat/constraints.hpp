#ifndef QACAT_CONSTRAINTS_HPP
#define QACAT_CONSTRAINTS_HPP

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/algebra.hpp"
#include "qacat/lattice.hpp"
#include "qacat/rd.hpp"

namespace qacat {

enum class TaskKind { transitivity, lattice_closure, decomp_roundtrip, orthogonality };

inline std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::transitivity: return "transitivity";
    case TaskKind::lattice_closure: return "lattice-closure";
    case TaskKind::decomp_roundtrip: return "decomp-roundtrip";
    case TaskKind::orthogonality: return "orthogonality";
  }
  return "";
}

inline TaskKind parse_task_kind(std::string_view s) {
  for (auto k : {TaskKind::transitivity, TaskKind::lattice_closure, TaskKind::decomp_roundtrip,
                 TaskKind::orthogonality}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::MalformedTask, "unknown task kind '" + std::string(s) + "'");
}

struct ConstraintTask {
  TaskKind kind = TaskKind::transitivity;
  nlohmann::ordered_json inputs;
  bool expected = true;
  bool verdict = false;
  std::uint64_t seed = 0;
  std::string doc_id;
};

inline nlohmann::ordered_json to_json(const ConstraintTask& t) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(t.kind);
  j["inputs"] = t.inputs;
  j["expected"] = t.expected;
  j["verdict"] = t.verdict;
  j["seed"] = t.seed;
  j["doc_id"] = t.doc_id;
  return j;
}

inline ConstraintTask task_from_json(const nlohmann::ordered_json& j) {
  for (const char* k : {"kind", "inputs", "expected", "verdict", "seed", "doc_id"}) {
    if (!j.contains(k)) fail(ErrorCode::MalformedTask, std::string("task is missing '") + k + "'");
  }
  ConstraintTask t;
  t.kind = parse_task_kind(j["kind"].get<std::string>());
  t.inputs = j["inputs"];
  t.expected = j["expected"].get<bool>();
  t.verdict = j["verdict"].get<bool>();
  t.seed = j["seed"].get<std::uint64_t>();
  t.doc_id = j["doc_id"].get<std::string>();
  return t;
}

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& inputs, const char* key) {
  if (!inputs.is_object() || !inputs.contains(key) || inputs[key].is_null()) {
    fail(ErrorCode::MalformedTask, std::string("task input '") + key + "' is missing");
  }
  return inputs[key];
}

inline QAPair need_qa(const nlohmann::json& inputs, const char* key) {
  try {
    return qa_from_json(need(inputs, key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedTask) throw;
    fail(ErrorCode::MalformedTask, std::string("task input '") + key + "': " + e.what());
  }
}

inline std::vector<QAPair> need_qas(const nlohmann::json& inputs, const char* key) {
  const nlohmann::json& arr = need(inputs, key);
  if (!arr.is_array()) fail(ErrorCode::MalformedTask, std::string("task input '") + key + "' is not a list");
  std::vector<QAPair> out;
  for (const auto& q : arr) out.push_back(qa_from_json(q));
  return out;
}

inline nlohmann::ordered_json qas_json(const std::vector<QAPair>& qas) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& q : qas) arr.push_back(qa_to_json(q));
  return arr;
}

inline Selection need_selection(const nlohmann::json& inputs, const char* key) {
  const nlohmann::json& s = need(inputs, key);
  if (!s.is_array()) fail(ErrorCode::MalformedTask, std::string("task input '") + key + "' is not a list");
  return s.get<Selection>();
}

/// QA whose facts are `fs`, rendered; a placeholder fact keeps it non-empty.
inline QAPair qa_with_facts(FactSet fs) {
  if (fs.empty()) fs.push_back(make_fact("unrelated-detail", {"none"}));
  return qa_from_facts(fs);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace detail

/// Recomputes the verdict from the task inputs alone.
inline bool verify_task(const ConstraintTask& task, SemanticOracle& oracle) {
  const nlohmann::json in = task.inputs;
  if (!in.is_object() || in.empty()) fail(ErrorCode::MalformedTask, "task has no inputs");
  switch (task.kind) {
    case TaskKind::transitivity: {
      QAPair a = detail::need_qa(in, "a");
      QAPair b = detail::need_qa(in, "b");
      QAPair c = detail::need_qa(in, "c");
      return oracle.answers(b.core, a).consistent && oracle.answers(c.core, b).consistent &&
             oracle.answers(c.core, a).consistent;
    }
    case TaskKind::lattice_closure: {
      const nlohmann::json& parents = detail::need(in, "parents");
      if (!parents.is_object()) fail(ErrorCode::MalformedTask, "'parents' must map nodes to parent lists");
      Selection s1 = detail::need_selection(in, "s1");
      Selection s2 = detail::need_selection(in, "s2");
      Selection jn = detail::need_selection(in, "join");
      Selection mt = detail::need_selection(in, "meet");
      auto closed = [&](const Selection& s) {
        for (const auto& n : s) {
          if (!parents.contains(n)) return false;
          for (const auto& p : parents[n]) {
            if (!s.count(p.get<std::string>())) return false;
          }
        }
        return true;
      };
      return jn == join(s1, s2) && mt == meet(s1, s2) && closed(jn) && closed(mt);
    }
    case TaskKind::decomp_roundtrip: {
      QAPair qa1 = detail::need_qa(in, "qa1");
      QAPair qa2 = detail::need_qa(in, "qa2");
      std::vector<QAPair> pieces = detail::need_qas(in, "pieces");
      if (oracle.mode() == OracleMode::fact_set) {
        FactSet whole = merge_facts(qa1.core.fact_set(), qa2.core.fact_set());
        FactSet got;
        for (const auto& p : pieces) got = merge_facts(got, p.core.fact_set());
        return got == whole;
      }
      return oracle.pieces_conserve({qa1, qa2}, pieces, 0);
    }
    case TaskKind::orthogonality: {
      QAPair x = detail::need_qa(in, "x");
      QAPair y = detail::need_qa(in, "y");
      return distance_counts(x.core, y.core, oracle).is_one();
    }
  }
  return false;
}

struct TaskOptions {
  bool planted_negative = false;  // every task carries one planted violation
  std::size_t lattice_limit = 4096;
  int retry_budget = 3;
};

namespace detail {

inline std::vector<std::array<QAId, 3>> composable_triples(const QACategory& cat) {
  std::vector<std::array<QAId, 3>> out;
  for (const auto& [a, b] : cat.closure_edges()) {
    for (const auto& c : cat.successors(b)) {
      if (c != a && c != b) out.push_back({a, b, c});
    }
  }
  return out;
}

inline nlohmann::ordered_json parents_json(const AbstractiveDag& dag) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& n : dag.nodes()) j[n.id] = n.parents;
  return j;
}

}  // namespace detail

/// k tasks of one kind; task i is drawn from its own generator seeded with
/// seed + i, so any single task can be regenerated.
inline std::vector<ConstraintTask> gen_tasks(const ProcessedDocument& d, TaskKind kind, std::size_t k,
                                             std::uint64_t seed, SemanticOracle& oracle,
                                             const TaskOptions& options = {}) {
  require_processed(d);
  std::vector<std::array<QAId, 3>> triples;
  std::vector<Selection> hierarchical;
  std::vector<QAPair> population = d.population;
  switch (kind) {
    case TaskKind::transitivity:
      if (d.category.closure_edges().size() < 2) {
        fail(ErrorCode::InsufficientStructure, "fewer than 2 morphisms");
      }
      triples = detail::composable_triples(d.category);
      if (triples.empty()) fail(ErrorCode::InsufficientStructure, "no composable morphism pairs");
      break;
    case TaskKind::lattice_closure:
      hierarchical = enumerate_hierarchical(d.dag, options.lattice_limit);
      break;
    case TaskKind::decomp_roundtrip:
      if (population.size() < 2) fail(ErrorCode::InsufficientStructure, "fewer than 2 QAs");
      break;
    case TaskKind::orthogonality:
      if (d.ortho.atoms.size() < 2) fail(ErrorCode::InsufficientStructure, "fewer than 2 atoms");
      break;
  }

  std::vector<ConstraintTask> out;
  for (std::size_t i = 0; i < k; ++i) {
    ConstraintTask t;
    t.kind = kind;
    t.seed = seed + i;
    t.doc_id = d.document.id;
    t.expected = !options.planted_negative;
    std::mt19937_64 rng(t.seed);
    nlohmann::ordered_json in;
    switch (kind) {
      case TaskKind::transitivity: {
        const auto& tr = triples[detail::pick(rng, triples.size())];
        QAPair a = d.category.qa(tr[0]);
        QAPair b = d.category.qa(tr[1]);
        QAPair c = d.category.qa(tr[2]);
        if (options.planted_negative) {
          if (a.core.has_facts() && !a.core.fact_set().empty()) {
            const Fact& f = a.core.fact_set()[detail::pick(rng, a.core.fact_set().size())];
            FactSet kept;
            for (const auto& g : c.core.fact_set()) {
              if (g.key != f.key) kept.push_back(g);
            }
            c = detail::qa_with_facts(kept);
          } else {
            std::swap(a, c);
          }
        }
        in["a"] = qa_to_json(a);
        in["b"] = qa_to_json(b);
        in["c"] = qa_to_json(c);
        break;
      }
      case TaskKind::lattice_closure: {
        Selection s1 = hierarchical[detail::pick(rng, hierarchical.size())];
        Selection s2 = hierarchical[detail::pick(rng, hierarchical.size())];
        Selection jn = join(s1, s2);
        Selection mt = meet(s1, s2);
        if (options.planted_negative) {
          std::vector<NodeId> ids;
          for (const auto& n : d.dag.nodes()) ids.push_back(n.id);
          const NodeId& flip = ids[detail::pick(rng, ids.size())];
          if (jn.count(flip)) {
            jn.erase(flip);
          } else {
            jn.insert(flip);
          }
        }
        in["parents"] = detail::parents_json(d.dag);
        in["s1"] = s1;
        in["s2"] = s2;
        in["join"] = jn;
        in["meet"] = mt;
        break;
      }
      case TaskKind::decomp_roundtrip: {
        std::size_t x = detail::pick(rng, population.size());
        std::size_t y = detail::pick(rng, population.size() - 1);
        if (y >= x) ++y;
        const QAPair& qa1 = population[x];
        const QAPair& qa2 = population[y];
        std::vector<QAPair> pieces = all_pieces(decomp(qa1, qa2, oracle, options.retry_budget));
        if (options.planted_negative) {
          std::size_t p = detail::pick(rng, pieces.size());
          if (pieces[p].core.has_facts()) {
            FactSet fs = pieces[p].core.fact_set();
            fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(detail::pick(rng, fs.size())));
            if (fs.empty()) {
              pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(p));
            } else {
              pieces[p] = qa_from_facts(fs);
            }
          } else {
            pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(p));
          }
        }
        in["qa1"] = qa_to_json(qa1);
        in["qa2"] = qa_to_json(qa2);
        in["pieces"] = detail::qas_json(pieces);
        break;
      }
      case TaskKind::orthogonality: {
        std::size_t n = d.ortho.atoms.size();
        std::size_t x = detail::pick(rng, n);
        std::size_t y = detail::pick(rng, n - 1);
        if (y >= x) ++y;
        QAPair ax = d.ortho.atoms[x];
        QAPair ay = d.ortho.atoms[y];
        if (options.planted_negative) {
          if (ax.core.has_facts() && ay.core.has_facts()) {
            const Fact& f = ax.core.fact_set()[detail::pick(rng, ax.core.fact_set().size())];
            FactSet fs = ay.core.fact_set();
            fs.push_back(f);
            ay = qa_from_facts(make_fact_set(fs));
          } else {
            ay = ax;
          }
        }
        in["x"] = qa_to_json(ax);
        in["y"] = qa_to_json(ay);
        break;
      }
    }
    t.inputs = std::move(in);
    t.verdict = verify_task(t, oracle);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace qacat

#endif  // QACAT_CONSTRAINTS_HPP
