#ifndef QACAT_FACTSET_ORACLE_HPP
#define QACAT_FACTSET_ORACLE_HPP

#include <algorithm>
#include <string>

#include "qacat/oracle.hpp"

namespace qacat {

/// Reference oracle over exact fact payloads. Every operation is a pure
/// function of its arguments.
class FactSetOracle final : public SemanticOracle {
 public:
  OracleMode mode() const override { return OracleMode::fact_set; }
  std::string grader() const override { return "factset-reference"; }

  AnswerVerdict answers(const Assertion& a, const QAPair& qa) override {
    const FactSet& have = a.fact_set();
    const FactSet& want = qa.core.fact_set();
    AnswerVerdict v;
    v.addressable = std::all_of(want.begin(), want.end(), [&](const Fact& f) { return find_key(have, f.key); });
    if (!v.addressable) return v;
    v.consistent = std::all_of(want.begin(), want.end(), [&](const Fact& f) {
      const Fact* mine = find_key(have, f.key);
      return std::includes(f.values.begin(), f.values.end(), mine->values.begin(), mine->values.end());
    });
    return v;
  }

  std::set<std::string> question_keys(const Assertion& a) override { return keys_of(a.fact_set()); }

  bool consistent(const Assertion& a, const Assertion& b) override {
    for (const auto& f : a.fact_set()) {
      const Fact* g = find_key(b.fact_set(), f.key);
      if (!g) continue;
      bool overlap = false;
      for (const auto& v : f.values) {
        if (std::binary_search(g->values.begin(), g->values.end(), v)) overlap = true;
      }
      if (!overlap) return false;
    }
    return true;
  }

  ChunkResult chunk(std::string_view, std::size_t) override {
    fail(ErrorCode::ModeMismatch, "fact-set documents arrive pre-chunked");
  }

  Assertion summarize_chunk(std::string_view) override {
    fail(ErrorCode::ModeMismatch, "fact-set documents carry their own node summaries");
  }

  DecompTriple decompose_pair(const QAPair& qa1, const QAPair& qa2, int = 0) override {
    const FactSet& x = qa1.core.fact_set();
    const FactSet& y = qa2.core.fact_set();
    FactSet mid = common_facts(x, y);
    FactSet left = minus_facts(x, mid);
    FactSet right = minus_facts(y, mid);
    DecompTriple t;
    if (!mid.empty()) {
      if (left.empty()) {
        t.mid.push_back(qa1);
      } else if (right.empty()) {
        t.mid.push_back(qa2);
      } else {
        t.mid.push_back(qa_from_facts(mid));
      }
    }
    // Complements are conditioned on the shared part, or on the other side
    // when nothing is shared.
    auto condition = [&](const QAPair& other) {
      return std::make_shared<const Assertion>(t.mid.empty() ? other.core : t.mid.front().core);
    };
    if (!left.empty()) t.left.push_back(qa_from_facts(left, condition(qa2)));
    if (!right.empty()) t.right.push_back(qa_from_facts(right, condition(qa1)));
    return t;
  }

  /// One QA for the whole fact set; fact-set nodes are not split here.
  std::vector<QAPair> core_qas(const Assertion& a) override {
    const FactSet& fs = a.fact_set();
    if (fs.empty()) fail(ErrorCode::EmptyInput, "assertion '" + a.text + "' has no facts");
    Assertion core = a;
    core.condition = nullptr;
    return {make_qa(render::question(fs), render::answer(fs), std::move(core))};
  }

  QAPair unite(const QAPair& qa1, const QAPair& qa2) override;

  std::vector<QAPair> probe_panel(const Assertion& a, const Assertion& b) override {
    std::vector<QAPair> out;
    for (const auto& f : merge_facts(a.fact_set(), b.fact_set())) out.push_back(qa_from_facts({f}));
    return out;
  }

  bool pieces_conserve(const std::vector<QAPair>& originals, const std::vector<QAPair>& pieces, int = 0) override {
    FactSet lhs;
    FactSet rhs;
    for (const auto& q : originals) lhs = merge_facts(lhs, q.core.fact_set());
    for (const auto& q : pieces) rhs = merge_facts(rhs, q.core.fact_set());
    return lhs == rhs;
  }
};

namespace detail {

inline std::string strip_question_mark(std::string s) {
  s = text::trim(s);
  if (!s.empty() && s.back() == '?') s.pop_back();
  return s;
}

inline std::string strip_respectively(std::string s) {
  static const std::string kSuffix = ", respectively";
  if (s.size() >= kSuffix.size() && s.compare(s.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
    s.resize(s.size() - kSuffix.size());
  }
  return s;
}

}  // namespace detail

/// Consistent pair: questions and answers conjoined with "and". Inconsistent
/// pair: pieces unique to each side, shared facts, then each conflicting key
/// as a disjunction.
inline QAPair FactSetOracle::unite(const QAPair& qa1, const QAPair& qa2) {
  const FactSet& x = qa1.core.fact_set();
  const FactSet& y = qa2.core.fact_set();
  if (qa1.id == qa2.id) return qa1;
  if (consistent(qa1.core, qa2.core)) {
    Assertion core;
    core.text = qa1.core.text + "; " + qa2.core.text;
    core.facts = merge_facts(x, y);
    std::string question = detail::strip_question_mark(qa1.question) + " and " + qa2.question;
    std::string answer =
        detail::strip_respectively(qa1.answer) + " and " + detail::strip_respectively(qa2.answer) + ", respectively";
    return make_qa(question, answer, std::move(core));
  }
  std::vector<Fact> only_x;
  std::vector<Fact> only_y;
  std::vector<Fact> shared;
  std::vector<Fact> conflicts;
  for (const auto& f : x) {
    const Fact* g = find_key(y, f.key);
    if (!g) only_x.push_back(f);
    else if (*g == f) shared.push_back(f);
  }
  for (const auto& f : y) {
    if (!find_key(x, f.key)) only_y.push_back(f);
  }
  for (const auto& f : merge_facts(x, y)) {
    const Fact* a = find_key(x, f.key);
    const Fact* b = find_key(y, f.key);
    if (a && b && !(*a == *b)) conflicts.push_back(f);
  }
  std::vector<Fact> ordered;
  for (auto* group : {&only_x, &only_y, &shared, &conflicts}) ordered.insert(ordered.end(), group->begin(), group->end());
  return qa_from_facts(ordered);
}

}  // namespace qacat

#endif  // QACAT_FACTSET_ORACLE_HPP
