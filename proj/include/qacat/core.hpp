#ifndef QACAT_CORE_HPP
#define QACAT_CORE_HPP

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/error.hpp"
#include "qacat/text.hpp"

namespace qacat {

enum class OracleMode { fact_set, llm };

inline std::string_view to_string(OracleMode mode) { return mode == OracleMode::fact_set ? "factset" : "llm"; }

inline OracleMode parse_mode(std::string_view s) {
  if (s == "factset" || s == "fact-set") return OracleMode::fact_set;
  if (s == "llm") return OracleMode::llm;
  fail(ErrorCode::ConfigError, "unknown oracle mode '" + std::string(s) + "'");
}

/// One atomic information unit: a canonical question key and its answer.
/// Several values form a disjunction ("blue or gray").
struct Fact {
  std::string key;
  std::vector<std::string> values;  // sorted, unique, non-empty

  friend bool operator==(const Fact&, const Fact&) = default;
  friend auto operator<=>(const Fact&, const Fact&) = default;
};

inline Fact make_fact(std::string_view key, std::vector<std::string> values) {
  Fact f;
  f.key = text::nfc(text::trim(key));
  if (f.key.empty()) fail(ErrorCode::InvalidFact, "fact key is empty");
  for (auto& v : values) {
    std::string n = text::nfc(text::trim(v));
    if (n.empty()) fail(ErrorCode::InvalidFact, "empty value for key '" + f.key + "'");
    f.values.push_back(std::move(n));
  }
  if (f.values.empty()) fail(ErrorCode::InvalidFact, "fact '" + f.key + "' has no values");
  std::sort(f.values.begin(), f.values.end());
  f.values.erase(std::unique(f.values.begin(), f.values.end()), f.values.end());
  return f;
}

/// Key-unique facts in key order.
using FactSet = std::vector<Fact>;

inline FactSet make_fact_set(std::vector<Fact> facts) {
  std::sort(facts.begin(), facts.end());
  for (std::size_t i = 1; i < facts.size(); ++i) {
    if (facts[i].key == facts[i - 1].key) fail(ErrorCode::DuplicateFactKey, facts[i].key);
  }
  return facts;
}

inline std::set<std::string> keys_of(const FactSet& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.insert(f.key);
  return out;
}

inline const Fact* find_key(const FactSet& fs, std::string_view key) {
  auto it = std::lower_bound(fs.begin(), fs.end(), key, [](const Fact& f, std::string_view k) { return f.key < k; });
  return (it != fs.end() && it->key == key) ? &*it : nullptr;
}

inline bool contains_fact(const FactSet& fs, const Fact& f) {
  const Fact* hit = find_key(fs, f.key);
  return hit != nullptr && *hit == f;
}

/// Facts present with identical values in both.
inline FactSet common_facts(const FactSet& a, const FactSet& b) {
  FactSet out;
  for (const auto& f : a) {
    if (contains_fact(b, f)) out.push_back(f);
  }
  return out;
}

/// Facts of `a` not present (key and values) in `b`.
inline FactSet minus_facts(const FactSet& a, const FactSet& b) {
  FactSet out;
  for (const auto& f : a) {
    if (!contains_fact(b, f)) out.push_back(f);
  }
  return out;
}

/// Key-wise merge; a key present in both gets the union of its value sets.
inline FactSet merge_facts(const FactSet& a, const FactSet& b) {
  std::map<std::string, std::set<std::string>> merged;
  for (const auto* fs : {&a, &b}) {
    for (const auto& f : *fs) merged[f.key].insert(f.values.begin(), f.values.end());
  }
  FactSet out;
  for (auto& [k, vs] : merged) out.push_back(Fact{k, std::vector<std::string>(vs.begin(), vs.end())});
  return out;
}

inline bool keys_disjoint(const FactSet& a, const FactSet& b) {
  for (const auto& f : a) {
    if (find_key(b, f.key) != nullptr) return false;
  }
  return true;
}

/// A unit of meaning. In fact-set mode `facts` carries the exact payload;
/// `condition` is the B of a conditioned assertion A|B.
struct Assertion {
  std::string text;
  std::optional<FactSet> facts;
  std::shared_ptr<const Assertion> condition;

  /// "A | B" rendering.
  std::string display() const { return condition ? text + " | " + condition->display() : text; }

  bool has_facts() const { return facts.has_value(); }
  const FactSet& fact_set() const {
    if (!facts) fail(ErrorCode::ModeMismatch, "assertion '" + text + "' carries no facts");
    return *facts;
  }
};

inline Assertion make_assertion(std::string_view text, std::optional<std::vector<Fact>> facts = std::nullopt) {
  Assertion a;
  a.text = text::nfc(text::trim(text));
  if (a.text.empty()) fail(ErrorCode::EmptyText, "assertion text is empty");
  if (facts) a.facts = make_fact_set(std::move(*facts));
  return a;
}

/// Attaches `condition` to `a`; the two must not share a fact.
inline Assertion make_conditioned(Assertion a, const Assertion& condition) {
  if (a.facts && condition.facts && !common_facts(*a.facts, *condition.facts).empty()) {
    fail(ErrorCode::InvalidFact, "conditioned assertion shares facts with its condition");
  }
  a.condition = std::make_shared<const Assertion>(condition);
  return a;
}

/// Content address of a QA pair.
struct QAId {
  std::string hex;

  friend bool operator==(const QAId&, const QAId&) = default;
  friend auto operator<=>(const QAId&, const QAId&) = default;
  std::string short_hex() const { return hex.substr(0, 12); }
};

inline nlohmann::ordered_json facts_to_json(const FactSet& fs) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : fs) {
    nlohmann::ordered_json j;
    j["key"] = f.key;
    j["values"] = f.values;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline FactSet facts_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) fail(ErrorCode::ParseError, "facts must be an array");
  std::vector<Fact> facts;
  for (const auto& f : arr) {
    if (!f.is_object() || !f.contains("key") || !f.contains("values") || !f["key"].is_string() ||
        !f["values"].is_array()) {
      fail(ErrorCode::ParseError, "fact needs string 'key' and array 'values'");
    }
    facts.push_back(make_fact(f["key"].get<std::string>(), f["values"].get<std::vector<std::string>>()));
  }
  return make_fact_set(std::move(facts));
}

/// Deterministic digest over trimmed, case-folded question/answer and
/// canonically sorted facts.
inline QAId qa_id(std::string_view question, std::string_view answer, const std::optional<FactSet>& facts) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  j.push_back("qa/v1");
  j.push_back(text::canonical(question));
  j.push_back(text::canonical(answer));
  if (facts) {
    std::vector<Fact> sorted;
    for (const auto& f : *facts) sorted.push_back(make_fact(f.key, f.values));
    j.push_back(facts_to_json(make_fact_set(std::move(sorted))));
  } else {
    j.push_back(nullptr);
  }
  return QAId{text::sha256_hex(j.dump())};
}

struct QAPair {
  std::string question;
  std::string answer;
  Assertion core;
  QAId id;
};

inline QAPair make_qa(std::string_view question, std::string_view answer, Assertion core) {
  QAPair qa;
  qa.question = text::nfc(text::trim(question));
  qa.answer = text::nfc(text::trim(answer));
  qa.id = qa_id(qa.question, qa.answer, core.facts);
  qa.core = std::move(core);
  return qa;
}

inline bool by_id(const QAPair& a, const QAPair& b) { return a.id < b.id; }

struct EquivClass {
  QAId representative;
  std::set<QAId> members;

  friend bool operator==(const EquivClass&, const EquivClass&) = default;
};

struct Document {
  std::string id;
  std::string raw_text;
  OracleMode mode = OracleMode::fact_set;
  std::size_t word_count = 0;
};

inline Document make_document(std::string id, std::string raw_text, OracleMode mode) {
  Document d{std::move(id), std::move(raw_text), mode, 0};
  d.word_count = text::word_count(d.raw_text);
  return d;
}

// Rendering of fact payloads as natural-ish text. Keys read as phrases with
// '-' and '_' as spaces; yes/no keys start with an auxiliary verb.
namespace render {

inline std::string key_words(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '-', ' ');
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

inline bool is_polar(std::string_view words) {
  static const std::set<std::string, std::less<>> kAux = {"is",  "are", "was",  "were",  "do",   "does",  "did",
                                                          "can", "will", "has", "have", "should", "could", "would"};
  auto space = words.find(' ');
  return kAux.count(words.substr(0, space)) > 0;
}

inline bool is_wh(std::string_view words) {
  static const std::set<std::string, std::less<>> kWh = {"what", "which", "who", "whom", "whose",
                                                         "when", "where", "why", "how"};
  auto space = words.find(' ');
  return kWh.count(words.substr(0, space)) > 0;
}

/// Keys that already read as a question are kept; noun phrases get "what is".
inline std::string question_clause(const Fact& f) {
  std::string w = key_words(f.key);
  return is_polar(w) || is_wh(w) ? w : "what is " + w;
}

inline std::string answer_clause(const Fact& f) {
  std::string out;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (i) out += " or ";
    out += f.values[i];
  }
  return out;
}

inline std::string join_list(const std::vector<std::string>& parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts[0];
  if (parts.size() == 2) return parts[0] + " and " + parts[1];
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i + 1 == parts.size()) out += "and ";
    out += parts[i];
    if (i + 1 < parts.size()) out += ", ";
  }
  return out;
}

inline std::string question(const std::vector<Fact>& ordered) {
  std::vector<std::string> parts;
  for (const auto& f : ordered) parts.push_back(question_clause(f));
  return join_list(parts) + "?";
}

inline std::string answer(const std::vector<Fact>& ordered) {
  std::vector<std::string> parts;
  for (const auto& f : ordered) parts.push_back(answer_clause(f));
  std::string out = join_list(parts);
  if (parts.size() > 1) out += ", respectively";
  return out;
}

inline std::string statement(const std::vector<Fact>& ordered) {
  std::string out;
  for (const auto& f : ordered) {
    if (!out.empty()) out += "; ";
    out += key_words(f.key) + ": " + answer_clause(f);
  }
  return out;
}

}  // namespace render

/// QA pair whose text is rendered from `ordered` facts (the order only affects
/// the text; the payload is canonical).
inline QAPair qa_from_facts(const std::vector<Fact>& ordered, std::shared_ptr<const Assertion> condition = nullptr) {
  if (ordered.empty()) fail(ErrorCode::EmptyInput, "cannot render a QA from zero facts");
  Assertion core;
  core.text = render::statement(ordered);
  core.facts = make_fact_set(ordered);
  core.condition = std::move(condition);
  return make_qa(render::question(ordered), render::answer(ordered), std::move(core));
}

inline nlohmann::ordered_json assertion_to_json(const Assertion& a) {
  nlohmann::ordered_json j;
  j["text"] = a.text;
  if (a.facts) j["facts"] = facts_to_json(*a.facts);
  if (a.condition) j["condition"] = assertion_to_json(*a.condition);
  return j;
}

inline Assertion assertion_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    fail(ErrorCode::ParseError, "assertion needs a string 'text'");
  }
  Assertion a;
  a.text = j["text"].get<std::string>();
  if (j.contains("facts")) a.facts = facts_from_json(j["facts"]);
  if (j.contains("condition")) a.condition = std::make_shared<const Assertion>(assertion_from_json(j["condition"]));
  return a;
}

inline nlohmann::ordered_json qa_to_json(const QAPair& qa) {
  nlohmann::ordered_json j;
  j["id"] = qa.id.hex;
  j["question"] = qa.question;
  j["answer"] = qa.answer;
  j["core"] = assertion_to_json(qa.core);
  return j;
}

inline QAPair qa_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("question") || !j.contains("answer") || !j.contains("core")) {
    fail(ErrorCode::ParseError, "QA needs 'question', 'answer' and 'core'");
  }
  return make_qa(j["question"].get<std::string>(), j["answer"].get<std::string>(), assertion_from_json(j["core"]));
}

}  // namespace qacat

#endif  // QACAT_CORE_HPP
