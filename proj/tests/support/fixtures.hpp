#ifndef QACAT_TESTS_FIXTURES_HPP
#define QACAT_TESTS_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qacat/qacat.hpp"

namespace qacat::testing {

inline std::string data_path(const std::string& name) { return std::string(QACAT_DATA_DIR) + "/" + name; }

inline Fact F(const std::string& key, std::vector<std::string> values) { return make_fact(key, std::move(values)); }
inline Fact F(const std::string& key, const char* value) { return make_fact(key, {std::string(value)}); }

inline Assertion A(const std::string& text, std::vector<Fact> facts) { return make_assertion(text, std::move(facts)); }

/// QA rendered from facts.
inline QAPair Q(std::vector<Fact> facts) { return qa_from_facts(facts); }

inline FactSet facts_of(const std::vector<QAPair>& qas) {
  FactSet out;
  for (const auto& q : qas) out = merge_facts(out, q.core.fact_set());
  return out;
}

/// Facts drawn from a small universe: key "k<i>", value "v<j>".
struct RandomFacts {
  std::mt19937_64 rng;
  std::size_t keys;
  std::size_t values;

  RandomFacts(std::uint64_t seed, std::size_t keys_, std::size_t values_) : rng(seed), keys(keys_), values(values_) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng() % n); }

  Fact fact(std::size_t key) {
    std::vector<std::string> vs;
    std::size_t n = 1 + (below(4) == 0 ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) vs.push_back("v" + std::to_string(below(values)));
    return make_fact("k" + std::to_string(key), vs);
  }

  /// Up to `max_size` facts over distinct keys; may be empty when allow_empty.
  FactSet fact_set(std::size_t max_size, bool allow_empty = false) {
    std::size_t lo = allow_empty ? 0 : 1;
    std::size_t n = lo + below(max_size - lo + 1);
    std::vector<std::size_t> ks(keys);
    for (std::size_t i = 0; i < keys; ++i) ks[i] = i;
    for (std::size_t i = keys; i > 1; --i) std::swap(ks[i - 1], ks[below(i)]);
    std::vector<Fact> out;
    for (std::size_t i = 0; i < n && i < keys; ++i) out.push_back(fact(ks[i]));
    return make_fact_set(out);
  }
};

/// A fact-set source document from (id, text, facts, children) rows; the
/// first row is the root.
struct NodeSpec {
  std::string id;
  std::string text;
  std::vector<Fact> facts;
  std::vector<std::string> children;
};

inline SourceDocument make_source(const std::string& id, const std::vector<NodeSpec>& rows) {
  nlohmann::json j;
  j["id"] = id;
  j["root"] = rows.front().id;
  j["nodes"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& f : r.facts) facts.push_back({{"key", f.key}, {"values", f.values}});
    j["nodes"].push_back({{"id", r.id}, {"text", r.text}, {"facts", facts}, {"children", r.children}});
  }
  return parse_synthetic_document(j);
}

inline ProcessedDocument process(const SourceDocument& src) {
  FactSetOracle o;
  return process_document(src, o);
}

inline ProcessedDocument load_processed(const std::string& name) { return process(load_source_document(data_path(name))); }

}  // namespace qacat::testing

#endif  // QACAT_TESTS_FIXTURES_HPP
