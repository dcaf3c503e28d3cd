#ifndef QACAT_LLM_ORACLE_HPP
#define QACAT_LLM_ORACLE_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/oracle.hpp"
#include "qacat/oracle_cache.hpp"

namespace qacat {

/// Sends one chat completion and returns the assistant message text.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const std::string& model, const RenderedPrompt& prompt) = 0;
};

/// Chat-completion request body; temperature 0 for repeatability.
inline nlohmann::ordered_json chat_request(const std::string& model, const RenderedPrompt& p) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", p.system}}, {{"role", "user"}, {"content", p.user}}});
  j["temperature"] = 0;
  return j;
}

namespace prompts {

inline const std::map<std::string, std::string>& instructions() {
  static const std::map<std::string, std::string> m = {
      {"chunk",
       "Split the text into at most `fanout_limit` contiguous, semantically coherent chunks. Copy each chunk "
       "verbatim; together they must cover the text in order. Reply {\"chunks\": [string, ...]}."},
      {"summarize", "Write a one-sentence abstractive summary of the text. Reply {\"summary\": string}."},
      {"core_qas",
       "Split the assertion into sub-statements whose union carries all of its information, one question per "
       "sub-statement. Reply {\"qas\": [{\"question\": string, \"answer\": string, \"statement\": string}]}."},
      {"answers",
       "Can the assertion answer the question, and is its answer consistent with the given answer? Reply "
       "{\"addressable\": bool, \"consistent\": bool}."},
      {"consistent", "Can both assertions be true at once? Reply {\"consistent\": bool}."},
      {"decompose",
       "Decompose two QA pairs into: left = information only in qa1, mid = information in both, right = "
       "information only in qa2. Each piece is {\"question\", \"answer\", \"statement\"}; word left and right statements "
       "with pronouns referring to the shared part. Reply {\"left\": [...], "
       "\"mid\": [...], \"right\": [...]}."},
      {"conserve",
       "Do the pieces together carry exactly the information of the originals, nothing lost and nothing added? "
       "Reply {\"conserved\": bool}."},
      {"probes",
       "List the distinct questions that either assertion can answer, one per piece of information. Reply "
       "{\"questions\": [{\"question\": string, \"answer\": string}]}."},
      {"union",
       "Combine the two QA pairs into one QA pair carrying the information of both; where they disagree, join "
       "the answers with \"or\". Reply {\"question\": string, \"answer\": string, \"statement\": string}."},
  };
  return m;
}

inline RenderedPrompt render(const std::string& task, const nlohmann::ordered_json& payload) {
  return RenderedPrompt{"task: " + task + "\n" + instructions().at(task), payload.dump()};
}

/// Task name from a rendered system prompt.
inline std::string task_of(const RenderedPrompt& p) {
  if (p.system.rfind("task: ", 0) != 0) return "";
  return p.system.substr(6, p.system.find('\n') - 6);
}

inline nlohmann::ordered_json qa_payload(const QAPair& qa) {
  return {{"question", qa.question}, {"answer", qa.answer}, {"statement", qa.core.display()}};
}

inline nlohmann::ordered_json qas_payload(const std::vector<QAPair>& qas) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& q : qas) arr.push_back(qa_payload(q));
  return arr;
}

}  // namespace prompts

struct LlmOptions {
  std::string model;
  bool offline = false;
  std::function<std::string()> clock = utc_timestamp;
};

/// Oracle backed by a chat model. Every request goes through the cache;
/// offline, a cache miss is an OracleFailure.
class LlmOracle final : public SemanticOracle {
 public:
  LlmOracle(std::shared_ptr<ChatTransport> transport, std::shared_ptr<OracleCache> cache, LlmOptions options)
      : transport_(std::move(transport)), cache_(std::move(cache)), options_(std::move(options)) {
    if (!cache_) cache_ = std::make_shared<OracleCache>();
  }

  OracleMode mode() const override { return OracleMode::llm; }
  std::string grader() const override { return "llm:" + options_.model; }

  /// Raw call: cached response text for the prompt.
  std::string call(const RenderedPrompt& p) {
    std::string digest = request_digest(p);
    if (auto hit = cache_->lookup(digest)) return hit->response;
    if (options_.offline || !transport_) {
      fail(ErrorCode::OracleFailure, "cache miss for task '" + prompts::task_of(p) + "' (" + digest.substr(0, 12) +
                                         ") while offline");
    }
    std::string response = transport_->complete(options_.model, p);
    cache_->store(CacheRecord{digest, p.to_json(), response, options_.model, options_.clock()});
    return response;
  }

  nlohmann::json ask(const std::string& task, const nlohmann::ordered_json& payload) {
    RenderedPrompt p = prompts::render(task, payload);
    std::string raw = call(p);
    try {
      auto j = nlohmann::json::parse(extract_json(raw));
      if (!j.is_object()) fail(ErrorCode::OracleFailure, "task '" + task + "' reply is not a JSON object");
      return j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::OracleFailure, "task '" + task + "' reply is not JSON: " + e.what());
    }
  }

  AnswerVerdict answers(const Assertion& a, const QAPair& qa) override {
    auto j = ask("answers", {{"assertion", a.display()}, {"question", qa.question}, {"answer", qa.answer}});
    AnswerVerdict v;
    v.addressable = get_bool(j, "addressable", "answers");
    v.consistent = v.addressable && get_bool(j, "consistent", "answers");
    return v;
  }

  std::set<std::string> question_keys(const Assertion& a) override {
    std::set<std::string> out;
    for (const auto& q : core_qas(a)) out.insert(text::canonical(q.question));
    return out;
  }

  bool consistent(const Assertion& a, const Assertion& b) override {
    return get_bool(ask("consistent", {{"a", a.display()}, {"b", b.display()}}), "consistent", "consistent");
  }

  ChunkResult chunk(std::string_view text, std::size_t fanout_limit) override {
    ChunkResult out;
    if (text::trim(text).empty()) fail(ErrorCode::DegenerateInput, "nothing to chunk");
    if (text::sentence_count(text) <= 1) {
      out.leaf = true;
      out.spans.push_back({0, text.size()});
      return out;
    }
    auto j = ask("chunk", {{"text", std::string(text)}, {"fanout_limit", fanout_limit}});
    if (!j.contains("chunks") || !j["chunks"].is_array() || j["chunks"].empty()) {
      fail(ErrorCode::OracleFailure, "chunk reply lacks 'chunks'");
    }
    std::vector<std::size_t> starts;
    std::size_t cursor = 0;
    for (const auto& c : j["chunks"]) {
      std::string piece = text::trim(c.get<std::string>());
      std::size_t at = text.find(piece, cursor);
      if (piece.empty() || at == std::string_view::npos) fail(ErrorCode::OracleFailure, "chunk not found in text");
      starts.push_back(starts.empty() ? 0 : at);
      cursor = at + piece.size();
    }
    if (starts.size() > fanout_limit) fail(ErrorCode::OracleFailure, "chunker exceeded the fanout limit");
    if (starts.size() == 1) {
      out.leaf = true;
      out.spans.push_back({0, text.size()});
      return out;
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
      std::size_t end = i + 1 < starts.size() ? starts[i + 1] : text.size();
      if (end <= starts[i]) fail(ErrorCode::OracleFailure, "empty chunk");
      out.spans.push_back({starts[i], end});
    }
    return out;
  }

  Assertion summarize_chunk(std::string_view text) override {
    auto j = ask("summarize", {{"text", std::string(text)}});
    return make_assertion(get_string(j, "summary", "summarize"));
  }

  DecompTriple decompose_pair(const QAPair& qa1, const QAPair& qa2, int attempt = 0) override {
    auto j = ask("decompose",
                 {{"qa1", prompts::qa_payload(qa1)}, {"qa2", prompts::qa_payload(qa2)}, {"attempt", attempt}});
    DecompTriple t;
    t.mid = qa_list(j, "mid", "decompose", nullptr);
    for (auto& q : t.mid) {
      if (same_text(q, qa1)) q = qa1;
      else if (same_text(q, qa2)) q = qa2;
    }
    auto condition = [&](const QAPair& other) {
      return std::make_shared<const Assertion>(t.mid.empty() ? other.core : t.mid.front().core);
    };
    t.left = qa_list(j, "left", "decompose", condition(qa2));
    t.right = qa_list(j, "right", "decompose", condition(qa1));
    return t;
  }

  std::vector<QAPair> core_qas(const Assertion& a) override {
    auto out = qa_list(ask("core_qas", {{"assertion", a.display()}}), "qas", "core_qas", nullptr);
    if (out.empty()) fail(ErrorCode::OracleFailure, "no core QAs for '" + a.text + "'");
    return out;
  }

  QAPair unite(const QAPair& qa1, const QAPair& qa2) override {
    auto j = ask("union", {{"qa1", prompts::qa_payload(qa1)}, {"qa2", prompts::qa_payload(qa2)}});
    return parse_qa(j, "union", nullptr);
  }

  std::vector<QAPair> probe_panel(const Assertion& a, const Assertion& b) override {
    auto j = ask("probes", {{"a", a.display()}, {"b", b.display()}});
    if (!j.contains("questions") || !j["questions"].is_array()) fail(ErrorCode::OracleFailure, "probes reply lacks 'questions'");
    std::vector<QAPair> out;
    for (const auto& q : j["questions"]) {
      std::string question = get_string(q, "question", "probes");
      std::string answer = get_string(q, "answer", "probes");
      out.push_back(make_qa(question, answer, make_assertion(answer)));
    }
    return out;
  }

  bool pieces_conserve(const std::vector<QAPair>& originals, const std::vector<QAPair>& pieces,
                       int attempt = 0) override {
    auto j = ask("conserve", {{"originals", prompts::qas_payload(originals)},
                              {"pieces", prompts::qas_payload(pieces)},
                              {"attempt", attempt}});
    return get_bool(j, "conserved", "conserve");
  }

  OracleCache& cache() { return *cache_; }

 private:
  /// Models sometimes wrap JSON in prose or code fences; take the outermost object.
  static std::string extract_json(const std::string& raw) {
    std::size_t b = raw.find('{');
    std::size_t e = raw.rfind('}');
    if (b == std::string::npos || e == std::string::npos || e < b) return raw;
    return raw.substr(b, e - b + 1);
  }

  static bool get_bool(const nlohmann::json& j, const char* key, const char* task) {
    if (!j.contains(key) || !j[key].is_boolean()) {
      fail(ErrorCode::OracleFailure, std::string(task) + " reply lacks boolean '" + key + "'");
    }
    return j[key].get<bool>();
  }

  static std::string get_string(const nlohmann::json& j, const char* key, const char* task) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string() || text::trim(j[key].get<std::string>()).empty()) {
      fail(ErrorCode::OracleFailure, std::string(task) + " reply lacks string '" + key + "'");
    }
    return j[key].get<std::string>();
  }

  static QAPair parse_qa(const nlohmann::json& j, const char* task, std::shared_ptr<const Assertion> condition) {
    Assertion core = make_assertion(get_string(j, "statement", task));
    core.condition = std::move(condition);
    return make_qa(get_string(j, "question", task), get_string(j, "answer", task), std::move(core));
  }

  static std::vector<QAPair> qa_list(const nlohmann::json& j, const char* key, const char* task,
                                     const std::shared_ptr<const Assertion>& condition) {
    if (!j.contains(key) || !j[key].is_array()) {
      fail(ErrorCode::OracleFailure, std::string(task) + " reply lacks list '" + key + "'");
    }
    std::vector<QAPair> out;
    for (const auto& q : j[key]) out.push_back(parse_qa(q, task, condition));
    return out;
  }

  static bool same_text(const QAPair& a, const QAPair& b) {
    return text::canonical(a.question) == text::canonical(b.question) &&
           text::canonical(a.answer) == text::canonical(b.answer);
  }

  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<OracleCache> cache_;
  LlmOptions options_;
};

}  // namespace qacat

#endif  // QACAT_LLM_ORACLE_HPP
