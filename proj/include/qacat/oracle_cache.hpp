#ifndef QACAT_ORACLE_CACHE_HPP
#define QACAT_ORACLE_CACHE_HPP

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qacat/error.hpp"
#include "qacat/text.hpp"

namespace qacat {

inline constexpr std::string_view kPromptTemplateVersion = "qacat-prompts/v1";

/// A rendered prompt: the system text (which starts with "task: <name>") and
/// the JSON user payload.
struct RenderedPrompt {
  std::string system;
  std::string user;

  nlohmann::ordered_json to_json() const { return {{"system", system}, {"user", user}}; }
};

/// Digest over the template version and the rendered prompt. The model name is
/// not part of it, so a cache recorded with one model replays under another.
inline std::string request_digest(const RenderedPrompt& p) {
  nlohmann::ordered_json j = {std::string(kPromptTemplateVersion), p.system, p.user};
  return text::sha256_hex(j.dump());
}

struct CacheRecord {
  std::string request_digest;
  nlohmann::ordered_json request;
  std::string response;
  std::string model_tag;
  std::string created_at;
};

inline nlohmann::ordered_json to_json(const CacheRecord& r) {
  nlohmann::ordered_json j;
  j["request_digest"] = r.request_digest;
  j["request"] = r.request;
  j["response"] = r.response;
  j["model_tag"] = r.model_tag;
  j["created_at"] = r.created_at;
  return j;
}

inline std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CacheStats {
  std::size_t records = 0;
  std::size_t unique = 0;
  std::map<std::string, std::size_t> per_task;
  std::map<std::string, std::size_t> per_model;
};

/// Append-only JSONL store of oracle responses keyed by request digest. The
/// first record for a digest wins. Safe to share between threads.
class OracleCache {
 public:
  OracleCache() = default;

  /// Loads `path` if it exists; new records are appended to it.
  explicit OracleCache(std::string path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    if (!in) fail(ErrorCode::IoError, "cannot read cache '" + path_ + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      try {
        auto j = nlohmann::ordered_json::parse(line);
        CacheRecord r{j.at("request_digest").get<std::string>(), j.at("request"), j.at("response").get<std::string>(),
                      j.value("model_tag", ""), j.value("created_at", "")};
        ++records_;
        entries_.emplace(r.request_digest, std::move(r));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, path_ + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  std::optional<CacheRecord> lookup(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(CacheRecord r) {
    std::lock_guard<std::mutex> lock(mu_);
    if (entries_.count(r.request_digest)) return;
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      if (!out) fail(ErrorCode::IoError, "cannot append to cache '" + path_ + "'");
      out << to_json(r).dump() << '\n';
    }
    ++records_;
    entries_.emplace(r.request_digest, std::move(r));
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

  const std::string& path() const { return path_; }

  CacheStats stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    CacheStats s;
    s.records = records_;
    s.unique = entries_.size();
    for (const auto& [d, r] : entries_) {
      std::string task = "unknown";
      if (r.request.contains("system")) {
        std::string sys = r.request["system"].get<std::string>();
        if (sys.rfind("task: ", 0) == 0) task = sys.substr(6, sys.find('\n') - 6);
      }
      ++s.per_task[task];
      ++s.per_model[r.model_tag];
    }
    return s;
  }

  /// Rewrites the file with one record per digest, sorted by digest.
  void compact() {
    std::lock_guard<std::mutex> lock(mu_);
    if (path_.empty()) return;
    std::string tmp = path_ + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) fail(ErrorCode::IoError, "cannot write '" + tmp + "'");
      for (const auto& [d, r] : entries_) out << to_json(r).dump() << '\n';
    }
    std::filesystem::rename(tmp, path_);
    records_ = entries_.size();
  }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, CacheRecord> entries_;
  std::size_t records_ = 0;
};

}  // namespace qacat

#endif  // QACAT_ORACLE_CACHE_HPP
