#ifndef QACAT_CONFIG_HPP
#define QACAT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "qacat/http_transport.hpp"
#include "qacat/oracle_cache.hpp"
#include "qacat/pipeline.hpp"

namespace qacat {

struct Config {
  OracleMode mode = OracleMode::fact_set;
  EndpointConfig endpoint;
  std::string cache_path;
  std::uint64_t seed = 0;
  std::size_t fanout_limit = 5;
  std::size_t max_rounds = 3;
  std::size_t lattice_limit = 4096;
  std::string out_dir = "out";
  bool offline = false;

  PipelineOptions pipeline() const {
    PipelineOptions p;
    p.fanout_limit = fanout_limit;
    p.ortho.max_rounds = max_rounds;
    return p;
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail(ErrorCode::ConfigError, "unknown key '" + k + "' in " + where);
  }
}

template <class T>
T config_value(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::ConfigError, std::string("bad value for '") + key + "' in " + where);
  }
}

}  // namespace detail

/// Reads a config object; unknown keys and ill-typed values are errors.
inline Config parse_config(const nlohmann::json& j, Config base = {}) {
  detail::reject_unknown(j,
                         {"mode", "endpoint", "cache", "seed", "fanout_limit", "max_rounds", "lattice_limit", "out",
                          "offline"},
                         "config");
  Config c = std::move(base);
  if (j.contains("mode")) c.mode = parse_mode(detail::config_value<std::string>(j, "mode", "config"));
  if (j.contains("endpoint")) {
    const auto& e = j["endpoint"];
    detail::reject_unknown(e, {"base_url", "path", "model", "api_key_env", "timeout_seconds"}, "endpoint");
    if (e.contains("base_url")) c.endpoint.base_url = detail::config_value<std::string>(e, "base_url", "endpoint");
    if (e.contains("path")) c.endpoint.path = detail::config_value<std::string>(e, "path", "endpoint");
    if (e.contains("model")) c.endpoint.model = detail::config_value<std::string>(e, "model", "endpoint");
    if (e.contains("api_key_env")) c.endpoint.api_key_env = detail::config_value<std::string>(e, "api_key_env", "endpoint");
    if (e.contains("timeout_seconds")) c.endpoint.timeout_seconds = detail::config_value<int>(e, "timeout_seconds", "endpoint");
  }
  if (j.contains("cache")) c.cache_path = detail::config_value<std::string>(j, "cache", "config");
  if (j.contains("seed")) c.seed = detail::config_value<std::uint64_t>(j, "seed", "config");
  if (j.contains("fanout_limit")) c.fanout_limit = detail::config_value<std::size_t>(j, "fanout_limit", "config");
  if (j.contains("max_rounds")) c.max_rounds = detail::config_value<std::size_t>(j, "max_rounds", "config");
  if (j.contains("lattice_limit")) c.lattice_limit = detail::config_value<std::size_t>(j, "lattice_limit", "config");
  if (j.contains("out")) c.out_dir = detail::config_value<std::string>(j, "out", "config");
  if (j.contains("offline")) c.offline = detail::config_value<bool>(j, "offline", "config");
  return c;
}

inline Config load_config(const std::string& path, Config base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.detail());
  }
  return parse_config(j, std::move(base));
}

/// Checks cross-field constraints before any stage runs.
inline void validate(const Config& c) {
  if (c.fanout_limit < 2) fail(ErrorCode::ConfigError, "fanout_limit must be at least 2");
  if (c.max_rounds < 1) fail(ErrorCode::ConfigError, "max_rounds must be at least 1");
  if (c.lattice_limit < 1) fail(ErrorCode::ConfigError, "lattice_limit must be at least 1");
  if (c.endpoint.timeout_seconds < 1) fail(ErrorCode::ConfigError, "timeout_seconds must be at least 1");
  if (c.mode == OracleMode::llm && c.offline && c.cache_path.empty()) {
    fail(ErrorCode::ConfigError, "offline llm mode needs a cache");
  }
}

/// Settings that influence results; paths and the offline switch are left out.
inline nlohmann::ordered_json config_identity(const Config& c) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["fanout_limit"] = c.fanout_limit;
  j["max_rounds"] = c.max_rounds;
  j["lattice_limit"] = c.lattice_limit;
  if (c.mode == OracleMode::llm) j["model"] = c.endpoint.model;
  return j;
}

inline std::string config_digest(const Config& c) { return text::sha256_hex(config_identity(c).dump()); }

}  // namespace qacat

#endif  // QACAT_CONFIG_HPP
