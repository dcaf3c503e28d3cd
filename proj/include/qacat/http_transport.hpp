#ifndef QACAT_HTTP_TRANSPORT_HPP
#define QACAT_HTTP_TRANSPORT_HPP

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qacat/llm_oracle.hpp"

namespace qacat {

struct EndpointConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
};

/// OpenAI-style chat completions over HTTP(S).
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(EndpointConfig config) : config_(std::move(config)) {
    if (!config_.api_key_env.empty()) {
      if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    }
  }

  std::string complete(const std::string& model, const RenderedPrompt& prompt) override {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    std::string body = chat_request(model, prompt).dump();
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      fail(ErrorCode::OracleFailure, "request to " + config_.base_url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      fail(ErrorCode::OracleFailure, "endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::OracleFailure, std::string("malformed completion: ") + e.what());
    }
  }

 private:
  EndpointConfig config_;
  std::string api_key_;
};

}  // namespace qacat

#endif  // QACAT_HTTP_TRANSPORT_HPP
