#include "chordseed/llmgate/openai.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chordseed/common/log.hpp"

namespace chordseed::llmgate {

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j) {
  ProviderConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.temperature = j.value("temperature", c.temperature);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  return c;
}

nlohmann::json ProviderConfig::to_json() const {
  return {{"endpoint", endpoint},       {"model", model},           {"temperature", temperature},
          {"timeout_seconds", timeout_seconds}, {"max_retries", max_retries}, {"backoff_ms", backoff_ms},
          {"api_key_env", api_key_env}};
}

OpenAIProvider::OpenAIProvider(ProviderConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw Error("environment variable " + config_.api_key_env + " is not set");
  api_key_ = key;
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint must be an http(s) URL: " + config_.endpoint);
  const std::string scheme = config_.endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw Error("endpoint must be an http(s) URL: " + config_.endpoint);
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  origin_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

nlohmann::json OpenAIProvider::request_body(const ChatRequest& request) const {
  nlohmann::json user;
  if (request.image) {
    user = nlohmann::json::array(
        {{{"type", "text"}, {"text", request.user}},
         {{"type", "image_url"},
          {"image_url", {{"url", "data:" + request.image->mime + ";base64," + request.image->base64}}}}});
  } else {
    user = request.user;
  }
  return {{"model", request.model.empty() ? config_.model : request.model},
          {"temperature", config_.temperature},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", user}}})}};
}

std::string OpenAIProvider::complete(const ChatRequest& request) {
  const std::string body = request_body(request).dump();
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout - sec);
  client.set_connection_timeout(sec.count(), usec.count());
  client.set_read_timeout(sec.count(), usec.count());
  client.set_write_timeout(sec.count(), usec.count());
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(config_.backoff_ms) << (attempt - 1)));
    }
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw UpstreamLLMError("LLM endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
    } else {
      try {
        const auto reply = nlohmann::json::parse(res->body);
        const auto& content = reply.at("choices").at(0).at("message").at("content");
        return content.is_null() ? std::string() : content.get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw UpstreamLLMError(std::string("unexpected LLM response shape: ") + e.what());
      }
    }
    log(LogLevel::Warn, "LLM request attempt " + std::to_string(attempt + 1) + " failed: " + last_error);
  }
  throw UpstreamLLMError("LLM request failed after " + std::to_string(config_.max_retries + 1) +
                         " attempts: " + last_error);
}

}  // namespace chordseed::llmgate
