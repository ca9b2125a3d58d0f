#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/llmgate/provider.hpp"

namespace chordseed::llmgate {

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  double temperature = 1.0;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int backoff_ms = 500;
  /// Name of the environment variable holding the API key.
  std::string api_key_env = "OPENAI_API_KEY";

  static ProviderConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Chat-completions client. Transport failures, 429 and 5xx responses are
/// retried `max_retries` times with exponential backoff; other failures throw
/// UpstreamLLMError immediately.
class OpenAIProvider : public LLMProvider {
 public:
  /// Throws Error if the API key variable is unset or the endpoint is not http(s).
  explicit OpenAIProvider(ProviderConfig config);

  std::string complete(const ChatRequest& request) override;

  /// The JSON body sent for `request`.
  nlohmann::json request_body(const ChatRequest& request) const;

 private:
  ProviderConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
};

}  // namespace chordseed::llmgate
