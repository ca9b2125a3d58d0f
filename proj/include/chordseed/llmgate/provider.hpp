#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/common/error.hpp"

namespace chordseed::llmgate {

class UpstreamLLMError : public Error {
 public:
  using Error::Error;
};
class EmptyResponse : public Error {
 public:
  using Error::Error;
};
class AllCandidatesMalformed : public Error {
 public:
  using Error::Error;
};
class InvalidInput : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kMaxImageBytes = 8u * 1024u * 1024u;

struct ImagePayload {
  std::string base64;
  std::string mime = "image/png";
};

struct ChatRequest {
  /// Prompt family: "keywords", "chords_batch" or "chords_single".
  std::string tag;
  std::string system;
  std::string user;
  std::optional<ImagePayload> image;
  std::string model;
};

/// {system, user, image?} as the JSON whose compact dump is hashed for fixture lookup.
nlohmann::json canonical_request(const ChatRequest& request);
std::string request_hash(const ChatRequest& request);

/// A chat-completion backend. Implementations must be callable concurrently.
class LLMProvider {
 public:
  virtual ~LLMProvider() = default;
  /// The assistant message text. Throws UpstreamLLMError when the backend fails.
  virtual std::string complete(const ChatRequest& request) = 0;
};

}  // namespace chordseed::llmgate
