#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/llmgate/provider.hpp"

namespace chordseed::llmgate {

enum class KeywordOrigin { LlmSuggested, UserWritten };
std::string_view origin_name(KeywordOrigin o);

struct Keyword {
  std::string text;
  KeywordOrigin origin = KeywordOrigin::LlmSuggested;
  friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// Lowercase, trimmed, duplicate-free keywords in insertion order.
class KeywordSet {
 public:
  KeywordSet() = default;
  /// Returns false (and keeps the first origin) when `text` folds to an existing keyword or to "".
  bool add(std::string_view text, KeywordOrigin origin);

  const std::vector<Keyword>& items() const { return items_; }
  std::vector<std::string> texts() const;
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  nlohmann::json to_json() const;

 private:
  std::vector<Keyword> items_;
};

/// Trim and ASCII lowercase.
std::string fold_keyword(std::string_view text);

/// Comma-split, folded, deduplicated keywords of an LLM reply.
std::vector<std::string> parse_keyword_response(std::string_view response);

struct KeywordInput {
  /// Raw image bytes; base64-encoded before sending.
  std::optional<std::string> image;
  std::string image_mime = "image/png";
  std::optional<std::string> text;
  std::vector<std::string> user_keywords;
};

struct KeywordOptions {
  std::string keyword_list;  // empty: the shipped list
  std::string model;
};

/// User keywords first (user_written), then the LLM's additions (llm_suggested).
/// Throws InvalidInput with no input or an image over 8 MB, EmptyResponse when
/// the reply holds no keyword, and propagates UpstreamLLMError.
KeywordSet extract_keywords(const KeywordInput& input, LLMProvider& provider, const KeywordOptions& options = {});

}  // namespace chordseed::llmgate
