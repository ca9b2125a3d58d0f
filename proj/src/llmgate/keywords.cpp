#include "chordseed/llmgate/keywords.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "chordseed/common/encoding.hpp"
#include "chordseed/llmgate/prompts.hpp"

namespace chordseed::llmgate {

std::string_view origin_name(KeywordOrigin o) { return o == KeywordOrigin::UserWritten ? "user_written" : "llm_suggested"; }

std::string fold_keyword(std::string_view text) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && is_space(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool KeywordSet::add(std::string_view text, KeywordOrigin origin) {
  std::string folded = fold_keyword(text);
  if (folded.empty()) return false;
  if (std::any_of(items_.begin(), items_.end(), [&](const Keyword& k) { return k.text == folded; })) return false;
  items_.push_back({std::move(folded), origin});
  return true;
}

std::vector<std::string> KeywordSet::texts() const {
  std::vector<std::string> out;
  for (const auto& k : items_) out.push_back(k.text);
  return out;
}

nlohmann::json KeywordSet::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& k : items_) arr.push_back({{"text", k.text}, {"origin", std::string(origin_name(k.origin))}});
  return arr;
}

std::vector<std::string> parse_keyword_response(std::string_view response) {
  KeywordSet set;
  std::size_t start = 0;
  while (start <= response.size()) {
    auto comma = response.find(',', start);
    if (comma == std::string_view::npos) comma = response.size();
    set.add(response.substr(start, comma - start), KeywordOrigin::LlmSuggested);
    start = comma + 1;
  }
  return set.texts();
}

KeywordSet extract_keywords(const KeywordInput& input, LLMProvider& provider, const KeywordOptions& options) {
  const bool has_text = input.text && !fold_keyword(*input.text).empty();
  std::vector<std::string> user;
  for (const auto& k : input.user_keywords) {
    if (!fold_keyword(k).empty()) user.push_back(fold_keyword(k));
  }
  if (!input.image && !has_text && user.empty()) throw InvalidInput("provide an image, a text note or keywords");
  if (input.image && input.image->size() > kMaxImageBytes) throw InvalidInput("image exceeds the 8 MB limit");

  ChatRequest req;
  req.tag = "keywords";
  req.system = options.keyword_list.empty() ? render_keyword_system_prompt()
                                            : render_keyword_system_prompt(options.keyword_list);
  req.user = render_keyword_user_message(input.image.has_value(), has_text ? *input.text : "", user);
  if (input.image) req.image = ImagePayload{base64_encode(*input.image), input.image_mime};
  req.model = options.model;

  const auto suggested = parse_keyword_response(provider.complete(req));
  if (suggested.empty()) throw EmptyResponse("the LLM returned no keywords");
  KeywordSet out;
  for (const auto& k : user) out.add(k, KeywordOrigin::UserWritten);
  for (const auto& k : suggested) out.add(k, KeywordOrigin::LlmSuggested);
  return out;
}

}  // namespace chordseed::llmgate
