#include "chordseed/llmgate/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "chordseed/llmgate/provider.hpp"

namespace chordseed::llmgate {

namespace detail {
extern const std::string_view kKeywordExtractionTemplate;
extern const std::string_view kChordBatchDiverseTemplate;
extern const std::string_view kChordSingleBaselineTemplate;
extern const std::string_view kKeywordList;
}  // namespace detail

namespace {

std::string replace_all(std::string_view text, std::string_view from, std::string_view to) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = text.find(from, pos);
    if (hit == std::string_view::npos) break;
    out.append(text.substr(pos, hit - pos));
    out.append(to);
    pos = hit + from.size();
  }
  out.append(text.substr(pos));
  return out;
}

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.append(sep);
    out.append(items[i]);
  }
  return out;
}

}  // namespace

std::string_view prompt_name(PromptId id) {
  switch (id) {
    case PromptId::KeywordExtraction: return "keyword_extraction";
    case PromptId::ChordBatchDiverse: return "chord_batch_diverse";
    case PromptId::ChordSingleBaseline: return "chord_single_baseline";
  }
  return "";
}

std::string_view prompt_template(PromptId id) {
  switch (id) {
    case PromptId::KeywordExtraction: return detail::kKeywordExtractionTemplate;
    case PromptId::ChordBatchDiverse: return detail::kChordBatchDiverseTemplate;
    case PromptId::ChordSingleBaseline: return detail::kChordSingleBaselineTemplate;
  }
  return {};
}

std::string_view default_keyword_list() { return detail::kKeywordList; }

std::string load_keyword_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open keyword list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string render_keyword_system_prompt(std::string_view keyword_list) {
  while (!keyword_list.empty() && (keyword_list.back() == '\n' || keyword_list.back() == '\r')) {
    keyword_list.remove_suffix(1);
  }
  return replace_all(prompt_template(PromptId::KeywordExtraction), "{keyword_list}", keyword_list);
}

std::string render_batch_system_prompt(std::size_t n) {
  if (n == 0) throw InvalidInput("N must be at least 1");
  return replace_all(prompt_template(PromptId::ChordBatchDiverse), "{N}", std::to_string(n));
}

std::string render_single_system_prompt() { return std::string(prompt_template(PromptId::ChordSingleBaseline)); }

std::string render_keyword_user_message(bool has_image, std::string_view text_note,
                                        std::span<const std::string> user_keywords) {
  std::vector<std::string> parts;
  if (has_image) parts.emplace_back("Image: [attached image]");
  if (!text_note.empty()) parts.push_back("Text Note: " + std::string(text_note));
  if (!user_keywords.empty()) parts.push_back("User Keywords: " + join(user_keywords, ", "));
  return join(parts, " | ");
}

std::string render_chord_user_message(std::span<const std::string> keywords, const chordlang::Key& key,
                                      chordlang::Mode mode, std::size_t bars) {
  return "User keywords: " + join(keywords, ", ") + " | Key: " + key.to_string() +
         " | Mode: " + std::string(chordlang::mode_name(mode)) + " | Bars: " + std::to_string(bars);
}

}  // namespace chordseed::llmgate
