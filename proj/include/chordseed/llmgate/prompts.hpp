#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "chordseed/chordlang/pitch.hpp"

namespace chordseed::llmgate {

enum class PromptId { KeywordExtraction, ChordBatchDiverse, ChordSingleBaseline };

std::string_view prompt_name(PromptId id);

/// Raw template text with `{keyword_list}` or `{N}` placeholders.
std::string_view prompt_template(PromptId id);

/// The music keyword list shipped with the library (style, genre and type lines).
std::string_view default_keyword_list();
std::string load_keyword_list(const std::filesystem::path& path);

std::string render_keyword_system_prompt(std::string_view keyword_list = default_keyword_list());
std::string render_batch_system_prompt(std::size_t n);
std::string render_single_system_prompt();

/// "Image: [attached image] | Text Note: ... | User Keywords: a, b" with absent parts left out.
std::string render_keyword_user_message(bool has_image, std::string_view text_note,
                                        std::span<const std::string> user_keywords);
/// "User keywords: a, b | Key: C | Mode: Maj | Bars: 4"
std::string render_chord_user_message(std::span<const std::string> keywords, const chordlang::Key& key,
                                      chordlang::Mode mode, std::size_t bars);

}  // namespace chordseed::llmgate
