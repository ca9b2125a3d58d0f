#include "chordseed/llmgate/candidates.hpp"

#include <cmath>

#include "chordseed/common/log.hpp"
#include "chordseed/llmgate/prompts.hpp"

namespace chordseed::llmgate {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(kSpace) - first + 1);
}

bool blank(std::string_view s) { return trim(s).empty(); }

void validate(const CandidateRequest& request) {
  if (request.bars == 0) throw InvalidInput("bars must be at least 1");
  if (request.n == 0) throw InvalidInput("N must be at least 1");
  if (!request.key.is_standard()) throw InvalidInput("key " + request.key.to_string() + " is not a supported key");
  bool any = false;
  for (const auto& k : request.keywords) any = any || !blank(k);
  if (!any) throw InvalidInput("at least one keyword is required");
}

ChatRequest make_request(const CandidateRequest& request, std::string tag, std::string system) {
  ChatRequest req;
  req.tag = std::move(tag);
  req.system = std::move(system);
  req.user = render_chord_user_message(request.keywords, request.key, request.mode, request.bars);
  req.model = request.model;
  return req;
}

void log_drops(const std::vector<DroppedLine>& dropped) {
  for (const auto& d : dropped) {
    log(LogLevel::Warn, "dropped candidate line " + std::to_string(d.line) + " \"" + d.text + "\": " + d.reason);
  }
}

}  // namespace

ParsedResponse parse_candidate_lines(std::string_view response, const chordlang::Key& key, chordlang::Mode mode,
                                     std::size_t bars) {
  ParsedResponse out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    std::size_t end = pos;
    std::size_t skip = 0;
    while (end < response.size()) {
      if (response[end] == '\n') {
        skip = 1;
        break;
      }
      if (response[end] == '\\' && end + 1 < response.size() && response[end + 1] == 'n') {
        skip = 2;
        break;
      }
      ++end;
    }
    ++line_no;
    const std::string_view line = trim(response.substr(pos, end - pos));
    if (!line.empty()) {
      try {
        auto p = chordlang::parse_progression(line, key, mode);
        if (p.chords.size() != bars) {
          out.dropped.push_back({line_no, std::string(line),
                                 "expected " + std::to_string(bars) + " chords, found " + std::to_string(p.chords.size())});
        } else {
          out.progressions.push_back(std::move(p));
        }
      } catch (const chordlang::ParseError& e) {
        out.dropped.push_back({line_no, std::string(line), e.what()});
      }
    }
    if (end >= response.size()) break;
    pos = end + skip;
  }
  return out;
}

BatchResult generate_candidates_batch(const CandidateRequest& request, LLMProvider& provider) {
  validate(request);
  const ChatRequest chat = make_request(request, "chords_batch", render_batch_system_prompt(request.n));
  const auto needed = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(request.n)));

  BatchResult best;
  bool any_text = false;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    const std::string reply = provider.complete(chat);
    any_text = any_text || !blank(reply);
    auto parsed = parse_candidate_lines(reply, request.key, request.mode, request.bars);
    log_drops(parsed.dropped);
    if (attempt == 1 || parsed.progressions.size() > best.progressions.size()) {
      best.progressions = std::move(parsed.progressions);
      best.dropped = std::move(parsed.dropped);
    }
    best.attempts = attempt;
    if (best.progressions.size() >= needed) break;
    if (attempt == 1) {
      log(LogLevel::Warn, "only " + std::to_string(best.progressions.size()) + " of " + std::to_string(request.n) +
                              " candidate lines valid; retrying once");
    }
  }
  if (!any_text) throw EmptyResponse("the LLM returned no chord progressions");
  if (best.progressions.empty()) throw AllCandidatesMalformed("every candidate line was malformed");
  if (best.progressions.size() > request.n) best.progressions.resize(request.n);
  return best;
}

chordlang::Progression generate_candidate_single(const CandidateRequest& request, LLMProvider& provider) {
  validate(request);
  const ChatRequest chat = make_request(request, "chords_single", render_single_system_prompt());
  bool any_text = false;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    const std::string reply = provider.complete(chat);
    any_text = any_text || !blank(reply);
    auto parsed = parse_candidate_lines(reply, request.key, request.mode, request.bars);
    log_drops(parsed.dropped);
    if (!parsed.progressions.empty()) return parsed.progressions.front();
  }
  if (!any_text) throw EmptyResponse("the LLM returned no chord progression");
  throw AllCandidatesMalformed("no valid chord progression in the LLM reply");
}

}  // namespace chordseed::llmgate
