#include "chordseed/server/app.hpp"

#include <fstream>
#include <random>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chordseed/chordlang/progression.hpp"
#include "chordseed/common/digest.hpp"
#include "chordseed/common/encoding.hpp"
#include "chordseed/common/log.hpp"
#include "chordseed/llmgate/candidates.hpp"
#include "chordseed/llmgate/keywords.hpp"
#include "chordseed/sampler/suggest.hpp"

namespace chordseed::server {

namespace cl = chordseed::chordlang;
namespace lg = chordseed::llmgate;
using nlohmann::json;

namespace {

// Thrown inside handlers to produce an error response.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
  send_json(res, e.status, {{"error", e.code}, {"message", e.message}});
}

// Runs `body`, mapping domain errors onto status codes.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const HttpError& e) {
    send_error(res, e);
  } catch (const lg::InvalidInput& e) {
    send_error(res, {400, "invalid_input", e.what()});
  } catch (const InvalidSegment& e) {
    send_error(res, {400, "invalid_segment", e.what()});
  } catch (const lg::UpstreamLLMError& e) {
    send_error(res, {502, "upstream_llm_error", e.what()});
  } catch (const lg::EmptyResponse& e) {
    send_error(res, {502, "empty_response", e.what()});
  } catch (const TranscriptionError& e) {
    send_error(res, {502, "transcription_error", e.what()});
  } catch (const lg::AllCandidatesMalformed& e) {
    send_error(res, {500, "all_candidates_malformed", e.what()});
  } catch (const std::exception& e) {
    log(LogLevel::Error, std::string("request failed: ") + e.what());
    send_error(res, {500, "internal_error", e.what()});
  }
}

json parse_body(const httplib::Request& req) {
  const auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw HttpError{400, "invalid_json", "request body must be a JSON object"};
  return j;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    const auto piece = s.substr(start, comma - start);
    const auto b = piece.find_first_not_of(" \t\r\n");
    if (b != std::string::npos) out.push_back(piece.substr(b, piece.find_last_not_of(" \t\r\n") - b + 1));
    start = comma + 1;
  }
  return out;
}

template <typename T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw HttpError{400, "invalid_request", std::string("missing or mistyped field '") + name + "'"};
  }
}

lg::KeywordInput keyword_input(const httplib::Request& req) {
  lg::KeywordInput in;
  if (req.is_multipart_form_data()) {
    if (req.has_file("image")) {
      const auto f = req.get_file_value("image");
      in.image = f.content;
      if (!f.content_type.empty()) in.image_mime = f.content_type;
    }
    if (req.has_file("text") && !req.get_file_value("text").content.empty()) in.text = req.get_file_value("text").content;
    for (const auto& f : req.get_file_values("user_keywords")) {
      for (auto& k : split_commas(f.content)) in.user_keywords.push_back(std::move(k));
    }
    return in;
  }
  const auto j = parse_body(req);
  if (j.contains("text") && !j.at("text").is_null()) in.text = field<std::string>(j, "text");
  if (j.contains("user_keywords")) in.user_keywords = field<std::vector<std::string>>(j, "user_keywords");
  if (j.contains("image_base64")) {
    try {
      in.image = base64_decode(field<std::string>(j, "image_base64"));
    } catch (const std::invalid_argument&) {
      throw HttpError{400, "invalid_image", "image_base64 is not valid base64"};
    }
    in.image_mime = j.value("image_mime", in.image_mime);
  }
  return in;
}

}  // namespace

App::App(AppDeps deps) : deps_(std::move(deps)) { deps_.sampler.validate(); }

void App::mount(httplib::Server& server) {
  // Leave headroom above the image limit so oversize uploads get a JSON 413.
  server.set_payload_max_length(4 * lg::kMaxImageBytes);

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

  server.Post("/keywords", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto in = keyword_input(req);
      if (in.image && in.image->size() > lg::kMaxImageBytes) {
        throw HttpError{413, "image_too_large", "images are limited to 8 MB"};
      }
      if (!in.image && !in.text && in.user_keywords.empty()) {
        throw HttpError{400, "no_input", "send an image, a text note or keywords"};
      }
      const auto set = lg::extract_keywords(in, deps_.llm);
      send_json(res, 200, {{"keywords", set.to_json()}});
    });
  });

  server.Post("/chords", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto j = parse_body(req);
      const auto keywords = field<std::vector<std::string>>(j, "keywords");
      const auto key = cl::parse_key(field<std::string>(j, "key"));
      if (!key) throw HttpError{400, "invalid_key", "unknown key: " + j.at("key").get<std::string>()};
      const auto mode = cl::parse_mode(field<std::string>(j, "mode"));
      if (!mode) throw HttpError{400, "invalid_mode", "unknown mode: " + j.at("mode").get<std::string>()};
      const auto bars = field<long>(j, "bars");
      if (bars != 3 && bars != 4) throw HttpError{400, "invalid_bars", "bars must be 3 or 4"};

      std::uint64_t seed = std::random_device{}();
      seed = (seed << 32) ^ std::random_device{}();
      bool seeded = false;
      if (deps_.allow_seed_header && req.has_header(kSeedHeader)) {
        try {
          seed = std::stoull(req.get_header_value(kSeedHeader));
          seeded = true;
        } catch (const std::exception&) {
          throw HttpError{400, "invalid_seed", "seed header must be an unsigned integer"};
        }
      }
      std::mt19937_64 rng(seed);
      const auto result = sampler::generate_suggestions(
          keywords, *key, *mode, static_cast<std::size_t>(bars),
          sampler::SuggestDeps{deps_.llm, deps_.p, deps_.q, deps_.sampler, rng, ""});

      json suggestions = json::array();
      for (std::size_t i = 0; i < result.set.suggestions.size(); ++i) {
        suggestions.push_back({{"chords", cl::chord_tokens(result.set.suggestions[i])},
                               {"provenance", sampler::provenance_name(result.set.provenance[i])},
                               {"ratio", result.set.ratios[i]}});
      }
      const auto audit_id = new_audit_id();
      json audit_records = json::array();
      for (const auto& r : result.set.audit) audit_records.push_back(r.to_json());
      json dropped = json::array();
      for (const auto& d : result.dropped) dropped.push_back({{"line", d.line}, {"text", d.text}, {"reason", d.reason}});
      json record{{"endpoint", "/chords"},
                  {"request", {{"keywords", keywords}, {"key", key->to_string()}, {"mode", cl::mode_name(*mode)}, {"bars", bars}}},
                  {"sampler", deps_.sampler.to_json()},
                  {"suggestions", suggestions},
                  {"candidates", audit_records},
                  {"dropped", dropped},
                  {"warnings", result.set.warnings},
                  {"llm_attempts", result.llm_attempts}};
      if (seeded) record["seed"] = seed;
      deps_.audit.append(audit_id, std::move(record));

      send_json(res, 200,
                {{"suggestions", suggestions},
                 {"audit_id", audit_id},
                 {"key", key->to_string()},
                 {"mode", cl::mode_name(*mode)},
                 {"bars", bars},
                 {"warnings", result.set.warnings}});
    });
  });

  server.Post("/audio", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!req.is_multipart_form_data() || !req.has_file("file")) {
        throw HttpError{400, "no_file", "upload the audio as multipart field 'file'"};
      }
      const auto& content = req.get_file_value("file").content;
      if (content.empty()) throw HttpError{400, "no_file", "uploaded file is empty"};
      const auto id = sha256_hex(content).substr(0, 32);
      std::filesystem::create_directories(deps_.upload_dir);
      std::ofstream out(deps_.upload_dir / (id + ".bin"), std::ios::binary);
      out << content;
      if (!out) throw Error("cannot store upload");
      send_json(res, 200, {{"audio_id", id}, {"bytes", content.size()}});
    });
  });

  server.Post("/transcribe", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto j = parse_body(req);
      AudioSegment seg;
      if (j.contains("audio_id")) seg.audio_id = field<std::string>(j, "audio_id");
      if (j.contains("url")) seg.url = field<std::string>(j, "url");
      seg.start_s = field<double>(j, "start_s");
      seg.end_s = field<double>(j, "end_s");
      seg.validate();

      std::optional<std::pair<cl::Key, cl::Mode>> target;
      if (j.contains("convert_to_key") && !j.at("convert_to_key").is_null()) {
        const auto& t = j.at("convert_to_key");
        const auto key = t.is_object() ? cl::parse_key(field<std::string>(t, "key")) : std::nullopt;
        const auto mode = t.is_object() ? cl::parse_mode(field<std::string>(t, "mode")) : std::nullopt;
        if (!key || !mode) throw HttpError{400, "invalid_key", "convert_to_key needs a valid key and mode"};
        target = {*key, *mode};
      }
      if (deps_.transcription == nullptr) {
        throw HttpError{501, "transcription_unavailable", "no transcription provider is configured"};
      }
      const auto t = deps_.transcription->transcribe(seg);
      const auto chords_json = t.to_json().at("chords");
      json body{{"detected_key", {{"key", t.key.to_string()}, {"mode", cl::mode_name(t.mode)}}},
                {"chords", chords_json},
                {"converted", nullptr}};
      if (target) {
        const auto c = convert_to_key(t, target->first, target->second);
        body["converted"] = {{"key", c.key.to_string()}, {"mode", cl::mode_name(c.mode)}, {"chords", c.to_json().at("chords")}};
      }
      send_json(res, 200, body);
    });
  });

  server.Get(R"(/audit/([0-9a-f]{32}))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto rec = deps_.audit.find(req.matches[1]);
      if (!rec) throw HttpError{404, "not_found", "no audit record with that id"};
      send_json(res, 200, *rec);
    });
  });
}

}  // namespace chordseed::server
