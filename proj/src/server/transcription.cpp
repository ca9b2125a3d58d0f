#include "chordseed/server/transcription.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chordseed/chordlang/progression.hpp"

namespace chordseed::server {

namespace cl = chordseed::chordlang;

void AudioSegment::validate() const {
  if (audio_id.has_value() == url.has_value()) throw InvalidSegment("give exactly one of audio_id or url");
  if (!(start_s >= 0.0)) throw InvalidSegment("start_s must be >= 0");
  if (!(end_s > start_s)) throw InvalidSegment("end_s must be greater than start_s");
  if (end_s - start_s > kMaxSegmentSeconds) throw InvalidSegment("segment is longer than 30 seconds");
}

nlohmann::json Transcription::to_json() const {
  nlohmann::json chords_json = nlohmann::json::array();
  for (const auto& c : chords) chords_json.push_back({{"symbol", c.symbol}, {"start_s", c.start_s}, {"end_s", c.end_s}});
  return {{"key", key.to_string()}, {"mode", cl::mode_name(mode)}, {"chords", chords_json}};
}

Transcription Transcription::from_json(const nlohmann::json& j) {
  Transcription t;
  try {
    const auto key = cl::parse_key(j.at("key").get<std::string>(), false);
    const auto mode = cl::parse_mode(j.at("mode").get<std::string>());
    if (!key || !mode) throw TranscriptionError("transcription has an unknown key or mode");
    t.key = *key;
    t.mode = *mode;
    for (const auto& c : j.at("chords")) {
      TimedChord tc{c.at("symbol").get<std::string>(), c.at("start_s").get<double>(), c.at("end_s").get<double>()};
      tc.symbol = cl::canonicalize(tc.symbol);
      t.chords.push_back(std::move(tc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TranscriptionError(std::string("malformed transcription: ") + e.what());
  } catch (const cl::ParseError& e) {
    throw TranscriptionError(std::string("transcription holds an unreadable chord: ") + e.what());
  }
  return t;
}

MockTranscriptionProvider::MockTranscriptionProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

Transcription MockTranscriptionProvider::transcribe(const AudioSegment& segment) {
  std::filesystem::path file;
  if (segment.audio_id && segment.audio_id->find_first_of("/\\.") == std::string::npos) {
    file = dir_ / (*segment.audio_id + ".json");
  }
  if (file.empty() || !std::filesystem::exists(file)) file = dir_ / "default.json";
  std::ifstream in(file);
  if (!in) throw TranscriptionError("no transcription fixture at " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw TranscriptionError("bad fixture " + file.string() + ": " + e.what());
  }
  auto full = Transcription::from_json(j);
  Transcription out{full.key, full.mode, {}};
  for (auto& c : full.chords) {
    if (c.end_s <= segment.start_s || c.start_s >= segment.end_s) continue;
    c.start_s = std::max(c.start_s, segment.start_s);
    c.end_s = std::min(c.end_s, segment.end_s);
    out.chords.push_back(std::move(c));
  }
  return out;
}

HttpTranscriptionConfig HttpTranscriptionConfig::from_json(const nlohmann::json& j) {
  HttpTranscriptionConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  return c;
}

HttpTranscriptionProvider::HttpTranscriptionProvider(HttpTranscriptionConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw Error("transcription endpoint must be an http(s) URL");
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  origin_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

Transcription HttpTranscriptionProvider::transcribe(const AudioSegment& segment) {
  nlohmann::json body{{"start_s", segment.start_s}, {"end_s", segment.end_s}};
  if (segment.audio_id) body["audio_id"] = *segment.audio_id;
  if (segment.url) body["url"] = *segment.url;

  httplib::Client client(origin_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TranscriptionError("transcription service unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TranscriptionError("transcription service returned HTTP " + std::to_string(res->status));
  try {
    return Transcription::from_json(nlohmann::json::parse(res->body));
  } catch (const nlohmann::json::exception& e) {
    throw TranscriptionError(std::string("transcription service sent invalid JSON: ") + e.what());
  }
}

Transcription convert_to_key(const Transcription& t, const cl::Key& target, cl::Mode mode) {
  Transcription out{target, mode, {}};
  for (const auto& c : t.chords) {
    const auto moved = cl::transpose_chord(cl::parse_chord(c.symbol), t.key, target);
    out.chords.push_back({cl::render_chord(moved), c.start_s, c.end_s});
  }
  return out;
}

}  // namespace chordseed::server
