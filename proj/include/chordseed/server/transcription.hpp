#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chordseed/chordlang/pitch.hpp"
#include "chordseed/common/error.hpp"

namespace chordseed::server {

inline constexpr double kMaxSegmentSeconds = 30.0;

class TranscriptionError : public Error {
 public:
  using Error::Error;
};

/// Audio to transcribe: an uploaded file id or an external URL, and a window.
struct AudioSegment {
  std::optional<std::string> audio_id;
  std::optional<std::string> url;
  double start_s = 0.0;
  double end_s = 0.0;

  /// Throws InvalidSegment unless exactly one reference is set,
  /// 0 <= start < end and the window is at most 30 s long.
  void validate() const;
};

class InvalidSegment : public Error {
 public:
  using Error::Error;
};

struct TimedChord {
  std::string symbol;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct Transcription {
  chordlang::Key key;
  chordlang::Mode mode = chordlang::Mode::Maj;
  std::vector<TimedChord> chords;

  nlohmann::json to_json() const;
  /// Throws TranscriptionError for missing fields, an unknown key or mode, or
  /// an unparseable chord symbol.
  static Transcription from_json(const nlohmann::json& j);
};

class TranscriptionProvider {
 public:
  virtual ~TranscriptionProvider() = default;
  virtual Transcription transcribe(const AudioSegment& segment) = 0;
};

/// Serves `<audio_id>.json` from a fixture directory, falling back to
/// `default.json`. Chords outside the window are dropped and the rest clipped
/// to it.
class MockTranscriptionProvider : public TranscriptionProvider {
 public:
  explicit MockTranscriptionProvider(std::filesystem::path dir);
  Transcription transcribe(const AudioSegment& segment) override;

 private:
  std::filesystem::path dir_;
};

struct HttpTranscriptionConfig {
  std::string endpoint;
  double timeout_seconds = 60.0;
  std::string api_key_env = "TRANSCRIPTION_API_KEY";

  static HttpTranscriptionConfig from_json(const nlohmann::json& j);
};

/// Posts {audio_id|url, start_s, end_s} as JSON and expects a transcription
/// body back. Fetching audio behind a URL is left to the remote service.
class HttpTranscriptionProvider : public TranscriptionProvider {
 public:
  explicit HttpTranscriptionProvider(HttpTranscriptionConfig config);
  Transcription transcribe(const AudioSegment& segment) override;

 private:
  HttpTranscriptionConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
};

/// Moves every chord (root and bass) from the detected tonic to `target`.
/// The mode only labels the result; roots shift by the tonic interval.
Transcription convert_to_key(const Transcription& t, const chordlang::Key& target, chordlang::Mode mode);

}  // namespace chordseed::server
