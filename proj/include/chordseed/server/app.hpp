#pragma once

#include <filesystem>
#include <string>

#include "chordseed/llmgate/provider.hpp"
#include "chordseed/sampler/rejection.hpp"
#include "chordseed/seqmodel/model.hpp"
#include "chordseed/server/audit.hpp"
#include "chordseed/server/transcription.hpp"

namespace httplib {
class Server;
}

namespace chordseed::server {

inline constexpr const char* kSeedHeader = "X-Chordseed-Seed";

struct AppDeps {
  llmgate::LLMProvider& llm;
  const seqmodel::SequenceModel& p;
  const seqmodel::SequenceModel& q;
  sampler::SamplerConfig sampler;
  TranscriptionProvider* transcription = nullptr;
  AuditStore& audit;
  std::filesystem::path upload_dir;
  bool allow_seed_header = false;
};

/// Routes:
///   POST /keywords    multipart (image, text, user_keywords) or JSON
///   POST /chords      {keywords, key, mode, bars}
///   POST /audio       multipart file upload, returns {audio_id}
///   POST /transcribe  {audio_id|url, start_s, end_s, convert_to_key?}
///   GET  /audit/:id   stored audit record
///   GET  /health
/// Errors come back as {"error": code, "message": text}.
class App {
 public:
  explicit App(AppDeps deps);
  void mount(httplib::Server& server);

 private:
  AppDeps deps_;
};

}  // namespace chordseed::server
