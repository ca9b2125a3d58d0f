#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "chordseed/llmgate/openai.hpp"
#include "chordseed/llmgate/provider.hpp"
#include "chordseed/sampler/rejection.hpp"
#include "chordseed/seqmodel/lstm.hpp"
#include "chordseed/server/audit.hpp"
#include "chordseed/server/transcription.hpp"

namespace chordseed::server {

enum class LlmBackend { Mock, OpenAI };
enum class TranscriptionBackend { None, Mock, Http };

/// Service configuration file. Relative paths are resolved against the
/// directory holding the file.
struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;

  LlmBackend llm = LlmBackend::Mock;
  std::filesystem::path llm_fixtures;
  llmgate::ProviderConfig openai;

  TranscriptionBackend transcription = TranscriptionBackend::None;
  std::filesystem::path transcription_fixtures;
  HttpTranscriptionConfig transcription_http;

  std::filesystem::path p_model;
  std::filesystem::path q_model;
  sampler::SamplerConfig sampler;
  /// Calibrated M; when set it overrides sampler.m.
  std::optional<std::filesystem::path> calibration;

  std::filesystem::path audit_dir = "audit";
  int audit_retention_days = 7;
  std::filesystem::path upload_dir = "uploads";
  /// Test-only: honor the X-Chordseed-Seed request header.
  bool allow_seed_header = false;

  static ServerConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ServerConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Everything the HTTP layer needs, built from a ServerConfig.
struct Runtime {
  std::unique_ptr<llmgate::LLMProvider> llm;
  std::unique_ptr<TranscriptionProvider> transcription;  // null when disabled
  std::unique_ptr<seqmodel::LstmModel> p;
  std::unique_ptr<seqmodel::LstmModel> q;
  std::unique_ptr<AuditStore> audit;
  sampler::SamplerConfig sampler;

  static Runtime build(const ServerConfig& config);
};

}  // namespace chordseed::server
