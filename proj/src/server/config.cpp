#include "chordseed/server/config.hpp"

#include <fstream>

#include "chordseed/llmgate/mock.hpp"
#include "chordseed/sampler/calibration.hpp"
#include "chordseed/seqmodel/artifact.hpp"

namespace chordseed::server {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ServerConfig ServerConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  ServerConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);

    const auto& llm = j.value("llm", nlohmann::json::object());
    const auto llm_provider = llm.value("provider", std::string("mock"));
    if (llm_provider == "mock") {
      c.llm = LlmBackend::Mock;
    } else if (llm_provider == "openai") {
      c.llm = LlmBackend::OpenAI;
    } else {
      throw Error("unknown llm provider: " + llm_provider);
    }
    if (llm.contains("fixtures")) c.llm_fixtures = resolve(base, llm.at("fixtures").get<std::string>());
    if (llm.contains("openai")) c.openai = llmgate::ProviderConfig::from_json(llm.at("openai"));

    const auto& tr = j.value("transcription", nlohmann::json::object());
    const auto tr_provider = tr.value("provider", std::string("none"));
    if (tr_provider == "none") {
      c.transcription = TranscriptionBackend::None;
    } else if (tr_provider == "mock") {
      c.transcription = TranscriptionBackend::Mock;
    } else if (tr_provider == "http") {
      c.transcription = TranscriptionBackend::Http;
    } else {
      throw Error("unknown transcription provider: " + tr_provider);
    }
    if (tr.contains("fixtures")) c.transcription_fixtures = resolve(base, tr.at("fixtures").get<std::string>());
    if (tr.contains("http")) c.transcription_http = HttpTranscriptionConfig::from_json(tr.at("http"));

    const auto& models = j.at("models");
    c.p_model = resolve(base, models.at("p").get<std::string>());
    c.q_model = resolve(base, models.at("q").get<std::string>());
    if (j.contains("sampler")) c.sampler = sampler::SamplerConfig::from_json(j.at("sampler"));
    if (j.contains("calibration") && !j.at("calibration").is_null()) {
      c.calibration = resolve(base, j.at("calibration").get<std::string>());
    }

    const auto& audit = j.value("audit", nlohmann::json::object());
    c.audit_dir = resolve(base, audit.value("dir", std::string("audit")));
    c.audit_retention_days = audit.value("retention_days", c.audit_retention_days);
    c.upload_dir = resolve(base, j.value("upload_dir", std::string("uploads")));
    c.allow_seed_header = j.value("allow_seed_header", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad server config: ") + e.what());
  }
  if (c.llm == LlmBackend::Mock && c.llm_fixtures.empty()) throw Error("mock llm provider needs llm.fixtures");
  if (c.transcription == TranscriptionBackend::Mock && c.transcription_fixtures.empty()) {
    throw Error("mock transcription provider needs transcription.fixtures");
  }
  return c;
}

ServerConfig ServerConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json ServerConfig::to_json() const {
  nlohmann::json j;
  j["host"] = host;
  j["port"] = port;
  j["llm"] = {{"provider", llm == LlmBackend::Mock ? "mock" : "openai"},
              {"fixtures", llm_fixtures.string()},
              {"openai", openai.to_json()}};
  const char* tr = transcription == TranscriptionBackend::None ? "none"
                   : transcription == TranscriptionBackend::Mock ? "mock"
                                                                 : "http";
  j["transcription"] = {{"provider", tr},
                        {"fixtures", transcription_fixtures.string()},
                        {"http",
                         {{"endpoint", transcription_http.endpoint},
                          {"timeout_seconds", transcription_http.timeout_seconds},
                          {"api_key_env", transcription_http.api_key_env}}}};
  j["models"] = {{"p", p_model.string()}, {"q", q_model.string()}};
  j["sampler"] = sampler.to_json();
  j["calibration"] = calibration ? nlohmann::json(calibration->string()) : nlohmann::json(nullptr);
  j["audit"] = {{"dir", audit_dir.string()}, {"retention_days", audit_retention_days}};
  j["upload_dir"] = upload_dir.string();
  j["allow_seed_header"] = allow_seed_header;
  return j;
}

Runtime Runtime::build(const ServerConfig& config) {
  Runtime rt;
  if (config.llm == LlmBackend::Mock) {
    rt.llm = std::make_unique<llmgate::MockProvider>(config.llm_fixtures);
  } else {
    rt.llm = std::make_unique<llmgate::OpenAIProvider>(config.openai);
  }
  switch (config.transcription) {
    case TranscriptionBackend::None:
      break;
    case TranscriptionBackend::Mock:
      rt.transcription = std::make_unique<MockTranscriptionProvider>(config.transcription_fixtures);
      break;
    case TranscriptionBackend::Http:
      rt.transcription = std::make_unique<HttpTranscriptionProvider>(config.transcription_http);
      break;
  }
  rt.p = std::make_unique<seqmodel::LstmModel>(seqmodel::load_model(config.p_model));
  rt.q = std::make_unique<seqmodel::LstmModel>(seqmodel::load_model(config.q_model, rt.p->vocab()));
  rt.sampler = config.sampler;
  if (config.calibration) rt.sampler.m = sampler::resolve_m(config.calibration);
  rt.audit = std::make_unique<AuditStore>(config.audit_dir, config.audit_retention_days);
  return rt;
}

}  // namespace chordseed::server
