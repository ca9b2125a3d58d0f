#include "chordseed/seqmodel/artifact.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "chordseed/common/digest.hpp"
#include "chordseed/corpus/corpus.hpp"

namespace chordseed::seqmodel {

static_assert(std::endian::native == std::endian::little, "artifact payload assumes a little-endian host");

namespace {

std::string payload_bytes(const Eigen::VectorXd& params) {
  std::string bytes(static_cast<std::size_t>(params.size()) * sizeof(double), '\0');
  std::memcpy(bytes.data(), params.data(), bytes.size());
  return bytes;
}

}  // namespace

void save_model(const LstmModel& model, const std::filesystem::path& path) {
  const std::string payload = payload_bytes(model.parameters());
  nlohmann::json header = {
      {"format_version", kArtifactFormatVersion},
      {"kind", "lstm"},
      {"role", std::string(role_name(model.role()))},
      {"config", model.config().to_json()},
      {"vocab_version", model.vocab().version()},
      {"vocab", model.vocab().to_json()},
      {"param_count", model.parameter_count()},
      {"checksum", sha256_hex(payload)},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw corpus::IoError("cannot write model artifact " + path.string());
  out << header.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw corpus::IoError("failed writing model artifact " + path.string());
}

LstmModel load_model(const std::filesystem::path& path, const std::optional<TokenVocab>& expected_vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw corpus::IoError("cannot open model artifact " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) throw ChecksumError("model artifact has no header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw ChecksumError(std::string("model artifact header is corrupt: ") + e.what());
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string payload = rest.str();

  try {
    const int format = header.at("format_version").get<int>();
    if (format != kArtifactFormatVersion) {
      throw VersionMismatch("artifact format " + std::to_string(format) + " is not supported");
    }
    if (header.at("kind").get<std::string>() != "lstm") throw VersionMismatch("artifact is not an LSTM model");
    if (sha256_hex(payload) != header.at("checksum").get<std::string>()) {
      throw ChecksumError("model artifact checksum mismatch");
    }
    TokenVocab vocab = TokenVocab::from_json(header.at("vocab"));
    const auto vocab_version = header.at("vocab_version").get<std::string>();
    if (vocab.version() != vocab_version) throw ChecksumError("embedded vocabulary does not match its version");
    if (expected_vocab && expected_vocab->version() != vocab_version) {
      throw VersionMismatch("artifact vocabulary " + vocab_version + " does not match " +
                            expected_vocab->version());
    }
    LstmModel model(std::move(vocab), ModelConfig::from_json(header.at("config")),
                    parse_role(header.at("role").get<std::string>()), Init::Zero);
    const auto count = header.at("param_count").get<Eigen::Index>();
    if (count != model.parameter_count() ||
        payload.size() != static_cast<std::size_t>(count) * sizeof(double)) {
      throw ChecksumError("model artifact payload size does not match its config");
    }
    std::memcpy(model.mutable_parameters().data(), payload.data(), payload.size());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ChecksumError(std::string("model artifact header is incomplete: ") + e.what());
  }
}

}  // namespace chordseed::seqmodel
