#pragma once

#include <filesystem>
#include <optional>

#include "chordseed/seqmodel/lstm.hpp"

namespace chordseed::seqmodel {

class VersionMismatch : public Error {
 public:
  using Error::Error;
};
class ChecksumError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kArtifactFormatVersion = 1;

/// Single file: one JSON header line
///   {format_version, kind, role, config, vocab_version, vocab, param_count, checksum}
/// followed by the parameters as little-endian IEEE doubles. The checksum is
/// the SHA-256 of that payload.
void save_model(const LstmModel& model, const std::filesystem::path& path);

/// When `expected_vocab` is given, its version must match the artifact's.
LstmModel load_model(const std::filesystem::path& path,
                     const std::optional<TokenVocab>& expected_vocab = std::nullopt);

}  // namespace chordseed::seqmodel
