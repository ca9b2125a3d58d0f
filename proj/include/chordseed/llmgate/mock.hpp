#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chordseed/llmgate/provider.hpp"

namespace chordseed::llmgate {

struct TranscriptEntry {
  std::size_t sequence = 0;
  std::string tag;
  std::string hash;
  std::string fixture;
  nlohmann::json request;
  std::string response;
};

struct MockOptions {
  /// Fallback file name used after `<hash>.txt` and `default.<tag>.txt` miss.
  std::optional<std::string> default_fixture = "default.txt";
};

/// Offline provider that answers from `<dir>/<sha256(request)>.txt`, then
/// `<dir>/default.<tag>.txt`, then the configured default fixture. With no
/// match it throws UpstreamLLMError. Every call is recorded.
class MockProvider : public LLMProvider {
 public:
  explicit MockProvider(std::filesystem::path fixture_dir, MockOptions options = {});

  std::string complete(const ChatRequest& request) override;

  std::vector<TranscriptEntry> transcript() const;
  std::size_t call_count() const;
  /// One JSON object per call.
  void write_transcript(const std::filesystem::path& path) const;

 private:
  std::filesystem::path dir_;
  MockOptions options_;
  mutable std::mutex mutex_;
  std::vector<TranscriptEntry> transcript_;
};

}  // namespace chordseed::llmgate
