#include "chordseed/llmgate/mock.hpp"

#include <fstream>
#include <sstream>

namespace chordseed::llmgate {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

MockProvider::MockProvider(std::filesystem::path fixture_dir, MockOptions options)
    : dir_(std::move(fixture_dir)), options_(std::move(options)) {}

std::string MockProvider::complete(const ChatRequest& request) {
  const std::string hash = request_hash(request);
  std::vector<std::string> names{hash + ".txt"};
  if (!request.tag.empty()) names.push_back("default." + request.tag + ".txt");
  if (options_.default_fixture) names.push_back(*options_.default_fixture);

  for (const auto& name : names) {
    auto body = read_file(dir_ / name);
    if (!body) continue;
    std::lock_guard lock(mutex_);
    transcript_.push_back({transcript_.size() + 1, request.tag, hash, name, canonical_request(request), *body});
    return *body;
  }
  throw UpstreamLLMError("mock provider has no fixture for request " + hash + " in " + dir_.string());
}

std::vector<TranscriptEntry> MockProvider::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::size_t MockProvider::call_count() const {
  std::lock_guard lock(mutex_);
  return transcript_.size();
}

void MockProvider::write_transcript(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write transcript " + path.string());
  for (const auto& e : transcript()) {
    out << nlohmann::json{{"sequence", e.sequence}, {"tag", e.tag},         {"hash", e.hash},
                          {"fixture", e.fixture},   {"request", e.request}, {"response", e.response}}
               .dump()
        << '\n';
  }
}

}  // namespace chordseed::llmgate
