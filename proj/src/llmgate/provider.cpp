#include "chordseed/llmgate/provider.hpp"

#include <nlohmann/json.hpp>

#include "chordseed/common/digest.hpp"

namespace chordseed::llmgate {

nlohmann::json canonical_request(const ChatRequest& request) {
  nlohmann::json j = {{"system", request.system}, {"user", request.user}};
  if (request.image) j["image"] = {{"mime", request.image->mime}, {"base64", request.image->base64}};
  return j;
}

std::string request_hash(const ChatRequest& request) { return sha256_hex(canonical_request(request).dump()); }

}  // namespace chordseed::llmgate
