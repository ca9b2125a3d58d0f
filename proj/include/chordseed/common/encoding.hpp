#pragma once

#include <string>
#include <string_view>

namespace chordseed {

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace chordseed
