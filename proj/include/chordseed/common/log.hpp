#pragma once

#include <functional>
#include <string_view>

namespace chordseed {

enum class LogLevel { Debug, Info, Warn, Error };

/// Replaces the process-wide sink (stderr by default). Pass an empty function to restore it.
void set_log_sink(std::function<void(LogLevel, std::string_view)> sink);
void set_min_log_level(LogLevel level);
void log(LogLevel level, std::string_view message);

}  // namespace chordseed
