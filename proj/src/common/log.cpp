#include "chordseed/common/log.hpp"

#include <iostream>
#include <mutex>

namespace chordseed {

namespace {

std::mutex g_mutex;
std::function<void(LogLevel, std::string_view)> g_sink;
LogLevel g_min = LogLevel::Info;

std::string_view level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
  }
  return "?";
}

}  // namespace

void set_log_sink(std::function<void(LogLevel, std::string_view)> sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void set_min_log_level(LogLevel level) {
  std::lock_guard lock(g_mutex);
  g_min = level;
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (level < g_min) return;
  if (g_sink) {
    g_sink(level, message);
  } else {
    std::clog << "[" << level_name(level) << "] " << message << '\n';
  }
}

}  // namespace chordseed
