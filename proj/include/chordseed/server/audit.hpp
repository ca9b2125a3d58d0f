#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace chordseed::server {

/// Append-only JSONL audit log, one file per UTC day
/// (`audit-YYYY-MM-DD.jsonl`). Files older than the retention window are
/// deleted when the store opens and whenever a new day's file is started.
class AuditStore {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  explicit AuditStore(std::filesystem::path dir, int retention_days = 7, Clock clock = {});

  /// Stamps `audit_id` and `timestamp` into the record and appends it.
  void append(const std::string& audit_id, nlohmann::json record);
  std::optional<nlohmann::json> find(const std::string& audit_id) const;
  /// Deletes day files older than the retention window; returns how many.
  std::size_t prune();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::chrono::system_clock::time_point now() const;

  std::filesystem::path dir_;
  int retention_days_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::string current_day_;
};

/// 32 hex characters from the system entropy source.
std::string new_audit_id();

}  // namespace chordseed::server
