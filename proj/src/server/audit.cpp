#include "chordseed/server/audit.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

#include "chordseed/common/error.hpp"

namespace chordseed::server {

namespace {

constexpr std::string_view kPrefix = "audit-";
constexpr std::string_view kSuffix = ".jsonl";

std::string utc_day(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> day_of(const std::filesystem::path& file) {
  const auto name = file.filename().string();
  if (name.size() != kPrefix.size() + 10 + kSuffix.size()) return std::nullopt;
  if (!name.starts_with(kPrefix) || !name.ends_with(kSuffix)) return std::nullopt;
  return name.substr(kPrefix.size(), 10);
}

}  // namespace

AuditStore::AuditStore(std::filesystem::path dir, int retention_days, Clock clock)
    : dir_(std::move(dir)), retention_days_(retention_days), clock_(std::move(clock)) {
  if (retention_days_ < 1) throw Error("audit retention must be at least one day");
  std::filesystem::create_directories(dir_);
  prune();
}

std::chrono::system_clock::time_point AuditStore::now() const {
  return clock_ ? clock_() : std::chrono::system_clock::now();
}

std::size_t AuditStore::prune() {
  // Day strings compare in date order.
  const std::string oldest_kept = utc_day(now() - std::chrono::hours(24) * (retention_days_ - 1));
  std::size_t removed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const auto day = day_of(entry.path());
    if (day && *day < oldest_kept) {
      std::filesystem::remove(entry.path());
      ++removed;
    }
  }
  return removed;
}

void AuditStore::append(const std::string& audit_id, nlohmann::json record) {
  const auto t = now();
  record["audit_id"] = audit_id;
  record["timestamp"] = utc_timestamp(t);
  const std::string line = record.dump() + "\n";
  std::lock_guard lock(mutex_);
  const auto day = utc_day(t);
  if (day != current_day_) {
    current_day_ = day;
    prune();
  }
  const auto path = dir_ / (std::string(kPrefix) + day + std::string(kSuffix));
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to audit log " + path.string());
  out << line;
  out.flush();
  if (!out) throw Error("failed writing audit log " + path.string());
}

std::optional<nlohmann::json> AuditStore::find(const std::string& audit_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!day_of(entry.path())) continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.find(audit_id) == std::string::npos) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.value("audit_id", "") == audit_id) return std::optional<nlohmann::json>(std::in_place, j);
    }
  }
  return std::nullopt;
}

std::string new_audit_id() {
  static thread_local std::random_device rd;
  char buf[33];
  for (int i = 0; i < 4; ++i) std::snprintf(buf + 8 * i, 9, "%08x", static_cast<unsigned>(rd()));
  return std::string(buf, 32);
}

}  // namespace chordseed::server
