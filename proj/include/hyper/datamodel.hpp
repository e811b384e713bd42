#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hyper {

using ItemId = std::string;
using UserId = std::string;
using Timestamp = std::int64_t;
using ContextMap = std::map<std::string, std::string>;

struct Interaction {
  UserId user_id;
  ItemId item_id;
  Timestamp timestamp = 0;
  ContextMap context;

  bool operator==(const Interaction&) const = default;
};

/// One user's interactions in consumption order.
struct ItemSequence {
  UserId user_id;
  std::vector<ItemId> items;
  std::vector<Timestamp> times;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/**
 * @brief Immutable, validated interaction log.
 *
 * Interactions are stable-sorted by (user_id, timestamp), so ties keep their
 * input order. The catalog and user sets are derived from the rows.
 */
class EventLog {
 public:
  EventLog() = default;
  /// Validates every row; throws Error(kMalformedInput) on a bad row.
  explicit EventLog(std::vector<Interaction> interactions);

  const std::vector<Interaction>& interactions() const { return interactions_; }
  const std::set<ItemId>& catalog() const { return catalog_; }
  const std::set<UserId>& users() const { return users_; }
  bool empty() const { return interactions_.empty(); }
  std::size_t size() const { return interactions_.size(); }

  /// Rows of one user, ascending in time; empty span for unknown users.
  std::span<const Interaction> user_rows(const UserId& user) const;

 private:
  std::vector<Interaction> interactions_;
  std::set<ItemId> catalog_;
  std::set<UserId> users_;
  std::map<UserId, std::pair<std::size_t, std::size_t>> ranges_;
};

enum class LogFormat { kCsv, kJsonl };

std::optional<LogFormat> ParseLogFormat(const std::string& name);

EventLog IngestLog(const std::filesystem::path& path, LogFormat format);
EventLog ParseCsvLog(const std::string& text);
EventLog ParseJsonlLog(const std::string& text);

std::string SerializeJsonl(const EventLog& log);
/// Context keys become `ctx_<key>` columns; the column set is the union of keys.
std::string SerializeCsv(const EventLog& log);

/// Throws Error(kUnknownUser) when the user has no rows.
ItemSequence UserHistory(const EventLog& log, const UserId& user);

/// Histories of every user, in user-id order.
std::vector<ItemSequence> AllHistories(const EventLog& log);

// --- context buckets -------------------------------------------------------

enum class BucketKind { kTimeOfDay, kDayOfWeek, kCustom };

struct ContextBucket {
  BucketKind kind = BucketKind::kTimeOfDay;
  std::string key;  // only for kCustom
  std::string value;

  auto operator<=>(const ContextBucket&) const = default;
  bool operator==(const ContextBucket&) const = default;
};

/// Local-time start (minutes after midnight) of each time-of-day bucket.
struct DayBoundaries {
  int morning = 5 * 60;
  int afternoon = 12 * 60;
  int evening = 17 * 60;
  int night = 22 * 60;

  bool operator==(const DayBoundaries&) const = default;
  bool valid() const {
    return 0 <= morning && morning < afternoon && afternoon < evening &&
           evening < night && night < 24 * 60;
  }
};

/// How interactions and requests are mapped to a bucket.
struct BucketSpec {
  BucketKind kind = BucketKind::kTimeOfDay;
  std::string custom_key;
  std::int64_t tz_offset = 0;
  DayBoundaries boundaries;

  bool operator==(const BucketSpec&) const = default;
};

/// kind must be kTimeOfDay or kDayOfWeek.
ContextBucket Bucketize(Timestamp timestamp, BucketKind kind,
                        std::int64_t tz_offset,
                        const DayBoundaries& boundaries = {});

/// Bucket for one interaction under spec; nullopt for a custom key it lacks.
std::optional<ContextBucket> BucketOf(const Interaction& row,
                                      const BucketSpec& spec);

std::string BucketKindName(BucketKind kind);
std::optional<BucketKind> ParseBucketKind(const std::string& name);

// --- groups ----------------------------------------------------------------

using GroupId = std::string;

struct UserGroupMap {
  std::map<UserId, GroupId> assignments;

  std::optional<GroupId> group_of(const UserId& user) const;
  std::map<GroupId, std::vector<UserId>> members() const;
};

/// CSV with header `user_id,group_id`; an empty file is an empty map.
UserGroupMap LoadGroups(const std::filesystem::path& path);
UserGroupMap ParseGroups(const std::string& text);

/// Throws Error(kUnknownUser) if an assigned user is absent from the log.
void ValidateGroups(const UserGroupMap& groups, const EventLog& log);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& content);

}  // namespace hyper
