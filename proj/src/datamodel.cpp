#include "hyper/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hyper/error.hpp"
#include "json.hpp"

namespace hyper {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kUnknownRule: return "UnknownRule";
    case ErrorCode::kNoOccurrences: return "NoOccurrences";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kNoTestCases: return "NoTestCases";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

namespace {

constexpr std::string_view kCtxPrefix = "ctx_";

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> SplitCommas(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool IsBlank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

Error RowError(std::size_t line_no, const std::string& what) {
  return Error(ErrorCode::kMalformedInput,
               "line " + std::to_string(line_no) + ": " + what);
}

std::optional<Timestamp> ParseTimestamp(const std::string& s) {
  Timestamp value = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

void CheckRow(const Interaction& row, std::size_t line_no) {
  if (row.user_id.empty()) throw RowError(line_no, "empty user_id");
  if (row.item_id.empty()) throw RowError(line_no, "empty item_id");
  if (row.timestamp < 0) throw RowError(line_no, "negative timestamp");
}

}  // namespace

EventLog::EventLog(std::vector<Interaction> interactions)
    : interactions_(std::move(interactions)) {
  for (std::size_t i = 0; i < interactions_.size(); ++i) {
    CheckRow(interactions_[i], i + 1);
  }
  std::stable_sort(interactions_.begin(), interactions_.end(),
                   [](const Interaction& a, const Interaction& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     return a.timestamp < b.timestamp;
                   });
  for (std::size_t i = 0; i < interactions_.size(); ++i) {
    const auto& row = interactions_[i];
    catalog_.insert(row.item_id);
    users_.insert(row.user_id);
    auto [it, inserted] = ranges_.try_emplace(row.user_id, i, i + 1);
    if (!inserted) it->second.second = i + 1;
  }
}

std::span<const Interaction> EventLog::user_rows(const UserId& user) const {
  auto it = ranges_.find(user);
  if (it == ranges_.end()) return {};
  return std::span<const Interaction>(interactions_)
      .subspan(it->second.first, it->second.second - it->second.first);
}

std::optional<LogFormat> ParseLogFormat(const std::string& name) {
  if (name == "csv") return LogFormat::kCsv;
  if (name == "jsonl") return LogFormat::kJsonl;
  return std::nullopt;
}

EventLog ParseCsvLog(const std::string& text) {
  auto lines = SplitLines(text);
  std::size_t header_idx = 0;
  while (header_idx < lines.size() && IsBlank(lines[header_idx])) ++header_idx;
  if (header_idx == lines.size()) {
    throw Error(ErrorCode::kEmptyLog, "no header row");
  }

  const auto header = SplitCommas(lines[header_idx]);
  int user_col = -1, item_col = -1, ts_col = -1;
  std::vector<std::pair<int, std::string>> ctx_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const auto& name = header[c];
    if (name == "user_id") {
      user_col = c;
    } else if (name == "item_id") {
      item_col = c;
    } else if (name == "timestamp") {
      ts_col = c;
    } else if (name.starts_with(kCtxPrefix) && name.size() > kCtxPrefix.size()) {
      ctx_cols.emplace_back(c, name.substr(kCtxPrefix.size()));
    } else {
      throw RowError(header_idx + 1, "unexpected column '" + name + "'");
    }
  }
  if (user_col < 0 || item_col < 0 || ts_col < 0) {
    throw RowError(header_idx + 1,
                   "header must contain user_id,item_id,timestamp");
  }

  std::vector<Interaction> rows;
  for (std::size_t i = header_idx + 1; i < lines.size(); ++i) {
    if (IsBlank(lines[i])) continue;
    const std::size_t line_no = i + 1;
    auto fields = SplitCommas(lines[i]);
    if (fields.size() != header.size()) {
      throw RowError(line_no, "expected " + std::to_string(header.size()) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    Interaction row;
    row.user_id = fields[user_col];
    row.item_id = fields[item_col];
    auto ts = ParseTimestamp(fields[ts_col]);
    if (!ts) throw RowError(line_no, "bad timestamp '" + fields[ts_col] + "'");
    row.timestamp = *ts;
    for (const auto& [col, key] : ctx_cols) {
      if (!fields[col].empty()) row.context[key] = fields[col];
    }
    CheckRow(row, line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyLog, "no interaction rows");
  return EventLog(std::move(rows));
}

EventLog ParseJsonlLog(const std::string& text) {
  auto lines = SplitLines(text);
  std::vector<Interaction> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (IsBlank(lines[i])) continue;
    const std::size_t line_no = i + 1;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw RowError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw RowError(line_no, "expected a JSON object");
    Interaction row;
    auto user = obj.find("user_id");
    auto item = obj.find("item_id");
    auto ts = obj.find("timestamp");
    if (user == obj.end() || !user->is_string()) {
      throw RowError(line_no, "missing string user_id");
    }
    if (item == obj.end() || !item->is_string()) {
      throw RowError(line_no, "missing string item_id");
    }
    if (ts == obj.end() || !ts->is_number_integer()) {
      throw RowError(line_no, "missing integer timestamp");
    }
    row.user_id = user->get<std::string>();
    row.item_id = item->get<std::string>();
    row.timestamp = ts->get<Timestamp>();
    if (auto ctx = obj.find("context"); ctx != obj.end() && !ctx->is_null()) {
      if (!ctx->is_object()) throw RowError(line_no, "context must be an object");
      for (const auto& [key, value] : ctx->items()) {
        if (!value.is_string()) {
          throw RowError(line_no, "context value for '" + key + "' must be a string");
        }
        row.context[key] = value.get<std::string>();
      }
    }
    CheckRow(row, line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyLog, "no interaction rows");
  return EventLog(std::move(rows));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

EventLog IngestLog(const std::filesystem::path& path, LogFormat format) {
  const std::string text = ReadFile(path);
  return format == LogFormat::kCsv ? ParseCsvLog(text) : ParseJsonlLog(text);
}

std::string SerializeJsonl(const EventLog& log) {
  std::string out;
  for (const auto& row : log.interactions()) {
    nlohmann::ordered_json obj;
    obj["user_id"] = row.user_id;
    obj["item_id"] = row.item_id;
    obj["timestamp"] = row.timestamp;
    if (!row.context.empty()) obj["context"] = row.context;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string SerializeCsv(const EventLog& log) {
  std::set<std::string> keys;
  for (const auto& row : log.interactions()) {
    for (const auto& [key, value] : row.context) keys.insert(key);
  }
  std::string out = "user_id,item_id,timestamp";
  for (const auto& key : keys) out += ",ctx_" + key;
  out += '\n';
  for (const auto& row : log.interactions()) {
    out += row.user_id + "," + row.item_id + "," + std::to_string(row.timestamp);
    for (const auto& key : keys) {
      out += ',';
      if (auto it = row.context.find(key); it != row.context.end()) out += it->second;
    }
    out += '\n';
  }
  return out;
}

ItemSequence UserHistory(const EventLog& log, const UserId& user) {
  auto rows = log.user_rows(user);
  if (rows.empty()) throw Error(ErrorCode::kUnknownUser, "'" + user + "'");
  ItemSequence seq;
  seq.user_id = user;
  seq.items.reserve(rows.size());
  seq.times.reserve(rows.size());
  for (const auto& row : rows) {
    seq.items.push_back(row.item_id);
    seq.times.push_back(row.timestamp);
  }
  return seq;
}

std::vector<ItemSequence> AllHistories(const EventLog& log) {
  std::vector<ItemSequence> out;
  out.reserve(log.users().size());
  for (const auto& user : log.users()) out.push_back(UserHistory(log, user));
  return out;
}

// --- buckets ---------------------------------------------------------------

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

ContextBucket Bucketize(Timestamp timestamp, BucketKind kind,
                        std::int64_t tz_offset,
                        const DayBoundaries& boundaries) {
  const std::int64_t local = timestamp + tz_offset;
  const std::int64_t day = FloorDiv(local, kSecondsPerDay);
  const std::int64_t second_of_day = local - day * kSecondsPerDay;
  switch (kind) {
    case BucketKind::kTimeOfDay: {
      const auto minute = static_cast<int>(second_of_day / 60);
      std::string value = "night";
      if (minute >= boundaries.morning && minute < boundaries.afternoon) {
        value = "morning";
      } else if (minute >= boundaries.afternoon && minute < boundaries.evening) {
        value = "afternoon";
      } else if (minute >= boundaries.evening && minute < boundaries.night) {
        value = "evening";
      }
      return {BucketKind::kTimeOfDay, "", value};
    }
    case BucketKind::kDayOfWeek: {
      // 1970-01-01 was a Thursday.
      static constexpr const char* kDays[] = {"mon", "tue", "wed", "thu",
                                              "fri", "sat", "sun"};
      const std::int64_t idx = ((day + 3) % 7 + 7) % 7;
      return {BucketKind::kDayOfWeek, "", kDays[idx]};
    }
    case BucketKind::kCustom:
      break;
  }
  throw std::invalid_argument("Bucketize: custom buckets come from context");
}

std::optional<ContextBucket> BucketOf(const Interaction& row,
                                      const BucketSpec& spec) {
  if (spec.kind == BucketKind::kCustom) {
    auto it = row.context.find(spec.custom_key);
    if (it == row.context.end()) return std::nullopt;
    return ContextBucket{BucketKind::kCustom, spec.custom_key, it->second};
  }
  return Bucketize(row.timestamp, spec.kind, spec.tz_offset, spec.boundaries);
}

std::string BucketKindName(BucketKind kind) {
  switch (kind) {
    case BucketKind::kTimeOfDay: return "time_of_day";
    case BucketKind::kDayOfWeek: return "day_of_week";
    case BucketKind::kCustom: return "custom";
  }
  return "unknown";
}

std::optional<BucketKind> ParseBucketKind(const std::string& name) {
  if (name == "time_of_day") return BucketKind::kTimeOfDay;
  if (name == "day_of_week") return BucketKind::kDayOfWeek;
  if (name == "custom") return BucketKind::kCustom;
  return std::nullopt;
}

// --- groups ----------------------------------------------------------------

std::optional<GroupId> UserGroupMap::group_of(const UserId& user) const {
  auto it = assignments.find(user);
  if (it == assignments.end()) return std::nullopt;
  return it->second;
}

std::map<GroupId, std::vector<UserId>> UserGroupMap::members() const {
  std::map<GroupId, std::vector<UserId>> out;
  for (const auto& [user, group] : assignments) out[group].push_back(user);
  return out;
}

UserGroupMap ParseGroups(const std::string& text) {
  UserGroupMap groups;
  auto lines = SplitLines(text);
  bool seen_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (IsBlank(lines[i])) continue;
    auto fields = SplitCommas(lines[i]);
    if (!seen_header) {
      if (fields.size() != 2 || fields[0] != "user_id" || fields[1] != "group_id") {
        throw RowError(i + 1, "groups header must be user_id,group_id");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw RowError(i + 1, "expected user_id,group_id");
    }
    groups.assignments[fields[0]] = fields[1];
  }
  return groups;
}

UserGroupMap LoadGroups(const std::filesystem::path& path) {
  return ParseGroups(ReadFile(path));
}

void ValidateGroups(const UserGroupMap& groups, const EventLog& log) {
  for (const auto& [user, group] : groups.assignments) {
    if (!log.users().contains(user)) {
      throw Error(ErrorCode::kUnknownUser,
                  "group member '" + user + "' not in log");
    }
  }
}

}  // namespace hyper
