#include "hyper/rules.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hyper/error.hpp"
#include "json.hpp"

namespace hyper {

using ordered_json = nlohmann::ordered_json;

ItemSet MakeItemSet(std::vector<ItemId> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

RuleClass ClassOf(const RuleBody& body) {
  return static_cast<RuleClass>(body.index());
}

std::string RuleClassName(RuleClass cls) {
  switch (cls) {
    case RuleClass::kSequential: return "sequential";
    case RuleClass::kPeriodic: return "periodic";
    case RuleClass::kContextual: return "contextual";
    case RuleClass::kCalibration: return "calibration";
  }
  return "unknown";
}

std::string ScopeLabel(ScopeLevel level) {
  switch (level) {
    case ScopeLevel::kIndividual: return "individual";
    case ScopeLevel::kGroup: return "group";
    case ScopeLevel::kGlobal: return "global";
  }
  return "unknown";
}

std::string FormatScope(const Scope& scope) {
  if (scope.level == ScopeLevel::kGlobal) return "global";
  return ScopeLabel(scope.level) + ":" + scope.owner;
}

std::optional<Scope> ParseScope(const std::string& text) {
  if (text == "global") return Scope::Global();
  auto colon = text.find(':');
  if (colon == std::string::npos || colon + 1 == text.size()) return std::nullopt;
  const auto level = text.substr(0, colon);
  auto owner = text.substr(colon + 1);
  if (level == "individual") return Scope::Individual(std::move(owner));
  if (level == "group") return Scope::Group(std::move(owner));
  return std::nullopt;
}

bool ScopeEligible(const Scope& scope, const UserId& user,
                   const UserGroupMap& groups) {
  switch (scope.level) {
    case ScopeLevel::kIndividual: return scope.owner == user;
    case ScopeLevel::kGroup: return groups.group_of(user) == scope.owner;
    case ScopeLevel::kGlobal: return true;
  }
  return false;
}

namespace {

Error Malformed(const std::string& what) {
  return Error(ErrorCode::kMalformedInput, what);
}

bool IsSortedUnique(const ItemSet& items) {
  return std::adjacent_find(items.begin(), items.end(),
                            [](const auto& a, const auto& b) { return !(a < b); }) ==
         items.end();
}

bool ValidBucket(const ContextBucket& bucket) {
  static const std::set<std::string> kTimes = {"morning", "afternoon", "evening", "night"};
  static const std::set<std::string> kDays = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  switch (bucket.kind) {
    case BucketKind::kTimeOfDay: return kTimes.contains(bucket.value);
    case BucketKind::kDayOfWeek: return kDays.contains(bucket.value);
    case BucketKind::kCustom: return !bucket.key.empty() && !bucket.value.empty();
  }
  return false;
}

}  // namespace

void ValidateRule(const RuleEntry& entry) {
  const auto& id = entry.rule_id;
  if (id.empty()) throw Malformed("empty rule_id");
  if (!(entry.v_r > 0.0) || !std::isfinite(entry.v_r)) {
    throw Malformed(id + ": v_r must be finite and > 0");
  }
  if (entry.scope.level != ScopeLevel::kGlobal && entry.scope.owner.empty()) {
    throw Malformed(id + ": scope owner missing");
  }
  std::visit(
      [&](const auto& rule) {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, SequentialRule>) {
          if (rule.antecedent.empty() || rule.consequent.empty()) {
            throw Malformed(id + ": antecedent and consequent must be non-empty");
          }
          if (!IsSortedUnique(rule.antecedent) || !IsSortedUnique(rule.consequent)) {
            throw Malformed(id + ": item sets must be sorted and unique");
          }
          for (const auto& item : rule.consequent) {
            if (std::binary_search(rule.antecedent.begin(), rule.antecedent.end(), item)) {
              throw Malformed(id + ": antecedent and consequent overlap");
            }
          }
          if (rule.window < 1) throw Malformed(id + ": window must be >= 1");
          if (!(rule.confidence >= 0.0 && rule.confidence <= 1.0)) {
            throw Malformed(id + ": confidence outside [0,1]");
          }
        } else if constexpr (std::is_same_v<T, PeriodicRule>) {
          if (rule.item.empty()) throw Malformed(id + ": periodic item missing");
          if (rule.w_min < 1 || rule.w_min > rule.w_max) {
            throw Malformed(id + ": need 1 <= w_min <= w_max");
          }
        } else if constexpr (std::is_same_v<T, ContextRule>) {
          if (rule.items.empty() || !IsSortedUnique(rule.items)) {
            throw Malformed(id + ": context items must be non-empty, sorted, unique");
          }
          if (!ValidBucket(rule.bucket)) throw Malformed(id + ": invalid bucket");
          if (!std::isfinite(rule.lift)) throw Malformed(id + ": lift must be finite");
        } else {
          if (!(rule.profile_quantile_target >= 0.0 && rule.profile_quantile_target <= 1.0)) {
            throw Malformed(id + ": profile_quantile_target outside [0,1]");
          }
          if (!std::isfinite(rule.strength) || rule.strength < 0.0) {
            throw Malformed(id + ": strength must be finite and >= 0");
          }
        }
      },
      entry.body);
}

RuleSet::RuleSet(std::vector<RuleEntry> rules) : rules_(std::move(rules)) {
  std::set<std::string> ids;
  for (const auto& entry : rules_) {
    ValidateRule(entry);
    if (!ids.insert(entry.rule_id).second) {
      throw Malformed("duplicate rule_id " + entry.rule_id);
    }
  }
}

const RuleEntry* RuleSet::find(const std::string& rule_id) const {
  for (const auto& entry : rules_) {
    if (entry.rule_id == rule_id) return &entry;
  }
  return nullptr;
}

RuleSet RuleSet::Without(const std::set<std::string>& rule_ids) const {
  for (const auto& id : rule_ids) {
    if (!contains(id)) throw Error(ErrorCode::kUnknownRule, "'" + id + "'");
  }
  std::vector<RuleEntry> kept;
  for (const auto& entry : rules_) {
    if (!rule_ids.contains(entry.rule_id)) kept.push_back(entry);
  }
  return RuleSet(std::move(kept));
}

RuleSet RuleSet::Merged(const RuleSet& other) const {
  auto all = rules_;
  all.insert(all.end(), other.rules_.begin(), other.rules_.end());
  return RuleSet(std::move(all));
}

// --- JSON-lines ------------------------------------------------------------

namespace {

ordered_json BucketToJson(const ContextBucket& bucket) {
  ordered_json out;
  out["kind"] = BucketKindName(bucket.kind);
  if (bucket.kind == BucketKind::kCustom) out["key"] = bucket.key;
  out["value"] = bucket.value;
  return out;
}

ContextBucket BucketFromJson(const ordered_json& j) {
  ContextBucket bucket;
  auto kind = ParseBucketKind(j.at("kind").get<std::string>());
  if (!kind) throw Malformed("unknown bucket kind");
  bucket.kind = *kind;
  if (bucket.kind == BucketKind::kCustom) bucket.key = j.at("key").get<std::string>();
  bucket.value = j.at("value").get<std::string>();
  return bucket;
}

template <typename T>
T Optional(const ordered_json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

}  // namespace

std::string SerializeRule(const RuleEntry& entry) {
  ordered_json out;
  out["rule_id"] = entry.rule_id;
  out["scope"] = FormatScope(entry.scope);
  out["class"] = RuleClassName(entry.rule_class());
  ordered_json body;
  std::visit(
      [&](const auto& rule) {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, SequentialRule>) {
          body["antecedent"] = rule.antecedent;
          body["consequent"] = rule.consequent;
          body["window"] = rule.window;
          out["body"] = body;
          out["v_r"] = entry.v_r;
          out["support"] = rule.support;
          out["confidence"] = rule.confidence;
        } else if constexpr (std::is_same_v<T, PeriodicRule>) {
          body["item"] = rule.item;
          body["w_min"] = rule.w_min;
          body["w_max"] = rule.w_max;
          out["body"] = body;
          out["v_r"] = entry.v_r;
          out["support"] = rule.occurrences;
        } else if constexpr (std::is_same_v<T, ContextRule>) {
          body["bucket"] = BucketToJson(rule.bucket);
          body["items"] = rule.items;
          out["body"] = body;
          out["v_r"] = entry.v_r;
          out["support"] = rule.support;
          out["lift"] = rule.lift;
        } else {
          body["profile_quantile_target"] = rule.profile_quantile_target;
          body["strength"] = rule.strength;
          body["direction"] = "match_profile";
          out["body"] = body;
          out["v_r"] = entry.v_r;
        }
      },
      entry.body);
  out["provenance"] = entry.provenance == Provenance::kMined ? "mined" : "manual";
  return out.dump();
}

RuleEntry ParseRule(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw Malformed(std::string("invalid rule JSON: ") + e.what());
  }
  RuleEntry entry;
  try {
    entry.rule_id = j.at("rule_id").get<std::string>();
    auto scope = ParseScope(j.at("scope").get<std::string>());
    if (!scope) throw Malformed(entry.rule_id + ": bad scope");
    entry.scope = *scope;
    entry.v_r = Optional<double>(j, "v_r", 1.0);
    const auto provenance = Optional<std::string>(j, "provenance", "manual");
    if (provenance == "mined") {
      entry.provenance = Provenance::kMined;
    } else if (provenance == "manual") {
      entry.provenance = Provenance::kManual;
    } else {
      throw Malformed(entry.rule_id + ": bad provenance '" + provenance + "'");
    }
    const auto cls = j.at("class").get<std::string>();
    const auto& body = j.at("body");
    if (cls == "sequential") {
      SequentialRule rule;
      rule.antecedent = MakeItemSet(body.at("antecedent").get<std::vector<ItemId>>());
      rule.consequent = MakeItemSet(body.at("consequent").get<std::vector<ItemId>>());
      rule.window = body.at("window").get<int>();
      rule.support = Optional<std::int64_t>(j, "support", 0);
      rule.confidence = Optional<double>(j, "confidence", 1.0);
      entry.body = std::move(rule);
    } else if (cls == "periodic") {
      PeriodicRule rule;
      rule.item = body.at("item").get<ItemId>();
      rule.w_min = body.at("w_min").get<int>();
      rule.w_max = body.at("w_max").get<int>();
      rule.occurrences = Optional<std::int64_t>(j, "support", 0);
      entry.body = std::move(rule);
    } else if (cls == "contextual") {
      ContextRule rule;
      rule.bucket = BucketFromJson(body.at("bucket"));
      rule.items = MakeItemSet(body.at("items").get<std::vector<ItemId>>());
      rule.support = Optional<std::int64_t>(j, "support", 0);
      rule.lift = Optional<double>(j, "lift", 0.0);
      entry.body = std::move(rule);
    } else if (cls == "calibration") {
      PopularityCalibrationRule rule;
      rule.profile_quantile_target = Optional<double>(body, "profile_quantile_target", 0.5);
      rule.strength = body.at("strength").get<double>();
      const auto direction = Optional<std::string>(body, "direction", "match_profile");
      if (direction != "match_profile") throw Malformed(entry.rule_id + ": bad direction");
      entry.body = rule;
    } else {
      throw Malformed(entry.rule_id + ": unknown class '" + cls + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Malformed(std::string("rule field error: ") + e.what());
  }
  ValidateRule(entry);
  return entry;
}

std::string SerializeRules(const RuleSet& rules) {
  std::string out;
  for (const auto& entry : rules.rules()) {
    out += SerializeRule(entry);
    out += '\n';
  }
  return out;
}

RuleSet ParseRules(const std::string& text) {
  std::vector<RuleEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      entries.push_back(ParseRule(line));
    } catch (const Error& e) {
      throw Malformed("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return RuleSet(std::move(entries));
}

RuleSet LoadRules(const std::filesystem::path& path) {
  return ParseRules(ReadFile(path));
}

}  // namespace hyper
