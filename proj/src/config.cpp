#include "hyper/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "hyper/error.hpp"

namespace hyper {

namespace {

Error ConfigError(std::size_t line_no, const std::string& what) {
  return Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": " + what);
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

template <typename T>
std::optional<T> ParseNumber(const std::string& s) {
  T value{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::string FormatClock(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

std::optional<int> ParseClock(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return std::nullopt;
  auto h = ParseNumber<int>(s.substr(0, colon));
  auto m = ParseNumber<int>(s.substr(colon + 1));
  if (!h || !m || *h < 0 || *h > 23 || *m < 0 || *m > 59) return std::nullopt;
  return *h * 60 + *m;
}

/// Binds each (section, key) to a field of an EngineConfig.
struct Field {
  std::function<std::string(const EngineConfig&)> get;
  std::function<bool(EngineConfig&, const std::string&)> set;
};

template <typename T>
Field NumberField(T EngineConfig::*member) {
  return {[member](const EngineConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return FormatDouble(c.*member);
            else return std::to_string(c.*member);
          },
          [member](EngineConfig& c, const std::string& v) {
            auto parsed = ParseNumber<T>(v);
            if (parsed) c.*member = *parsed;
            return parsed.has_value();
          }};
}

template <typename Owner, typename T>
Field NestedNumberField(Owner EngineConfig::*owner, T Owner::*member) {
  return {[=](const EngineConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return FormatDouble(c.*owner.*member);
            else return std::to_string(c.*owner.*member);
          },
          [=](EngineConfig& c, const std::string& v) {
            auto parsed = ParseNumber<T>(v);
            if (parsed) c.*owner.*member = *parsed;
            return parsed.has_value();
          }};
}

Field ClockField(int DayBoundaries::*member) {
  return {[=](const EngineConfig& c) { return FormatClock(c.bucket.boundaries.*member); },
          [=](EngineConfig& c, const std::string& v) {
            auto parsed = ParseClock(v);
            if (parsed) c.bucket.boundaries.*member = *parsed;
            return parsed.has_value();
          }};
}

using FieldTable = std::map<std::string, std::map<std::string, Field>>;

const FieldTable& Fields() {
  static const FieldTable table = [] {
    using C = EngineConfig;
    FieldTable t;
    auto& act = t["activation"];
    act["decay"] = NestedNumberField(&C::activation, &ActivationParams::decay);
    act["context_size"] = NestedNumberField(&C::activation, &ActivationParams::context_size);
    act["s_max"] = NestedNumberField(&C::activation, &ActivationParams::s_max);
    act["cold_base"] = NestedNumberField(&C::activation, &ActivationParams::cold_base);
    act["min_elapsed"] = NestedNumberField(&C::activation, &ActivationParams::min_elapsed);
    act["cooc_window"] = NumberField(&C::cooc_window);
    act["time_mode"] = {
        [](const C& c) {
          return std::string(c.activation.time_mode == TimeMode::kSteps ? "steps" : "seconds");
        },
        [](C& c, const std::string& v) {
          if (v == "steps") c.activation.time_mode = TimeMode::kSteps;
          else if (v == "seconds") c.activation.time_mode = TimeMode::kSeconds;
          else return false;
          return true;
        }};

    auto& mine = t["mining"];
    mine["minsup"] = NestedNumberField(&C::mining, &MiningConfig::minsup);
    mine["minconf"] = NestedNumberField(&C::mining, &MiningConfig::minconf);
    mine["max_antecedent"] = NestedNumberField(&C::mining, &MiningConfig::max_antecedent);
    mine["max_consequent"] = NestedNumberField(&C::mining, &MiningConfig::max_consequent);
    mine["window"] = NestedNumberField(&C::mining, &MiningConfig::window);
    mine["min_periodic_occ"] = NestedNumberField(&C::mining, &MiningConfig::min_periodic_occ);
    mine["periodic_tolerance"] = NestedNumberField(&C::mining, &MiningConfig::periodic_tolerance);
    mine["lift_threshold"] = NestedNumberField(&C::mining, &MiningConfig::lift_threshold);
    mine["minsup_frac"] = NestedNumberField(&C::mining, &MiningConfig::minsup_frac);

    auto& proc = t["procedural"];
    proc["beta"] = NestedNumberField(&C::boost, &BoostParams::beta);
    proc["lift_cap"] = NestedNumberField(&C::boost, &BoostParams::lift_cap);
    proc["weight_individual"] = NestedNumberField(&C::weights, &ScopeWeights::individual);
    proc["weight_group"] = NestedNumberField(&C::weights, &ScopeWeights::group);
    proc["weight_global"] = NestedNumberField(&C::weights, &ScopeWeights::global);
    proc["scope_mode"] = {
        [](const C& c) {
          return std::string(c.scope_mode == ScopeMode::kFallback ? "fallback" : "weighted");
        },
        [](C& c, const std::string& v) {
          if (v == "fallback") c.scope_mode = ScopeMode::kFallback;
          else if (v == "weighted") c.scope_mode = ScopeMode::kWeighted;
          else return false;
          return true;
        }};

    t["recommend"]["exclude_recent"] = NumberField(&C::exclude_recent);

    auto& ctx = t["context"];
    ctx["bucket"] = {
        [](const C& c) {
          if (c.bucket.kind == BucketKind::kCustom) return "custom:" + c.bucket.custom_key;
          return BucketKindName(c.bucket.kind);
        },
        [](C& c, const std::string& v) {
          if (v.starts_with("custom:") && v.size() > 7) {
            c.bucket.kind = BucketKind::kCustom;
            c.bucket.custom_key = v.substr(7);
            return true;
          }
          auto kind = ParseBucketKind(v);
          if (!kind || *kind == BucketKind::kCustom) return false;
          c.bucket.kind = *kind;
          c.bucket.custom_key.clear();
          return true;
        }};
    ctx["tz_offset"] = NestedNumberField(&C::bucket, &BucketSpec::tz_offset);
    ctx["morning"] = ClockField(&DayBoundaries::morning);
    ctx["afternoon"] = ClockField(&DayBoundaries::afternoon);
    ctx["evening"] = ClockField(&DayBoundaries::evening);
    ctx["night"] = ClockField(&DayBoundaries::night);

    t["general"]["seed"] = NumberField(&C::seed);
    return t;
  }();
  return table;
}

}  // namespace

EngineParams EngineConfig::engine_params() const {
  EngineParams params;
  params.activation = activation;
  params.weights = weights;
  params.scope_mode = scope_mode;
  params.exclude_recent = exclude_recent;
  params.tz_offset = bucket.tz_offset;
  params.boundaries = bucket.boundaries;
  return params;
}

void EngineConfig::Validate() const {
  activation.Validate();
  mining.Validate();
  weights.Validate();
  if (cooc_window < 1) throw Error(ErrorCode::kInvalidConfig, "cooc_window must be >= 1");
  if (!(boost.beta > 0.0) || !std::isfinite(boost.beta)) {
    throw Error(ErrorCode::kInvalidConfig, "beta must be > 0");
  }
  if (!(boost.lift_cap > 0.0) || !std::isfinite(boost.lift_cap)) {
    throw Error(ErrorCode::kInvalidConfig, "lift_cap must be > 0");
  }
  if (exclude_recent < 0) throw Error(ErrorCode::kInvalidConfig, "exclude_recent must be >= 0");
  if (!bucket.boundaries.valid()) {
    throw Error(ErrorCode::kInvalidConfig, "time-of-day boundaries must increase");
  }
}

EngineConfig ParseConfig(const std::string& text) {
  EngineConfig config;
  const auto& fields = Fields();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = Trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = Trim(line.substr(1, line.size() - 2));
      if (!fields.contains(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    if (section.empty()) throw ConfigError(line_no, "key outside of a section");
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    const auto& keys = fields.at(section);
    auto field = keys.find(key);
    if (field == keys.end()) {
      throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    }
    if (!field->second.set(config, value)) {
      throw ConfigError(line_no, "bad value '" + value + "' for " + key);
    }
  }
  config.Validate();
  return config;
}

EngineConfig LoadConfig(const std::filesystem::path& path) {
  return ParseConfig(ReadFile(path));
}

std::map<std::string, std::map<std::string, std::string>> ConfigEntries(
    const EngineConfig& config) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& [section, keys] : Fields()) {
    for (const auto& [key, field] : keys) out[section][key] = field.get(config);
  }
  return out;
}

std::string SerializeConfig(const EngineConfig& config) {
  std::string out;
  for (const auto& [section, keys] : ConfigEntries(config)) {
    if (!out.empty()) out += '\n';
    out += "[" + section + "]\n";
    for (const auto& [key, value] : keys) out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace hyper
