#include "hyper/procedural.hpp"

#include <algorithm>
#include <cmath>

#include "hyper/error.hpp"

namespace hyper {

double ScopeWeights::For(ScopeLevel level) const {
  switch (level) {
    case ScopeLevel::kIndividual: return individual;
    case ScopeLevel::kGroup: return group;
    case ScopeLevel::kGlobal: return global;
  }
  return 0.0;
}

void ScopeWeights::Validate() const {
  for (double w : {individual, group, global}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidConfig, "scope weights must be finite and >= 0");
    }
  }
}

bool RequestContext::Matches(const ContextBucket& bucket) const {
  return std::find(active_buckets.begin(), active_buckets.end(), bucket) !=
         active_buckets.end();
}

RequestContext MakeRequestContext(Timestamp now, std::int64_t tz_offset,
                                  const DayBoundaries& boundaries,
                                  const ContextMap& custom) {
  RequestContext request;
  request.now = now;
  request.active_buckets.push_back(
      Bucketize(now, BucketKind::kTimeOfDay, tz_offset, boundaries));
  request.active_buckets.push_back(
      Bucketize(now, BucketKind::kDayOfWeek, tz_offset, boundaries));
  for (const auto& [key, value] : custom) {
    request.active_buckets.push_back({BucketKind::kCustom, key, value});
  }
  return request;
}

double BoostWeight(const RuleBody& body, const BoostParams& params) {
  if (!(params.beta > 0.0)) throw Error(ErrorCode::kInvalidConfig, "beta must be > 0");
  return std::visit(
      [&](const auto& rule) -> double {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, SequentialRule>) {
          return params.beta * rule.confidence;
        } else if constexpr (std::is_same_v<T, PeriodicRule>) {
          return params.beta *
                 std::min(1.0, static_cast<double>(rule.occurrences) / 10.0);
        } else if constexpr (std::is_same_v<T, ContextRule>) {
          return params.beta * std::min(1.0, rule.lift / params.lift_cap);
        } else {
          throw Error(ErrorCode::kInvariantViolation,
                      "calibration rules carry no boost weight");
        }
      },
      body);
}

std::optional<int> StepsSinceLast(const ItemSequence& history, const ItemId& item) {
  const auto n = static_cast<int>(history.size());
  for (int p = n - 1; p >= 0; --p) {
    if (history.items[p] == item) return n - p;
  }
  return std::nullopt;
}

namespace {

/// Evaluates the IF part; fills C_r and evidence on success.
bool Condition(const RuleBody& body, const ItemSequence& history,
               const RequestContext& request, ItemSet& targets,
               std::vector<std::string>& evidence) {
  return std::visit(
      [&](const auto& rule) -> bool {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, SequentialRule>) {
          const auto n = history.size();
          const auto start = n > static_cast<std::size_t>(rule.window)
                                 ? n - static_cast<std::size_t>(rule.window)
                                 : 0;
          std::set<ItemId> recent(history.items.begin() + static_cast<std::ptrdiff_t>(start),
                                  history.items.end());
          for (const auto& item : rule.antecedent) {
            if (!recent.contains(item)) return false;
          }
          targets = rule.consequent;
          for (const auto& item : rule.antecedent) evidence.push_back("matched:" + item);
          evidence.push_back("window:" + std::to_string(rule.window));
          return true;
        } else if constexpr (std::is_same_v<T, PeriodicRule>) {
          auto steps = StepsSinceLast(history, rule.item);
          if (!steps || *steps < rule.w_min || *steps > rule.w_max) return false;
          targets = {rule.item};
          evidence.push_back("steps_ago:" + std::to_string(*steps));
          evidence.push_back("interval:" + std::to_string(rule.w_min) + "-" +
                             std::to_string(rule.w_max));
          return true;
        } else if constexpr (std::is_same_v<T, ContextRule>) {
          if (!request.Matches(rule.bucket)) return false;
          targets = rule.items;
          std::string label = BucketKindName(rule.bucket.kind);
          if (rule.bucket.kind == BucketKind::kCustom) label += ":" + rule.bucket.key;
          evidence.push_back("bucket:" + label + "=" + rule.bucket.value);
          return true;
        } else {
          return false;
        }
      },
      body);
}

}  // namespace

std::vector<FiringRecord> MatchRules(const RuleSet& rules, const ItemSequence& history,
                                     const RequestContext& request, const UserId& user,
                                     const UserGroupMap& groups,
                                     const ScopeWeights& weights, ScopeMode mode) {
  std::vector<FiringRecord> firings;
  for (const auto& entry : rules.rules()) {
    if (entry.rule_class() == RuleClass::kCalibration) continue;
    if (!ScopeEligible(entry.scope, user, groups)) continue;
    const double boost = entry.v_r * weights.For(entry.scope.level);
    if (!(boost > 0.0)) continue;
    FiringRecord record;
    if (!Condition(entry.body, history, request, record.boosted_items, record.evidence)) {
      continue;
    }
    record.rule_id = entry.rule_id;
    record.scope = entry.scope;
    record.rule_class = entry.rule_class();
    record.applied_boost = boost;
    firings.push_back(std::move(record));
  }

  if (mode == ScopeMode::kFallback && !firings.empty()) {
    ScopeLevel best = ScopeLevel::kGlobal;
    for (const auto& f : firings) {
      best = std::min(best, f.scope.level);  // individual < group < global
    }
    std::erase_if(firings, [&](const FiringRecord& f) { return f.scope.level != best; });
  }
  return firings;
}

ActivationMap ApplyBoosts(const ActivationMap& activations,
                          const std::vector<FiringRecord>& firings, double cold_base) {
  ActivationMap out = activations;
  for (const auto& firing : firings) {
    for (const auto& item : firing.boosted_items) {
      auto [it, inserted] = out.try_emplace(item, cold_base);
      it->second += firing.applied_boost;
      if (!std::isfinite(it->second)) {
        throw Error(ErrorCode::kInvariantViolation, "non-finite boosted activation");
      }
    }
  }
  return out;
}

PopularityTable PopularityQuantiles(const std::map<ItemId, std::int64_t>& counts) {
  PopularityTable table;
  if (counts.empty()) return table;
  if (counts.size() == 1) {
    table[counts.begin()->first] = 0.5;
    return table;
  }
  std::vector<std::int64_t> sorted;
  for (const auto& [item, count] : counts) sorted.push_back(count);
  std::sort(sorted.begin(), sorted.end());
  const double denom = static_cast<double>(sorted.size() - 1);
  for (const auto& [item, count] : counts) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), count);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), count);
    const double less = static_cast<double>(lo - sorted.begin());
    const double equal = static_cast<double>(hi - lo);
    table[item] = (less + 0.5 * (equal - 1.0)) / denom;
  }
  return table;
}

double ItemPopularity(const PopularityTable& table, const ItemId& item) {
  auto it = table.find(item);
  return it == table.end() ? 0.5 : it->second;
}

double ProfilePopularity(const ItemSequence& history, const PopularityTable& table,
                         double quantile) {
  if (history.empty()) return 0.5;
  std::vector<double> values;
  values.reserve(history.size());
  for (const auto& item : history.items) values.push_back(ItemPopularity(table, item));
  std::sort(values.begin(), values.end());
  // Linear interpolation between order statistics.
  const double pos = quantile * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ActivationMap ApplyPopularityCalibration(const ActivationMap& activations,
                                         double user_profile_popularity,
                                         const PopularityTable& item_popularity,
                                         const PopularityCalibrationRule& rule) {
  ActivationMap out;
  for (const auto& [item, value] : activations) {
    const double gap =
        std::abs(ItemPopularity(item_popularity, item) - user_profile_popularity);
    out.emplace(item, value - rule.strength * gap);
  }
  return out;
}

}  // namespace hyper
