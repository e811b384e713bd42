#pragma once

#include <string>
#include <vector>

#include "hyper/declarative.hpp"
#include "hyper/rulemine.hpp"
#include "hyper/rules.hpp"

namespace hyper {

struct ScopeWeights {
  double individual = 1.0;
  double group = 0.5;
  double global = 0.25;

  double For(ScopeLevel level) const;
  void Validate() const;
  bool operator==(const ScopeWeights&) const = default;
};

enum class ScopeMode {
  kWeighted,  // every eligible scope fires, scaled by its weight
  kFallback,  // only the most specific scope that has a firing rule
};

/// One production rule whose IF part held for a request.
struct FiringRecord {
  std::string rule_id;
  Scope scope;
  RuleClass rule_class = RuleClass::kSequential;
  ItemSet boosted_items;
  double applied_boost = 0.0;  // v_r * scope weight
  std::vector<std::string> evidence;

  bool operator==(const FiringRecord&) const = default;
};

/// The situation a request is evaluated in.
struct RequestContext {
  Timestamp now = 0;
  std::vector<ContextBucket> active_buckets;

  bool Matches(const ContextBucket& bucket) const;
};

/// Active buckets: time of day, day of week and one per custom context entry.
RequestContext MakeRequestContext(Timestamp now, std::int64_t tz_offset,
                                  const DayBoundaries& boundaries = {},
                                  const ContextMap& custom = {});

/// v_r for a mined rule: beta scaled by confidence, recurrence or lift.
double BoostWeight(const RuleBody& body, const BoostParams& params);

/// Steps since the most recent occurrence of item (1 = last item); nullopt if absent.
std::optional<int> StepsSinceLast(const ItemSequence& history, const ItemId& item);

std::vector<FiringRecord> MatchRules(const RuleSet& rules, const ItemSequence& history,
                                     const RequestContext& request, const UserId& user,
                                     const UserGroupMap& groups,
                                     const ScopeWeights& weights = {},
                                     ScopeMode mode = ScopeMode::kWeighted);

/// A_k += applied_boost for each firing with i_k in C_r; unseen targets start at cold_base.
ActivationMap ApplyBoosts(const ActivationMap& activations,
                          const std::vector<FiringRecord>& firings, double cold_base);

/// item -> popularity quantile in [0,1].
using PopularityTable = std::map<ItemId, double>;

/// Mid-rank quantile of each item's count among all items (ties share a value).
PopularityTable PopularityQuantiles(const std::map<ItemId, std::int64_t>& counts);

/// Quantile 0.5 for items missing from the table.
double ItemPopularity(const PopularityTable& table, const ItemId& item);

/// The `quantile` quantile of popularity over the history's interactions.
double ProfilePopularity(const ItemSequence& history, const PopularityTable& table,
                         double quantile);

ActivationMap ApplyPopularityCalibration(const ActivationMap& activations,
                                         double user_profile_popularity,
                                         const PopularityTable& item_popularity,
                                         const PopularityCalibrationRule& rule);

}  // namespace hyper
