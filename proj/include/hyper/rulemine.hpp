#pragma once

#include <vector>

#include "hyper/datamodel.hpp"
#include "hyper/rules.hpp"

namespace hyper {

struct MiningConfig {
  std::int64_t minsup = 3;
  double minconf = 0.5;
  int max_antecedent = 3;
  int max_consequent = 1;
  int window = 10;  // fire window stored on sequential rules
  std::int64_t min_periodic_occ = 3;
  int periodic_tolerance = 1;
  double lift_threshold = 2.0;
  /// When > 0, sequence support thresholds become ceil(minsup_frac * |users in scope|).
  double minsup_frac = 0.0;

  void Validate() const;
  bool operator==(const MiningConfig&) const = default;
};

struct BoostParams {
  double beta = 1.0;
  double lift_cap = 5.0;

  bool operator==(const BoostParams&) const = default;
};

/// All X -> Y with support >= minsup and confidence >= minconf.
std::vector<SequentialRule> MineSequential(const std::vector<ItemSequence>& sequences,
                                           const MiningConfig& cfg);

std::vector<PeriodicRule> MinePeriodic(const ItemSequence& sequence,
                                       const MiningConfig& cfg);

std::vector<ContextRule> MineContextual(const EventLog& log, const BucketSpec& bucket,
                                        const MiningConfig& cfg);

/// Runs every miner at individual, group and global scope.
RuleSet MineScoped(const EventLog& log, const UserGroupMap& groups,
                   const MiningConfig& cfg, const BucketSpec& bucket,
                   const BoostParams& boost);

}  // namespace hyper
