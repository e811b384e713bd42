#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyper/config.hpp"
#include "hyper/datamodel.hpp"
#include "hyper/rules.hpp"

namespace hyper {

struct SplitSpec {
  int holdout_n = 1;
  int min_history = 2;  // users with fewer interactions stay entirely in train

  void Validate() const;
};

struct TestCase {
  UserId user;
  Timestamp now = 0;  // the target's timestamp; history is strictly earlier
  ItemId target;
};

struct Split {
  EventLog train;
  std::vector<TestCase> cases;
};

/// Leave-last-n-out split; throws Error(kNoTestCases) if no user qualifies.
Split TemporalSplit(const EventLog& log, const SplitSpec& spec);

struct UserMetrics {
  UserId user;
  std::int64_t cases = 0;
  std::map<int, double> hr_at_k;
  std::map<int, double> mrr_at_k;
  std::map<int, double> ndcg_at_k;
};

struct MetricReport {
  std::map<int, double> hr_at_k;
  std::map<int, double> mrr_at_k;
  std::map<int, double> ndcg_at_k;
  double popularity_delta = 0.0;
  std::int64_t per_user_count = 0;
  std::int64_t test_cases = 0;
  std::map<std::string, std::map<std::string, std::string>> config;
  std::vector<UserMetrics> per_user;
};

std::string MetricReportToJson(const MetricReport& report);
std::string PerUserCsv(const MetricReport& report);

/// Ranked item list for one test case.
using CaseRecommender = std::function<std::vector<ItemId>(const TestCase&)>;

/**
 * @brief Next-item metrics for any recommender over a split.
 *
 * Popularity delta for a case is mean quantile of the top-max(k) list minus
 * the mean quantile of the user's training interactions; cases with an empty
 * list count as misses and are left out of the delta.
 */
MetricReport ScoreCases(const Split& split, const CaseRecommender& recommend,
                        const std::vector<int>& ks, const PopularityTable& popularity,
                        unsigned workers = 1);

struct EvalOptions {
  UserGroupMap groups;
  /// Rules to serve instead of mining the training split.
  std::optional<RuleSet> rules;
  /// Extra rules (e.g. manual calibration rules) appended to the mined set.
  RuleSet manual_rules;
  std::set<std::string> disabled;
  /// 0 = hardware concurrency.
  unsigned workers = 0;
};

/// Mines rules on the training split (unless supplied) and scores the engine.
MetricReport Evaluate(const EventLog& log, const SplitSpec& spec, const EngineConfig& config,
                      const std::vector<int>& ks, const EvalOptions& options = {});

/// Rules Evaluate would mine for this split.
RuleSet MineForEvaluation(const Split& split, const EngineConfig& config,
                          const UserGroupMap& groups);

}  // namespace hyper
