#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyper/declarative.hpp"
#include "hyper/procedural.hpp"
#include "hyper/rules.hpp"

namespace hyper {

struct EngineParams {
  ActivationParams activation;
  ScopeWeights weights;
  ScopeMode scope_mode = ScopeMode::kWeighted;
  int exclude_recent = 0;  // drop the last j consumed items from the candidates
  std::int64_t tz_offset = 0;
  DayBoundaries boundaries;

  void Validate() const;
  bool operator==(const EngineParams&) const = default;
};

struct Recommendation {
  ItemId item_id;
  double base_activation = 0.0;
  /// Non-positive shift from popularity calibration rules (0 when none apply).
  double calibration_adjustment = 0.0;
  double final_activation = 0.0;
  std::vector<FiringRecord> firings;  // firings whose C_r contains the item
  int rank = 0;

  bool operator==(const Recommendation&) const = default;
};

struct ExplanationLine {
  std::string rule_id;  // empty for the declarative fallback line
  std::string scope_label;
  std::string text;
  std::optional<double> contribution_share;

  bool operator==(const ExplanationLine&) const = default;
};

struct Explanation {
  ItemId item_id;
  std::vector<ExplanationLine> lines;
};

extern const char* const kDeclarativeFallbackText;

Explanation Explain(const Recommendation& rec, const RuleSet& rules);

struct RankChange {
  ItemId item_id;
  std::optional<int> rank_before;
  std::optional<int> rank_after;
  std::optional<double> activation_before;
  std::optional<double> activation_after;
};

struct AblationResult {
  std::vector<Recommendation> baseline;
  std::vector<Recommendation> ablated;
  std::vector<RankChange> diff;
};

/**
 * @brief Declarative memory plus production rules behind one request API.
 *
 * All methods are const; concurrent requests are safe.
 */
class Engine {
 public:
  Engine(ChunkStore store, RuleSet rules, UserGroupMap groups, EngineParams params);

  const ChunkStore& store() const { return store_; }
  const RuleSet& rules() const { return rules_; }
  const UserGroupMap& groups() const { return groups_; }
  const EngineParams& params() const { return params_; }
  const PopularityTable& popularity() const { return popularity_; }

  /// Top-k; throws Error(kUnknownRule) for unknown disabled ids and
  /// Error(kNoCandidates) when nothing can be recommended.
  std::vector<Recommendation> Recommend(const UserId& user, Timestamp now, int k,
                                        const std::set<std::string>& disabled = {},
                                        const ContextMap& request_context = {}) const;

  /// Every candidate, ranked.
  std::vector<Recommendation> RankAll(const UserId& user, Timestamp now,
                                      const std::set<std::string>& disabled = {},
                                      const ContextMap& request_context = {}) const;

  AblationResult Ablate(const UserId& user, Timestamp now, int k,
                        const std::set<std::string>& disabled,
                        const ContextMap& request_context = {}) const;

  /// The firings a request produces, before candidate ranking.
  std::vector<FiringRecord> Firings(const ItemSequence& history, const UserId& user,
                                    Timestamp now, const RuleSet& rules,
                                    const ContextMap& request_context) const;

 private:
  std::vector<Recommendation> Rank(const UserId& user, Timestamp now, const RuleSet& rules,
                                   const ContextMap& request_context) const;

  ChunkStore store_;
  RuleSet rules_;
  UserGroupMap groups_;
  EngineParams params_;
  PopularityTable popularity_;
};

/// One JSON-lines record per recommendation.
std::string RecommendationToJson(const Recommendation& rec, const Explanation& explanation);
std::string ExplanationToJson(const Recommendation& rec, const Explanation& explanation);
std::string DiffToJson(const std::vector<RankChange>& diff);

}  // namespace hyper
