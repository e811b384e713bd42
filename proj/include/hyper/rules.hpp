#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyper/datamodel.hpp"

namespace hyper {

/// Sorted, duplicate-free item list.
using ItemSet = std::vector<ItemId>;

ItemSet MakeItemSet(std::vector<ItemId> items);

/// X -> Y: every item of X occurs strictly before every item of Y.
struct SequentialRule {
  ItemSet antecedent;
  ItemSet consequent;
  int window = 10;
  std::int64_t support = 0;
  double confidence = 0.0;

  bool operator==(const SequentialRule&) const = default;
};

/// An item that recurs every w_min..w_max interactions.
struct PeriodicRule {
  ItemId item;
  int w_min = 1;
  int w_max = 1;
  std::int64_t occurrences = 0;

  bool operator==(const PeriodicRule&) const = default;
};

struct ContextRule {
  ContextBucket bucket;
  ItemSet items;
  double lift = 0.0;
  std::int64_t support = 0;

  bool operator==(const ContextRule&) const = default;
};

enum class CalibrationDirection { kMatchProfile };

/**
 * @brief Penalises items whose popularity differs from the user's profile.
 *
 * The profile is the `profile_quantile_target` quantile of the popularity
 * quantiles of the user's consumed items (0.5 = median).
 */
struct PopularityCalibrationRule {
  double profile_quantile_target = 0.5;
  double strength = 1.0;
  CalibrationDirection direction = CalibrationDirection::kMatchProfile;

  bool operator==(const PopularityCalibrationRule&) const = default;
};

using RuleBody = std::variant<SequentialRule, PeriodicRule, ContextRule,
                              PopularityCalibrationRule>;

enum class RuleClass { kSequential, kPeriodic, kContextual, kCalibration };

RuleClass ClassOf(const RuleBody& body);
std::string RuleClassName(RuleClass cls);

enum class ScopeLevel { kIndividual, kGroup, kGlobal };

struct Scope {
  ScopeLevel level = ScopeLevel::kGlobal;
  std::string owner;  // user id or group id; empty for global

  static Scope Individual(UserId user) { return {ScopeLevel::kIndividual, std::move(user)}; }
  static Scope Group(GroupId group) { return {ScopeLevel::kGroup, std::move(group)}; }
  static Scope Global() { return {ScopeLevel::kGlobal, {}}; }

  bool operator==(const Scope&) const = default;
};

/// "individual", "group" or "global".
std::string ScopeLabel(ScopeLevel level);
/// "global", "group:<id>" or "individual:<id>".
std::string FormatScope(const Scope& scope);
std::optional<Scope> ParseScope(const std::string& text);

/// True when a rule of this scope may fire for the user.
bool ScopeEligible(const Scope& scope, const UserId& user,
                   const UserGroupMap& groups);

enum class Provenance { kMined, kManual };

struct RuleEntry {
  std::string rule_id;
  Scope scope;
  double v_r = 1.0;
  Provenance provenance = Provenance::kMined;
  RuleBody body;

  RuleClass rule_class() const { return ClassOf(body); }
  bool operator==(const RuleEntry&) const = default;
};

/**
 * @brief Ordered collection of production rules with unique ids.
 */
class RuleSet {
 public:
  RuleSet() = default;
  /// Throws Error(kMalformedInput) on duplicate ids or invalid bodies.
  explicit RuleSet(std::vector<RuleEntry> rules);

  const std::vector<RuleEntry>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  const RuleEntry* find(const std::string& rule_id) const;
  bool contains(const std::string& rule_id) const { return find(rule_id) != nullptr; }

  /// Copy without the given ids; throws Error(kUnknownRule) for unknown ids.
  RuleSet Without(const std::set<std::string>& rule_ids) const;
  /// Appends another set; ids must stay unique.
  RuleSet Merged(const RuleSet& other) const;

  bool operator==(const RuleSet&) const = default;

 private:
  std::vector<RuleEntry> rules_;
};

/// Throws Error(kMalformedInput) when a rule violates its type invariants.
void ValidateRule(const RuleEntry& entry);

std::string SerializeRule(const RuleEntry& entry);
RuleEntry ParseRule(const std::string& line);

std::string SerializeRules(const RuleSet& rules);
RuleSet ParseRules(const std::string& text);
RuleSet LoadRules(const std::filesystem::path& path);

}  // namespace hyper
