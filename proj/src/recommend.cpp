#include "hyper/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hyper/error.hpp"
#include "json.hpp"

namespace hyper {

const char* const kDeclarativeFallbackText =
    "Recommended from your memory of past interactions (recency and frequency).";

void EngineParams::Validate() const {
  activation.Validate();
  weights.Validate();
  if (exclude_recent < 0) throw Error(ErrorCode::kInvalidConfig, "exclude_recent must be >= 0");
  if (!boundaries.valid()) throw Error(ErrorCode::kInvalidConfig, "invalid time-of-day boundaries");
}

namespace {

/// Popularity over the memory catalog, counted in the association log.
PopularityTable CatalogPopularity(const ChunkStore& store) {
  auto counts = store.associations().counts;
  for (const auto& item : store.memory().catalog()) counts.try_emplace(item, 0);
  return PopularityQuantiles(counts);
}

}  // namespace

Engine::Engine(ChunkStore store, RuleSet rules, UserGroupMap groups, EngineParams params)
    : store_(std::move(store)),
      rules_(std::move(rules)),
      groups_(std::move(groups)),
      params_(params),
      popularity_(CatalogPopularity(store_)) {
  params_.Validate();
}

std::vector<FiringRecord> Engine::Firings(const ItemSequence& history, const UserId& user,
                                          Timestamp now, const RuleSet& rules,
                                          const ContextMap& request_context) const {
  const auto request =
      MakeRequestContext(now, params_.tz_offset, params_.boundaries, request_context);
  return MatchRules(rules, history, request, user, groups_, params_.weights,
                    params_.scope_mode);
}

std::vector<Recommendation> Engine::Rank(const UserId& user, Timestamp now,
                                         const RuleSet& rules,
                                         const ContextMap& request_context) const {
  const auto history = store_.HistoryBefore(user, now);
  const auto firings = Firings(history, user, now, rules, request_context);

  std::set<ItemId> candidates(history.items.begin(), history.items.end());
  for (const auto& firing : firings) {
    candidates.insert(firing.boosted_items.begin(), firing.boosted_items.end());
  }
  const auto recent = static_cast<std::size_t>(params_.exclude_recent);
  for (std::size_t p = history.size() > recent ? history.size() - recent : 0;
       p < history.size(); ++p) {
    candidates.erase(history.items[p]);
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kNoCandidates, "nothing to recommend for '" + user + "'");
  }

  const auto base = ScoreCandidates(history, now, candidates, store_.associations(),
                                    params_.activation);
  auto boosted = ApplyBoosts(base, firings, params_.activation.cold_base);
  std::erase_if(boosted, [&](const auto& kv) { return !candidates.contains(kv.first); });

  auto calibrated = boosted;
  for (const auto& entry : rules.rules()) {
    const auto* rule = std::get_if<PopularityCalibrationRule>(&entry.body);
    if (rule == nullptr || !ScopeEligible(entry.scope, user, groups_)) continue;
    const double profile =
        ProfilePopularity(history, popularity_, rule->profile_quantile_target);
    calibrated = ApplyPopularityCalibration(calibrated, profile, popularity_, *rule);
  }

  std::vector<Recommendation> ranked;
  ranked.reserve(calibrated.size());
  for (const auto& [item, value] : calibrated) {
    Recommendation rec;
    rec.item_id = item;
    rec.base_activation = base.at(item);
    rec.calibration_adjustment = value - boosted.at(item);
    rec.final_activation = value;
    for (const auto& firing : firings) {
      if (std::binary_search(firing.boosted_items.begin(), firing.boosted_items.end(), item)) {
        rec.firings.push_back(firing);
      }
    }
    ranked.push_back(std::move(rec));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.final_activation != b.final_activation) return a.final_activation > b.final_activation;
    if (a.base_activation != b.base_activation) return a.base_activation > b.base_activation;
    return a.item_id < b.item_id;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i + 1);
  return ranked;
}

std::vector<Recommendation> Engine::RankAll(const UserId& user, Timestamp now,
                                            const std::set<std::string>& disabled,
                                            const ContextMap& request_context) const {
  if (disabled.empty()) return Rank(user, now, rules_, request_context);
  return Rank(user, now, rules_.Without(disabled), request_context);
}

std::vector<Recommendation> Engine::Recommend(const UserId& user, Timestamp now, int k,
                                              const std::set<std::string>& disabled,
                                              const ContextMap& request_context) const {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  auto ranked = RankAll(user, now, disabled, request_context);
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
  return ranked;
}

AblationResult Engine::Ablate(const UserId& user, Timestamp now, int k,
                              const std::set<std::string>& disabled,
                              const ContextMap& request_context) const {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  const auto ablated_rules = rules_.Without(disabled);
  const auto full_before = Rank(user, now, rules_, request_context);
  const auto full_after = Rank(user, now, ablated_rules, request_context);

  AblationResult result;
  const auto top = static_cast<std::size_t>(k);
  result.baseline.assign(full_before.begin(),
                         full_before.begin() + static_cast<std::ptrdiff_t>(std::min(top, full_before.size())));
  result.ablated.assign(full_after.begin(),
                        full_after.begin() + static_cast<std::ptrdiff_t>(std::min(top, full_after.size())));

  auto index = [](const std::vector<Recommendation>& recs) {
    std::map<ItemId, const Recommendation*> out;
    for (const auto& rec : recs) out.emplace(rec.item_id, &rec);
    return out;
  };
  const auto all_before = index(full_before);
  const auto all_after = index(full_after);
  const auto top_before = index(result.baseline);
  const auto top_after = index(result.ablated);

  std::set<ItemId> items;
  for (const auto& [item, rec] : top_before) items.insert(item);
  for (const auto& [item, rec] : top_after) items.insert(item);
  for (const auto& item : items) {
    RankChange change;
    change.item_id = item;
    if (auto it = top_before.find(item); it != top_before.end()) change.rank_before = it->second->rank;
    if (auto it = top_after.find(item); it != top_after.end()) change.rank_after = it->second->rank;
    if (change.rank_before == change.rank_after) continue;
    if (auto it = all_before.find(item); it != all_before.end()) {
      change.activation_before = it->second->final_activation;
    }
    if (auto it = all_after.find(item); it != all_after.end()) {
      change.activation_after = it->second->final_activation;
    }
    result.diff.push_back(std::move(change));
  }
  return result;
}

// --- explanations ----------------------------------------------------------

namespace {

std::string JoinItems(const ItemSet& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

std::string EvidenceValue(const FiringRecord& firing, const std::string& key) {
  const auto prefix = key + ":";
  for (const auto& e : firing.evidence) {
    if (e.starts_with(prefix)) return e.substr(prefix.size());
  }
  return "?";
}

std::string BucketPhrase(const ContextBucket& bucket) {
  static const std::map<std::string, std::string> kDays = {
      {"mon", "Mondays"}, {"tue", "Tuesdays"}, {"wed", "Wednesdays"}, {"thu", "Thursdays"},
      {"fri", "Fridays"}, {"sat", "Saturdays"}, {"sun", "Sundays"}};
  switch (bucket.kind) {
    case BucketKind::kTimeOfDay: return "in the " + bucket.value;
    case BucketKind::kDayOfWeek: return "on " + kDays.at(bucket.value);
    case BucketKind::kCustom: return "in the " + bucket.key + "=" + bucket.value + " context";
  }
  return "";
}

std::string LineText(const FiringRecord& firing, const RuleEntry* entry) {
  switch (firing.rule_class) {
    case RuleClass::kSequential: {
      ItemSet items;
      if (entry != nullptr) {
        items = std::get<SequentialRule>(entry->body).antecedent;
      } else {
        for (const auto& e : firing.evidence) {
          if (e.starts_with("matched:")) items.push_back(e.substr(8));
        }
      }
      return "This item is recommended because you recently interacted with: " +
             JoinItems(items) + ".";
    }
    case RuleClass::kPeriodic:
      return "This item is recommended because you regularly return to it, and last used it " +
             EvidenceValue(firing, "steps_ago") + " steps ago.";
    case RuleClass::kContextual: {
      std::string phrase = "in this context";
      if (entry != nullptr) phrase = BucketPhrase(std::get<ContextRule>(entry->body).bucket);
      return "This item is recommended because you like it " + phrase + ".";
    }
    case RuleClass::kCalibration:
      break;
  }
  return "";
}

}  // namespace

Explanation Explain(const Recommendation& rec, const RuleSet& rules) {
  Explanation out;
  out.item_id = rec.item_id;
  if (rec.firings.empty()) {
    out.lines.push_back({"", "memory", kDeclarativeFallbackText, std::nullopt});
    return out;
  }
  double total = 0.0;
  for (const auto& firing : rec.firings) total += firing.applied_boost;
  for (const auto& firing : rec.firings) {
    const auto* entry = rules.find(firing.rule_id);
    if (entry != nullptr && entry->rule_class() != firing.rule_class) entry = nullptr;
    out.lines.push_back({firing.rule_id, ScopeLabel(firing.scope.level),
                         LineText(firing, entry), firing.applied_boost / total});
  }
  return out;
}

// --- JSON ------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json LinesJson(const Explanation& explanation) {
  ordered_json lines = ordered_json::array();
  for (const auto& line : explanation.lines) {
    ordered_json j;
    j["rule_id"] = line.rule_id;
    j["scope"] = line.scope_label;
    j["text"] = line.text;
    j["share"] = line.contribution_share ? ordered_json(*line.contribution_share)
                                         : ordered_json(nullptr);
    lines.push_back(std::move(j));
  }
  return lines;
}

template <typename T>
ordered_json OrNull(const std::optional<T>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

}  // namespace

std::string RecommendationToJson(const Recommendation& rec, const Explanation& explanation) {
  ordered_json j;
  j["rank"] = rec.rank;
  j["item_id"] = rec.item_id;
  j["base_activation"] = rec.base_activation;
  j["final_activation"] = rec.final_activation;
  if (rec.calibration_adjustment != 0.0) j["calibration_adjustment"] = rec.calibration_adjustment;
  ordered_json firings = ordered_json::array();
  for (const auto& firing : rec.firings) {
    ordered_json f;
    f["rule_id"] = firing.rule_id;
    f["scope"] = FormatScope(firing.scope);
    f["boost"] = firing.applied_boost;
    firings.push_back(std::move(f));
  }
  j["firings"] = std::move(firings);
  j["explanation_lines"] = LinesJson(explanation);
  return j.dump();
}

std::string ExplanationToJson(const Recommendation& rec, const Explanation& explanation) {
  ordered_json j;
  j["rank"] = rec.rank;
  j["item_id"] = rec.item_id;
  j["lines"] = LinesJson(explanation);
  return j.dump();
}

std::string DiffToJson(const std::vector<RankChange>& diff) {
  ordered_json out = ordered_json::array();
  for (const auto& change : diff) {
    ordered_json j;
    j["item_id"] = change.item_id;
    j["rank_before"] = OrNull(change.rank_before);
    j["rank_after"] = OrNull(change.rank_after);
    j["activation_before"] = OrNull(change.activation_before);
    j["activation_after"] = OrNull(change.activation_after);
    out.push_back(std::move(j));
  }
  return out.dump();
}

}  // namespace hyper
