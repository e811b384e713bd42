#include "hyper/rulemine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "hyper/error.hpp"
#include "hyper/procedural.hpp"

namespace hyper {

void MiningConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (minsup < 1) fail("minsup must be >= 1");
  if (!(minconf > 0.0 && minconf <= 1.0)) fail("minconf must be in (0,1]");
  if (max_antecedent < 1) fail("max_antecedent must be >= 1");
  if (max_consequent < 1) fail("max_consequent must be >= 1");
  if (window < 1) fail("window must be >= 1");
  if (min_periodic_occ < 2) fail("min_periodic_occ must be >= 2");
  if (periodic_tolerance < 0) fail("periodic_tolerance must be >= 0");
  if (!(lift_threshold > 0.0) || !std::isfinite(lift_threshold)) {
    fail("lift_threshold must be > 0");
  }
  if (!(minsup_frac >= 0.0 && minsup_frac <= 1.0)) fail("minsup_frac must be in [0,1]");
}

// --- sequential ------------------------------------------------------------

namespace {

/**
 * Rule growth over interned items. A rule X -> Y holds in a sequence when the
 * latest first occurrence of X precedes the earliest last occurrence of Y.
 * Rules are seeded as 1 -> 1, grown on the right first and then on the left,
 * each side in increasing item order, so every rule has exactly one path.
 */
class SequentialMiner {
 public:
  SequentialMiner(const std::vector<ItemSequence>& sequences, const MiningConfig& cfg)
      : cfg_(cfg) {
    std::vector<ItemId> all;
    for (const auto& seq : sequences) all.insert(all.end(), seq.items.begin(), seq.items.end());
    items_ = MakeItemSet(std::move(all));
    std::unordered_map<ItemId, int> index;
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) index.emplace(items_[i], i);

    first_.resize(sequences.size());
    last_.resize(sequences.size());
    tids_.resize(items_.size());
    for (int s = 0; s < static_cast<int>(sequences.size()); ++s) {
      const auto& seq = sequences[s].items;
      for (int p = 0; p < static_cast<int>(seq.size()); ++p) {
        const int item = index.at(seq[p]);
        first_[s].try_emplace(item, p);
        last_[s][item] = p;
      }
      for (const auto& [item, pos] : first_[s]) tids_[item].push_back(s);
    }
    for (auto& t : tids_) std::sort(t.begin(), t.end());
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
      if (static_cast<std::int64_t>(tids_[i].size()) >= cfg_.minsup) frequent_.push_back(i);
    }
  }

  std::vector<SequentialRule> Run() {
    for (int x : frequent_) {
      for (int y : frequent_) {
        if (x == y) continue;
        std::vector<int> tids;
        for (int s : tids_[x]) {
          auto ly = last_[s].find(y);
          if (ly != last_[s].end() && first_[s].at(x) < ly->second) tids.push_back(s);
        }
        if (Frequent(tids)) Grow({x}, {y}, tids, tids_[x], true);
      }
    }
    return std::move(out_);
  }

 private:
  bool Frequent(const std::vector<int>& tids) const {
    return static_cast<std::int64_t>(tids.size()) >= cfg_.minsup;
  }

  int MaxFirst(int s, const std::vector<int>& x) const {
    int v = -1;
    for (int item : x) v = std::max(v, first_[s].at(item));
    return v;
  }

  int MinLast(int s, const std::vector<int>& y) const {
    int v = INT32_MAX;
    for (int item : y) v = std::min(v, last_[s].at(item));
    return v;
  }

  void Grow(const std::vector<int>& x, const std::vector<int>& y,
            const std::vector<int>& tids, const std::vector<int>& x_tids,
            bool allow_right) {
    const double confidence =
        static_cast<double>(tids.size()) / static_cast<double>(x_tids.size());
    if (confidence >= cfg_.minconf) Emit(x, y, tids.size(), confidence);

    auto contains = [](const std::vector<int>& v, int item) {
      return std::find(v.begin(), v.end(), item) != v.end();
    };

    if (allow_right && static_cast<int>(y.size()) < cfg_.max_consequent) {
      for (int z : frequent_) {
        if (z <= y.back() || contains(x, z)) continue;
        std::vector<int> next;
        for (int s : tids) {
          auto lz = last_[s].find(z);
          if (lz != last_[s].end() && lz->second > MaxFirst(s, x)) next.push_back(s);
        }
        if (!Frequent(next)) continue;
        auto y2 = y;
        y2.push_back(z);
        Grow(x, y2, next, x_tids, true);
      }
    }

    if (static_cast<int>(x.size()) < cfg_.max_antecedent) {
      for (int z : frequent_) {
        if (z <= x.back() || contains(y, z)) continue;
        std::vector<int> next;
        for (int s : tids) {
          auto fz = first_[s].find(z);
          if (fz != first_[s].end() && fz->second < MinLast(s, y)) next.push_back(s);
        }
        if (!Frequent(next)) continue;
        std::vector<int> x_next;
        std::set_intersection(x_tids.begin(), x_tids.end(), tids_[z].begin(),
                              tids_[z].end(), std::back_inserter(x_next));
        auto x2 = x;
        x2.push_back(z);
        Grow(x2, y, next, x_next, false);
      }
    }
  }

  void Emit(const std::vector<int>& x, const std::vector<int>& y, std::size_t support,
            double confidence) {
    SequentialRule rule;
    for (int i : x) rule.antecedent.push_back(items_[i]);
    for (int i : y) rule.consequent.push_back(items_[i]);
    rule.window = cfg_.window;
    rule.support = static_cast<std::int64_t>(support);
    rule.confidence = confidence;
    out_.push_back(std::move(rule));
  }

  const MiningConfig& cfg_;
  std::vector<ItemId> items_;
  std::vector<std::unordered_map<int, int>> first_;
  std::vector<std::unordered_map<int, int>> last_;
  std::vector<std::vector<int>> tids_;
  std::vector<int> frequent_;
  std::vector<SequentialRule> out_;
};

}  // namespace

std::vector<SequentialRule> MineSequential(const std::vector<ItemSequence>& sequences,
                                           const MiningConfig& cfg) {
  cfg.Validate();
  auto rules = SequentialMiner(sequences, cfg).Run();
  std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return rules;
}

// --- periodic --------------------------------------------------------------

std::vector<PeriodicRule> MinePeriodic(const ItemSequence& sequence,
                                       const MiningConfig& cfg) {
  cfg.Validate();
  std::map<ItemId, std::vector<int>> positions;
  for (int p = 0; p < static_cast<int>(sequence.size()); ++p) {
    positions[sequence.items[p]].push_back(p);
  }
  std::vector<PeriodicRule> rules;
  for (const auto& [item, pos] : positions) {
    if (static_cast<std::int64_t>(pos.size()) < cfg.min_periodic_occ) continue;
    int min_gap = INT32_MAX;
    int max_gap = 0;
    for (std::size_t k = 1; k < pos.size(); ++k) {
      const int gap = pos[k] - pos[k - 1];
      min_gap = std::min(min_gap, gap);
      max_gap = std::max(max_gap, gap);
    }
    if (max_gap - min_gap > cfg.periodic_tolerance) continue;
    rules.push_back({item, min_gap, max_gap, static_cast<std::int64_t>(pos.size())});
  }
  return rules;
}

// --- contextual ------------------------------------------------------------

std::vector<ContextRule> MineContextual(const EventLog& log, const BucketSpec& bucket,
                                        const MiningConfig& cfg) {
  cfg.Validate();
  std::map<ContextBucket, std::int64_t> bucket_events;
  std::map<ItemId, std::int64_t> item_events;
  std::map<std::pair<ContextBucket, ItemId>, std::int64_t> joint;
  std::int64_t total = 0;
  for (const auto& row : log.interactions()) {
    auto b = BucketOf(row, bucket);
    if (!b) continue;
    ++total;
    ++bucket_events[*b];
    ++item_events[row.item_id];
    ++joint[{*b, row.item_id}];
  }

  // (bucket, lift) -> (items, min support)
  std::map<std::pair<ContextBucket, double>, std::pair<ItemSet, std::int64_t>,
           std::function<bool(const std::pair<ContextBucket, double>&,
                              const std::pair<ContextBucket, double>&)>>
      merged([](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
      });
  for (const auto& [key, count] : joint) {
    const auto& [b, item] = key;
    if (count < cfg.minsup) continue;
    const double p_given_bucket =
        static_cast<double>(count) / static_cast<double>(bucket_events.at(b));
    const double p_item =
        static_cast<double>(item_events.at(item)) / static_cast<double>(total);
    const double lift = p_given_bucket / p_item;
    if (lift < cfg.lift_threshold) continue;
    auto& slot = merged[{b, lift}];
    slot.first.push_back(item);
    slot.second = slot.first.size() == 1 ? count : std::min(slot.second, count);
  }

  std::vector<ContextRule> rules;
  for (auto& [key, value] : merged) {
    rules.push_back({key.first, MakeItemSet(std::move(value.first)), key.second, value.second});
  }
  return rules;
}

// --- scoped ----------------------------------------------------------------

namespace {

std::int64_t ScopedMinsup(const MiningConfig& cfg, std::size_t members) {
  if (cfg.minsup_frac <= 0.0) return cfg.minsup;
  const auto scaled = static_cast<std::int64_t>(
      std::ceil(cfg.minsup_frac * static_cast<double>(members)));
  return std::max<std::int64_t>(1, scaled);
}

EventLog SubLog(const EventLog& log, const std::vector<UserId>& users) {
  std::vector<Interaction> rows;
  for (const auto& user : users) {
    auto span = log.user_rows(user);
    rows.insert(rows.end(), span.begin(), span.end());
  }
  return EventLog(std::move(rows));
}

class RuleCollector {
 public:
  RuleCollector(const BoostParams& boost) : boost_(boost) {}

  template <typename Rule>
  void Add(const Scope& scope, const std::vector<Rule>& rules) {
    int ordinal = 0;
    for (const auto& rule : rules) {
      RuleEntry entry;
      entry.scope = scope;
      entry.body = rule;
      entry.rule_id = FormatScope(scope) + "/" + RuleClassName(entry.rule_class()) +
                      "/" + std::to_string(ordinal++);
      entry.v_r = BoostWeight(entry.body, boost_);
      entry.provenance = Provenance::kMined;
      entries_.push_back(std::move(entry));
    }
  }

  RuleSet Finish() { return RuleSet(std::move(entries_)); }

 private:
  BoostParams boost_;
  std::vector<RuleEntry> entries_;
};

}  // namespace

RuleSet MineScoped(const EventLog& log, const UserGroupMap& groups,
                   const MiningConfig& cfg, const BucketSpec& bucket,
                   const BoostParams& boost) {
  cfg.Validate();
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "cannot mine an empty log");
  RuleCollector collector(boost);

  auto mine_pool = [&](const Scope& scope, const std::vector<UserId>& users) {
    std::vector<ItemSequence> sequences;
    for (const auto& user : users) sequences.push_back(UserHistory(log, user));
    MiningConfig scoped = cfg;
    scoped.minsup = ScopedMinsup(cfg, users.size());
    collector.Add(scope, MineSequential(sequences, scoped));
    if (scope.level == ScopeLevel::kIndividual) {
      collector.Add(scope, MinePeriodic(sequences.front(), cfg));
    }
    collector.Add(scope, MineContextual(SubLog(log, users), bucket, cfg));
  };

  const std::vector<UserId> everyone(log.users().begin(), log.users().end());
  mine_pool(Scope::Global(), everyone);

  for (const auto& [group, members] : groups.members()) {
    std::vector<UserId> present;
    for (const auto& user : members) {
      if (log.users().contains(user)) present.push_back(user);
    }
    if (!present.empty()) mine_pool(Scope::Group(group), present);
  }

  for (const auto& user : everyone) mine_pool(Scope::Individual(user), {user});
  return collector.Finish();
}

}  // namespace hyper
