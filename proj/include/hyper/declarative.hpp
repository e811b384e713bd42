#pragma once

#include <map>
#include <set>
#include <span>
#include <utility>

#include "hyper/datamodel.hpp"

namespace hyper {

enum class TimeMode {
  kSeconds,  // t_j is wall-clock seconds since the occurrence
  kSteps,    // t_j is the number of interactions since the occurrence
};

struct ActivationParams {
  double decay = 0.5;
  int context_size = 3;
  double s_max = 2.0;
  double cold_base = -10.0;
  std::int64_t min_elapsed = 1;
  TimeMode time_mode = TimeMode::kSeconds;

  /// Throws Error(kInvalidConfig) on a violated invariant.
  void Validate() const;
  bool operator==(const ActivationParams&) const = default;
};

using ActivationMap = std::map<ItemId, double>;

/**
 * @brief Co-occurrence and unigram statistics used for associative strength.
 *
 * Two positions p < q of the same history co-occur when q - p < window and
 * their items differ. Pairs are stored with the smaller id first so lookups
 * are symmetric.
 */
struct AssociationTable {
  int window = 5;
  std::map<std::pair<ItemId, ItemId>, std::int64_t> cooc;
  std::map<ItemId, std::int64_t> counts;
  std::int64_t total_events = 0;

  static AssociationTable Build(const EventLog& log, int window);

  std::int64_t cooccurrences(const ItemId& a, const ItemId& b) const;
  std::int64_t count(const ItemId& item) const;
  bool operator==(const AssociationTable&) const = default;
};

/**
 * @brief Declarative memory: per-user chunks plus association statistics.
 *
 * The memory log supplies each user's occurrences; the association table may
 * come from a different (e.g. training-only) log.
 */
class ChunkStore {
 public:
  ChunkStore() = default;
  ChunkStore(EventLog memory, AssociationTable associations);
  ChunkStore(const EventLog& log, int cooc_window);

  const EventLog& memory() const { return memory_; }
  const AssociationTable& associations() const { return associations_; }

  bool has_user(const UserId& user) const;
  /// The user's interactions with timestamp strictly less than now.
  ItemSequence HistoryBefore(const UserId& user, Timestamp now) const;

 private:
  EventLog memory_;
  AssociationTable associations_;
};

/// ln(sum_j t_j^-d) with t_j = max(now - occ_j, min_elapsed).
double BaseLevel(std::span<const Timestamp> occurrences, Timestamp now,
                 const ActivationParams& params);

/// Capped positive PMI of the two items; 0 when they never co-occur.
double AssociationStrength(const ItemId& source, const ItemId& target,
                           const AssociationTable& table,
                           const ActivationParams& params);

/// Uniform-attention spreading activation from context into target.
double Spreading(std::span<const ItemId> context, const ItemId& target,
                 const AssociationTable& table, const ActivationParams& params);

/// The last `count` distinct items of a history, most recent first.
std::vector<ItemId> RecentDistinct(const ItemSequence& history, int count);

/// Activation of each candidate for `user` at time `now`.
ActivationMap ScoreCandidates(const UserId& user, Timestamp now,
                              const std::set<ItemId>& candidates,
                              const ChunkStore& store,
                              const ActivationParams& params);

/// Same as above, with the history supplied directly.
ActivationMap ScoreCandidates(const ItemSequence& history, Timestamp now,
                              const std::set<ItemId>& candidates,
                              const AssociationTable& table,
                              const ActivationParams& params);

}  // namespace hyper
