#include "hyper/declarative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyper/error.hpp"

namespace hyper {

void ActivationParams::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (!(decay > 0.0) || !std::isfinite(decay)) fail("decay must be > 0");
  if (context_size < 0) fail("context_size must be >= 0");
  if (!std::isfinite(s_max) || s_max < 0.0) fail("s_max must be finite and >= 0");
  if (!std::isfinite(cold_base)) fail("cold_base must be finite");
  if (min_elapsed < 1) fail("min_elapsed must be >= 1");
}

AssociationTable AssociationTable::Build(const EventLog& log, int window) {
  if (window < 1) throw Error(ErrorCode::kInvalidConfig, "cooc_window must be >= 1");
  AssociationTable table;
  table.window = window;
  table.total_events = static_cast<std::int64_t>(log.size());
  for (const auto& user : log.users()) {
    auto rows = log.user_rows(user);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      ++table.counts[rows[p].item_id];
      const std::size_t end = std::min(rows.size(), p + static_cast<std::size_t>(window));
      for (std::size_t q = p + 1; q < end; ++q) {
        const auto& a = rows[p].item_id;
        const auto& b = rows[q].item_id;
        if (a == b) continue;
        ++table.cooc[a < b ? std::pair(a, b) : std::pair(b, a)];
      }
    }
  }
  return table;
}

std::int64_t AssociationTable::cooccurrences(const ItemId& a, const ItemId& b) const {
  auto it = cooc.find(a < b ? std::pair(a, b) : std::pair(b, a));
  return it == cooc.end() ? 0 : it->second;
}

std::int64_t AssociationTable::count(const ItemId& item) const {
  auto it = counts.find(item);
  return it == counts.end() ? 0 : it->second;
}

ChunkStore::ChunkStore(EventLog memory, AssociationTable associations)
    : memory_(std::move(memory)), associations_(std::move(associations)) {}

ChunkStore::ChunkStore(const EventLog& log, int cooc_window)
    : memory_(log), associations_(AssociationTable::Build(log, cooc_window)) {}

bool ChunkStore::has_user(const UserId& user) const {
  return memory_.users().contains(user);
}

ItemSequence ChunkStore::HistoryBefore(const UserId& user, Timestamp now) const {
  ItemSequence seq;
  seq.user_id = user;
  for (const auto& row : memory_.user_rows(user)) {
    if (row.timestamp >= now) break;
    seq.items.push_back(row.item_id);
    seq.times.push_back(row.timestamp);
  }
  return seq;
}

double BaseLevel(std::span<const Timestamp> occurrences, Timestamp now,
                 const ActivationParams& params) {
  if (occurrences.empty()) {
    throw Error(ErrorCode::kNoOccurrences, "base level of an unseen chunk");
  }
  // Log-sum-exp over -d * ln(t_j) keeps the result finite for any decay.
  std::vector<double> terms;
  terms.reserve(occurrences.size());
  for (Timestamp occ : occurrences) {
    if (occ > now) {
      throw Error(ErrorCode::kInvariantViolation, "occurrence after now");
    }
    const auto elapsed = std::max<std::int64_t>(now - occ, params.min_elapsed);
    terms.push_back(-params.decay * std::log(static_cast<double>(elapsed)));
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double term : terms) sum += std::exp(term - peak);
  return peak + std::log(sum);
}

double AssociationStrength(const ItemId& source, const ItemId& target,
                           const AssociationTable& table,
                           const ActivationParams& params) {
  const auto joint = table.cooccurrences(source, target);
  if (joint <= 0) return 0.0;
  const double ratio =
      (static_cast<double>(joint) * static_cast<double>(table.total_events)) /
      (static_cast<double>(table.count(source)) *
       static_cast<double>(table.count(target)));
  return std::clamp(std::log(ratio), 0.0, params.s_max);
}

double Spreading(std::span<const ItemId> context, const ItemId& target,
                 const AssociationTable& table, const ActivationParams& params) {
  if (context.empty()) return 0.0;
  const double weight = 1.0 / static_cast<double>(context.size());
  double total = 0.0;
  for (const auto& source : context) {
    total += weight * AssociationStrength(source, target, table, params);
  }
  return total;
}

std::vector<ItemId> RecentDistinct(const ItemSequence& history, int count) {
  std::vector<ItemId> out;
  for (auto it = history.items.rbegin();
       it != history.items.rend() && static_cast<int>(out.size()) < count; ++it) {
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
  }
  return out;
}

ActivationMap ScoreCandidates(const ItemSequence& history, Timestamp now,
                              const std::set<ItemId>& candidates,
                              const AssociationTable& table,
                              const ActivationParams& params) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidates, "no candidates to score");
  }
  const bool steps = params.time_mode == TimeMode::kSteps;
  const Timestamp clock = steps ? static_cast<Timestamp>(history.size()) : now;

  std::map<ItemId, std::vector<Timestamp>> occurrences;
  for (std::size_t p = 0; p < history.size(); ++p) {
    if (!candidates.contains(history.items[p])) continue;
    occurrences[history.items[p]].push_back(
        steps ? static_cast<Timestamp>(p) : history.times[p]);
  }

  const auto recent = RecentDistinct(history, params.context_size);
  ActivationMap out;
  for (const auto& item : candidates) {
    std::vector<ItemId> context;
    for (const auto& source : recent) {
      if (source != item) context.push_back(source);
    }
    auto occ = occurrences.find(item);
    const double base = occ == occurrences.end()
                            ? params.cold_base
                            : BaseLevel(occ->second, clock, params);
    const double value = base + Spreading(context, item, table, params);
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kInvariantViolation, "non-finite activation for " + item);
    }
    out.emplace(item, value);
  }
  return out;
}

ActivationMap ScoreCandidates(const UserId& user, Timestamp now,
                              const std::set<ItemId>& candidates,
                              const ChunkStore& store,
                              const ActivationParams& params) {
  return ScoreCandidates(store.HistoryBefore(user, now), now, candidates,
                         store.associations(), params);
}

}  // namespace hyper
