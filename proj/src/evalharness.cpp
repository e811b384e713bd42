#include "hyper/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hyper/error.hpp"
#include "hyper/recommend.hpp"
#include "hyper/rulemine.hpp"
#include "json.hpp"

namespace hyper {

void SplitSpec::Validate() const {
  if (holdout_n < 1) throw Error(ErrorCode::kInvalidConfig, "holdout_n must be >= 1");
  if (min_history <= holdout_n) {
    throw Error(ErrorCode::kInvalidConfig, "min_history must exceed holdout_n");
  }
}

Split TemporalSplit(const EventLog& log, const SplitSpec& spec) {
  spec.Validate();
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "cannot split an empty log");
  std::vector<Interaction> train;
  Split split;
  for (const auto& user : log.users()) {
    auto rows = log.user_rows(user);
    if (rows.size() < static_cast<std::size_t>(spec.min_history)) {
      train.insert(train.end(), rows.begin(), rows.end());
      continue;
    }
    const std::size_t first_target = rows.size() - static_cast<std::size_t>(spec.holdout_n);
    // Train keeps only interactions strictly earlier than the first target.
    for (std::size_t i = 0; i < first_target; ++i) {
      if (rows[i].timestamp < rows[first_target].timestamp) train.push_back(rows[i]);
    }
    for (std::size_t i = first_target; i < rows.size(); ++i) {
      split.cases.push_back({user, rows[i].timestamp, rows[i].item_id});
    }
  }
  if (split.cases.empty()) throw Error(ErrorCode::kNoTestCases, "no user has enough history");
  split.train = EventLog(std::move(train));
  return split;
}

namespace {

struct CaseResult {
  std::optional<int> rank;  // 1-based position of the target
  std::optional<double> popularity_delta;
};

std::vector<int> NormalizeKs(std::vector<int> ks) {
  if (ks.empty()) throw Error(ErrorCode::kInvalidConfig, "need at least one k");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k values must be >= 1");
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

double MeanPopularity(const std::vector<ItemId>& items, const PopularityTable& table) {
  double total = 0.0;
  for (const auto& item : items) total += ItemPopularity(table, item);
  return total / static_cast<double>(items.size());
}

}  // namespace

MetricReport ScoreCases(const Split& split, const CaseRecommender& recommend,
                        const std::vector<int>& ks_in, const PopularityTable& popularity,
                        unsigned workers) {
  const auto ks = NormalizeKs(ks_in);
  const auto max_k = static_cast<std::size_t>(ks.back());
  const auto& cases = split.cases;
  if (cases.empty()) throw Error(ErrorCode::kNoTestCases, "empty split");

  std::map<UserId, double> train_popularity;
  for (const auto& user : split.train.users()) {
    std::vector<ItemId> items;
    for (const auto& row : split.train.user_rows(user)) items.push_back(row.item_id);
    train_popularity[user] = MeanPopularity(items, popularity);
  }

  std::vector<CaseResult> results(cases.size());
  auto run_cases = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t c = begin; c < cases.size(); c += stride) {
      auto list = recommend(cases[c]);
      if (list.size() > max_k) list.resize(max_k);
      CaseResult result;
      auto hit = std::find(list.begin(), list.end(), cases[c].target);
      if (hit != list.end()) result.rank = static_cast<int>(hit - list.begin()) + 1;
      auto profile = train_popularity.find(cases[c].user);
      if (!list.empty() && profile != train_popularity.end()) {
        result.popularity_delta = MeanPopularity(list, popularity) - profile->second;
      }
      results[c] = result;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cases.size()));
  if (workers <= 1) {
    run_cases(0, 1);
  } else {
    std::vector<std::exception_ptr> failures(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_cases(w, workers);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  // Aggregation walks cases in order so results are reproducible bit for bit.
  MetricReport report;
  std::map<UserId, UserMetrics> per_user;
  double delta_sum = 0.0;
  std::int64_t delta_cases = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& result = results[c];
    auto& user = per_user[cases[c].user];
    user.user = cases[c].user;
    ++user.cases;
    for (int k : ks) {
      const bool hit = result.rank && *result.rank <= k;
      const double hr = hit ? 1.0 : 0.0;
      const double mrr = hit ? 1.0 / *result.rank : 0.0;
      const double ndcg = hit ? 1.0 / std::log2(1.0 + *result.rank) : 0.0;
      report.hr_at_k[k] += hr;
      report.mrr_at_k[k] += mrr;
      report.ndcg_at_k[k] += ndcg;
      user.hr_at_k[k] += hr;
      user.mrr_at_k[k] += mrr;
      user.ndcg_at_k[k] += ndcg;
    }
    if (result.popularity_delta) {
      delta_sum += *result.popularity_delta;
      ++delta_cases;
    }
  }
  const auto n = static_cast<double>(cases.size());
  for (int k : ks) {
    report.hr_at_k[k] /= n;
    report.mrr_at_k[k] /= n;
    report.ndcg_at_k[k] /= n;
  }
  for (auto& [id, user] : per_user) {
    const auto m = static_cast<double>(user.cases);
    for (int k : ks) {
      user.hr_at_k[k] /= m;
      user.mrr_at_k[k] /= m;
      user.ndcg_at_k[k] /= m;
    }
    report.per_user.push_back(std::move(user));
  }
  report.popularity_delta = delta_cases > 0 ? delta_sum / static_cast<double>(delta_cases) : 0.0;
  report.per_user_count = static_cast<std::int64_t>(report.per_user.size());
  report.test_cases = static_cast<std::int64_t>(cases.size());
  return report;
}

RuleSet MineForEvaluation(const Split& split, const EngineConfig& config,
                          const UserGroupMap& groups) {
  return MineScoped(split.train, groups, config.mining, config.bucket, config.boost);
}

MetricReport Evaluate(const EventLog& log, const SplitSpec& spec, const EngineConfig& config,
                      const std::vector<int>& ks_in, const EvalOptions& options) {
  config.Validate();
  const auto ks = NormalizeKs(ks_in);
  ValidateGroups(options.groups, log);
  const auto split = TemporalSplit(log, spec);

  RuleSet rules = options.rules ? *options.rules
                                : MineForEvaluation(split, config, options.groups);
  rules = rules.Merged(options.manual_rules);
  for (const auto& id : options.disabled) {
    if (!rules.contains(id)) throw Error(ErrorCode::kUnknownRule, "'" + id + "'");
  }

  // Memory spans the full log, but every request only sees rows strictly
  // before its target; associations and popularity come from train alone.
  ChunkStore store(log, AssociationTable::Build(split.train, config.cooc_window));
  const Engine engine(std::move(store), std::move(rules), options.groups,
                      config.engine_params());

  auto recommend = [&](const TestCase& test) -> std::vector<ItemId> {
    const auto history = engine.store().HistoryBefore(test.user, test.now);
    for (Timestamp t : history.times) {
      if (t >= test.now) throw Error(ErrorCode::kInvariantViolation, "history leaks the target");
    }
    std::vector<ItemId> items;
    try {
      for (const auto& rec : engine.Recommend(test.user, test.now, ks.back(), options.disabled)) {
        items.push_back(rec.item_id);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoCandidates) throw;
    }
    return items;
  };

  auto report = ScoreCases(split, recommend, ks, engine.popularity(), options.workers);
  report.config = ConfigEntries(config);
  return report;
}

std::string MetricReportToJson(const MetricReport& report) {
  nlohmann::ordered_json j;
  auto metric = [](const std::map<int, double>& values) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [k, v] : values) out[std::to_string(k)] = v;
    return out;
  };
  j["hr_at_k"] = metric(report.hr_at_k);
  j["mrr_at_k"] = metric(report.mrr_at_k);
  j["ndcg_at_k"] = metric(report.ndcg_at_k);
  j["popularity_delta"] = report.popularity_delta;
  j["per_user_count"] = report.per_user_count;
  j["test_cases"] = report.test_cases;
  j["config"] = report.config;
  return j.dump(2) + "\n";
}

std::string PerUserCsv(const MetricReport& report) {
  std::string out = "user_id,cases";
  std::vector<int> ks;
  for (const auto& [k, v] : report.hr_at_k) ks.push_back(k);
  for (int k : ks) {
    out += ",hr@" + std::to_string(k) + ",mrr@" + std::to_string(k) + ",ndcg@" +
           std::to_string(k);
  }
  out += '\n';
  for (const auto& user : report.per_user) {
    out += user.user + "," + std::to_string(user.cases);
    for (int k : ks) {
      out += "," + nlohmann::json(user.hr_at_k.at(k)).dump() + "," +
             nlohmann::json(user.mrr_at_k.at(k)).dump() + "," +
             nlohmann::json(user.ndcg_at_k.at(k)).dump();
    }
    out += '\n';
  }
  return out;
}

}  // namespace hyper
