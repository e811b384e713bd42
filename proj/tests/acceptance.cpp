// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hyper/cli.hpp"
#include "hyper/config.hpp"
#include "hyper/declarative.hpp"
#include "hyper/error.hpp"
#include "hyper/evalharness.hpp"
#include "hyper/procedural.hpp"
#include "hyper/recommend.hpp"
#include "hyper/rulemine.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hyper;

namespace {

// Pinned tolerances.
constexpr double kActivationTol = 1e-9;
constexpr double kAdditivityTol = 1e-12;
constexpr double kShareTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// --- 1 ---------------------------------------------------------------------

Outcome ActivationOracle() {
  Outcome out;
  synth::Rng rng(101);
  const double decays[] = {0.1, 0.5, 1.5};
  double worst = 0.0;
  int cases = 0;
  for (int c = 0; c < 1000; ++c) {
    ActivationParams params;
    params.decay = decays[c % 3];
    const Timestamp now = 1'000'000'000 + synth::Uniform(rng, 0, 1'000'000);
    const int n = synth::Uniform(rng, 1, 50);
    std::vector<Timestamp> occ;
    for (int j = 0; j < n; ++j) occ.push_back(now - synth::Uniform(rng, 0, 10'000'000));
    std::sort(occ.begin(), occ.end());
    const double got = BaseLevel(occ, now, params);
    const double want = oracle::NaiveBaseLevel(occ, now, params.decay, params.min_elapsed);
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= kActivationTol)) out.Fail("oracle mismatch");

    // Frequency: one more occurrence strictly increases the base level.
    auto more = occ;
    more.push_back(now - synth::Uniform(rng, 0, 10'000'000));
    std::sort(more.begin(), more.end());
    if (!(BaseLevel(more, now, params) > got)) out.Fail("frequency monotonicity");

    // Recency: a single more recent occurrence (lag >= min_elapsed) scores higher.
    const Timestamp older = synth::Uniform(rng, 2, 10'000'000);
    const Timestamp newer = synth::Uniform(rng, 1, static_cast<int>(older) - 1);
    const Timestamp a[] = {now - older};
    const Timestamp b[] = {now - newer};
    if (!(BaseLevel(b, now, params) > BaseLevel(a, now, params))) out.Fail("recency monotonicity");
    ++cases;
  }
  std::ostringstream s;
  s << cases << " cases, max |error| " << worst;
  if (out.pass) out.detail = s.str();
  return out;
}

// --- 2 ---------------------------------------------------------------------

Outcome MiningOracle() {
  Outcome out;
  synth::Rng rng(202);
  std::size_t total_rules = 0;
  for (int c = 0; c < 200; ++c) {
    const auto sequences = synth::RandomSequences(rng, 8, 20, 12);
    MiningConfig cfg;
    cfg.minsup = synth::Uniform(rng, 1, 4);
    cfg.minconf = synth::Uniform(rng, 1, 10) / 10.0;
    cfg.max_antecedent = synth::Uniform(rng, 1, 3);
    cfg.max_consequent = synth::Uniform(rng, 1, 2);
    const auto got = MineSequential(sequences, cfg);
    const auto want = oracle::BruteForceSequential(sequences, cfg);
    total_rules += want.size();
    if (got != want) out.Fail("sequential mismatch in case " + std::to_string(c));
  }
  std::size_t periodic_rules = 0;
  for (int c = 0; c < 200; ++c) {
    ItemSequence seq;
    const int items = synth::Uniform(rng, 1, 6);
    const int len = synth::Uniform(rng, 0, 50);
    for (int p = 0; p < len; ++p) {
      seq.items.push_back(synth::Item(synth::Uniform(rng, 0, items - 1)));
      seq.times.push_back(p);
    }
    MiningConfig cfg;
    cfg.min_periodic_occ = synth::Uniform(rng, 2, 4);
    cfg.periodic_tolerance = synth::Uniform(rng, 0, 2);
    const auto got = MinePeriodic(seq, cfg);
    const auto want = oracle::GapScan(seq, cfg);
    periodic_rules += want.size();
    if (got != want) out.Fail("periodic mismatch in case " + std::to_string(c));
  }
  if (out.pass) {
    out.detail = "200 logs (" + std::to_string(total_rules) + " rules), 200 sequences (" +
                 std::to_string(periodic_rules) + " periodic rules) identical";
  }
  return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome BoostSemantics() {
  Outcome out;
  synth::Rng rng(303);
  const double cold = -10.0;
  for (int c = 0; c < 500; ++c) {
    ActivationMap base;
    const int items = synth::Uniform(rng, 1, 12);
    for (int i = 0; i < items; ++i) {
      if (synth::Uniform(rng, 0, 3) > 0) base[synth::Item(i)] = synth::UniformReal(rng, -8, 2);
    }
    std::vector<FiringRecord> firings;
    const int count = synth::Uniform(rng, 0, 6);
    for (int f = 0; f < count; ++f) {
      FiringRecord rec;
      rec.rule_id = "r" + std::to_string(f);
      std::vector<ItemId> targets;
      for (int k = synth::Uniform(rng, 1, 3); k > 0; --k) {
        targets.push_back(synth::Item(synth::Uniform(rng, 0, items + 2)));
      }
      rec.boosted_items = MakeItemSet(targets);
      rec.applied_boost = synth::UniformReal(rng, 0.01, 3.0);
      firings.push_back(rec);
    }
    const auto full = ApplyBoosts(base, firings, cold);

    // Locality: only items of the union of C_r change; others are bit-identical.
    std::set<ItemId> touched;
    for (const auto& f : firings) touched.insert(f.boosted_items.begin(), f.boosted_items.end());
    for (const auto& [item, value] : full) {
      auto it = base.find(item);
      if (!touched.contains(item)) {
        if (it == base.end() || it->second != value) out.Fail("locality violated");
      } else {
        const double start = it == base.end() ? cold : it->second;
        if (!(value > start)) out.Fail("boosted item did not increase");
      }
    }
    for (const auto& [item, value] : base) {
      if (!full.contains(item)) out.Fail("item dropped");
    }

    // Additivity: one firing at a time, in a shuffled order.
    auto order = firings;
    std::shuffle(order.begin(), order.end(), rng);
    ActivationMap stepwise = base;
    for (const auto& f : order) stepwise = ApplyBoosts(stepwise, {f}, cold);
    if (stepwise.size() != full.size()) out.Fail("additivity: key sets differ");
    for (const auto& [item, value] : full) {
      auto it = stepwise.find(item);
      if (it == stepwise.end() || std::abs(it->second - value) > kAdditivityTol) {
        out.Fail("additivity violated");
      }
    }

    // Ablation identity: removing firing r subtracts its boost on exactly C_r.
    if (!firings.empty()) {
      const auto r = static_cast<std::size_t>(synth::Uniform(rng, 0, count - 1));
      auto without = firings;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(r));
      const auto ablated = ApplyBoosts(base, without, cold);
      const auto& removed = firings[r];
      for (const auto& [item, value] : full) {
        const bool in_cr = std::binary_search(removed.boosted_items.begin(),
                                              removed.boosted_items.end(), item);
        auto it = ablated.find(item);
        const double after = it != ablated.end() ? it->second : cold;
        const double expected = in_cr ? value - removed.applied_boost : value;
        if (std::abs(after - expected) > kAdditivityTol) out.Fail("ablation identity violated");
      }
    }
  }
  if (out.pass) out.detail = "500 (activation map, firing set) pairs";
  return out;
}

// --- 4 ---------------------------------------------------------------------

Outcome FiringSoundness() {
  Outcome out;
  synth::Rng rng(404);
  static const char* kDevices[] = {"mobile", "desktop", "tv"};
  std::int64_t fired = 0, silent = 0, mismatches = 0;
  for (int c = 0; c < 500; ++c) {
    const int items = synth::Uniform(rng, 2, 8);
    const UserId user = synth::Pad("u", synth::Uniform(rng, 0, 3));
    UserGroupMap groups;
    for (int u = 0; u < 4; ++u) {
      if (synth::Uniform(rng, 0, 2) > 0) {
        groups.assignments[synth::Pad("u", u)] = "g" + std::to_string(synth::Uniform(rng, 0, 1));
      }
    }
    std::vector<RuleEntry> entries;
    const int rule_count = synth::Uniform(rng, 1, 12);
    for (int r = 0; r < rule_count; ++r) {
      RuleEntry entry;
      entry.rule_id = "r" + std::to_string(r);
      switch (synth::Uniform(rng, 0, 2)) {
        case 0: entry.scope = Scope::Individual(synth::Pad("u", synth::Uniform(rng, 0, 3))); break;
        case 1: entry.scope = Scope::Group("g" + std::to_string(synth::Uniform(rng, 0, 1))); break;
        default: entry.scope = Scope::Global();
      }
      entry.v_r = synth::UniformReal(rng, 0.05, 2.0);
      entry.body = synth::RandomRuleBody(rng, items);
      entries.push_back(std::move(entry));
    }
    const RuleSet rules(entries);

    ItemSequence history;
    history.user_id = user;
    const int len = synth::Uniform(rng, 0, 14);
    for (int p = 0; p < len; ++p) {
      history.items.push_back(synth::Item(synth::Uniform(rng, 0, items - 1)));
      history.times.push_back(p);
    }
    const Timestamp now = synth::kEpochDay + synth::Uniform(rng, 0, 14 * 24 * 60) * 60LL;
    const std::int64_t tz = synth::Uniform(rng, -12, 12) * 3600LL;
    ContextMap custom;
    if (synth::Uniform(rng, 0, 1) == 1) custom["device"] = kDevices[synth::Uniform(rng, 0, 2)];
    const auto request = MakeRequestContext(now, tz, {}, custom);
    const ScopeWeights weights;
    const auto firings = MatchRules(rules, history, request, user, groups, weights);

    std::map<std::string, const FiringRecord*> by_id;
    for (const auto& f : firings) by_id[f.rule_id] = &f;
    for (const auto& entry : rules.rules()) {
      const bool expected =
          oracle::Eligible(entry.scope, user, groups.assignments) &&
          oracle::ConditionHolds(entry.body, history.items, now, tz, custom);
      auto it = by_id.find(entry.rule_id);
      if (expected != (it != by_id.end())) {
        ++mismatches;
        continue;
      }
      if (!expected) {
        ++silent;
        continue;
      }
      ++fired;
      const auto& rec = *it->second;
      const double boost = entry.v_r * weights.For(entry.scope.level);
      if (rec.boosted_items != oracle::Targets(entry.body) || rec.applied_boost != boost ||
          !(rec.scope == entry.scope)) {
        ++mismatches;
      }
    }
  }
  if (mismatches > 0) out.Fail(std::to_string(mismatches) + " mismatches");
  out.detail = out.pass ? "500 triples, " + std::to_string(fired) + " firings, " +
                              std::to_string(silent) + " non-firings, 0 mismatches"
                        : out.detail;
  return out;
}

// --- 5 ---------------------------------------------------------------------

EngineConfig PlantedConfig() {
  EngineConfig config;
  config.exclude_recent = 1;
  config.boost.beta = 20.0;
  return config;
}

Outcome PlantedRecovery() {
  Outcome out;
  const auto planted = synth::MakePlantedLog();
  const auto config = PlantedConfig();
  const SplitSpec spec{1, 2};
  const auto split = TemporalSplit(planted.log, spec);
  const auto rules = MineForEvaluation(split, config, {});

  bool sequential = false, morning = false;
  std::set<ItemId> periodic_found;
  std::set<std::string> responsible;
  const auto targets = planted.targets();
  for (const auto& entry : rules.rules()) {
    if (const auto* seq = std::get_if<SequentialRule>(&entry.body)) {
      if (entry.scope.level == ScopeLevel::kGlobal && seq->antecedent == ItemSet{"a"} &&
          seq->consequent == ItemSet{"b"} && seq->confidence == 1.0) {
        sequential = true;
      }
    } else if (const auto* per = std::get_if<PeriodicRule>(&entry.body)) {
      if (planted.periodic_items.contains(per->item) && per->w_min == 3 && per->w_max == 3 &&
          entry.scope == Scope::Individual(per->item.substr(2))) {
        periodic_found.insert(per->item);
      }
    } else if (const auto* ctx = std::get_if<ContextRule>(&entry.body)) {
      if (entry.scope.level == ScopeLevel::kGlobal &&
          ctx->bucket == ContextBucket{BucketKind::kTimeOfDay, "", "morning"} &&
          ctx->items == ItemSet{"s"}) {
        morning = true;
      }
    }
    for (const auto& item : oracle::Targets(entry.body)) {
      if (targets.contains(item)) responsible.insert(entry.rule_id);
    }
  }
  if (!sequential) out.Fail("a->b not recovered");
  if (periodic_found != planted.periodic_items) out.Fail("period-3 items not recovered");
  if (!morning) out.Fail("morning->s not recovered");

  EvalOptions options;
  options.workers = 4;
  const auto with_rules = Evaluate(planted.log, spec, config, {1}, options);
  options.disabled = responsible;
  const auto without = Evaluate(planted.log, spec, config, {1}, options);
  const double hr_on = with_rules.hr_at_k.at(1);
  const double hr_off = without.hr_at_k.at(1);
  if (hr_on != 1.0) out.Fail("HR@1 with rules = " + std::to_string(hr_on));
  if (!(hr_off < hr_on)) out.Fail("HR@1 did not drop when rules were disabled");

  // Same comparison through the command line, as a user would run it.
  const auto dir = fs::temp_directory_path() / "hyper_acceptance_planted";
  fs::remove_all(dir);
  fs::create_directories(dir);
  WriteFile(dir / "log.jsonl", SerializeJsonl(planted.log));
  WriteFile(dir / "engine.ini", SerializeConfig(config));
  auto run = [&](std::vector<std::string> args) {
    std::vector<const char*> argv = {"hyper", "--config", nullptr};
    const auto cfg_path = (dir / "engine.ini").string();
    argv[2] = cfg_path.c_str();
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = RunCli(static_cast<int>(argv.size()), argv.data(), o, e);
    return std::make_pair(code, o.str());
  };
  const auto store = (dir / "store").string();
  bool cli_ok = run({"ingest", "--log", (dir / "log.jsonl").string(), "--format", "jsonl",
                     "--out", store}).first == 0;
  const auto on = run({"evaluate", "--store", store, "--k", "1"});
  std::vector<std::string> off_args = {"evaluate", "--store", store, "--k", "1"};
  for (const auto& id : responsible) {
    off_args.push_back("--disable");
    off_args.push_back(id);
  }
  const auto off = run(off_args);
  cli_ok = cli_ok && on.first == 0 && off.first == 0 &&
           on.second.find("\"1\": 1.0") != std::string::npos &&
           off.second.find("\"1\": 1.0") == std::string::npos;
  if (!cli_ok) out.Fail("CLI evaluate did not reproduce the comparison");
  fs::remove_all(dir);

  std::ostringstream s;
  s << "rules recovered; HR@1 " << hr_on << " with rules vs " << hr_off << " with "
    << responsible.size() << " responsible rules disabled (" << with_rules.test_cases
    << " cases)";
  if (out.pass) out.detail = s.str();
  return out;
}

// --- 6 ---------------------------------------------------------------------

Outcome ExplanationFidelity() {
  Outcome out;
  synth::Rng rng(606);
  int recs = 0, lines = 0, with_firings = 0;
  EngineConfig config;
  config.mining.minsup = 2;
  config.mining.lift_threshold = 1.5;
  while (recs < 100) {
    const auto log = synth::RandomLog(rng, 12, 15, 8, 30);
    UserGroupMap groups;
    for (const auto& user : log.users()) {
      groups.assignments[user] = "g" + std::to_string(synth::Uniform(rng, 0, 2));
    }
    auto custom = config;
    custom.bucket.kind = synth::Uniform(rng, 0, 1) == 0 ? BucketKind::kTimeOfDay
                                                        : BucketKind::kDayOfWeek;
    const auto rules = MineScoped(log, groups, custom.mining, custom.bucket, custom.boost);
    const Engine engine(ChunkStore(log, custom.cooc_window), rules, groups,
                        custom.engine_params());
    for (int r = 0; r < 10 && recs < 100; ++r) {
      const std::vector<UserId> users(log.users().begin(), log.users().end());
      const UserId user = users[static_cast<std::size_t>(synth::Uniform(rng, 0, 11))];
      const auto rows = log.user_rows(user);
      const Timestamp now = rows.back().timestamp + synth::Uniform(rng, 1, 48) * 1800LL;
      const ContextMap request{{"device", "mobile"}};
      const auto history = engine.store().HistoryBefore(user, now);
      for (const auto& rec : engine.Recommend(user, now, 5, {}, request)) {
        ++recs;
        const auto explanation = Explain(rec, engine.rules());
        double share_sum = 0.0;
        for (const auto& line : explanation.lines) {
          ++lines;
          if (line.rule_id.empty()) {
            if (!rec.firings.empty()) out.Fail("fallback line on a boosted item");
            continue;
          }
          const auto* entry = engine.rules().find(line.rule_id);
          if (entry == nullptr) {
            out.Fail("explanation cites unknown rule " + line.rule_id);
            continue;
          }
          const bool holds =
              oracle::Eligible(entry->scope, user, groups.assignments) &&
              oracle::ConditionHolds(entry->body, history.items, now, 0, request);
          const auto targets = oracle::Targets(entry->body);
          const bool targets_item =
              std::find(targets.begin(), targets.end(), rec.item_id) != targets.end();
          if (!holds || !targets_item) out.Fail("line for " + line.rule_id + " does not re-verify");
          if (line.scope_label != ScopeLabel(entry->scope.level)) out.Fail("scope label");
          share_sum += line.contribution_share.value_or(-1.0);
        }
        if (!rec.firings.empty()) {
          ++with_firings;
          if (std::abs(share_sum - 1.0) > kShareTol) out.Fail("shares do not sum to 1");
        }
      }
    }
  }
  if (with_firings == 0) out.Fail("no recommendation had a firing");
  if (out.pass) {
    out.detail = std::to_string(recs) + " recommendations (" + std::to_string(with_firings) +
                 " with firings), " + std::to_string(lines) + " lines verified";
  }
  return out;
}

// --- 7 ---------------------------------------------------------------------

Outcome PopularityCalibration() {
  Outcome out;
  synth::Rng rng(707);
  const auto data = synth::MakePopularityLog(rng);
  const SplitSpec spec{1, 10};
  const auto split = TemporalSplit(data.log, spec);
  EngineConfig config;

  auto calibration = [](double strength) {
    RuleEntry entry;
    entry.rule_id = "manual/calibration";
    entry.scope = Scope::Global();
    entry.provenance = Provenance::kManual;
    entry.body = PopularityCalibrationRule{0.5, strength, CalibrationDirection::kMatchProfile};
    return RuleSet({entry});
  };

  // Profiles of the evaluated users, on train popularity.
  ChunkStore store(data.log, AssociationTable::Build(split.train, config.cooc_window));
  const auto mined = MineForEvaluation(split, config, {});
  double profile_sum = 0.0;
  double mean_top[2] = {0.0, 0.0};
  const double strengths[2] = {0.0, 1.0};
  for (int run = 0; run < 2; ++run) {
    const Engine engine(store, mined.Merged(calibration(strengths[run])), {},
                        config.engine_params());
    for (const auto& test : split.cases) {
      const auto history = engine.store().HistoryBefore(test.user, test.now);
      if (run == 0) profile_sum += ProfilePopularity(history, engine.popularity(), 0.5);
      const auto recs = engine.Recommend(test.user, test.now, 10);
      double sum = 0.0;
      for (const auto& rec : recs) sum += ItemPopularity(engine.popularity(), rec.item_id);
      mean_top[run] += sum / static_cast<double>(recs.size());
    }
  }
  const auto n = static_cast<double>(split.cases.size());
  const double profile = profile_sum / n;
  mean_top[0] /= n;
  mean_top[1] /= n;

  EvalOptions options;
  options.manual_rules = calibration(0.0);
  const auto off = Evaluate(data.log, spec, config, {10}, options);
  options.manual_rules = calibration(1.0);
  const auto on = Evaluate(data.log, spec, config, {10}, options);

  if (!(profile >= 0.15 && profile <= 0.25)) out.Fail("profile quantile not near 0.2");
  if (!(mean_top[1] < mean_top[0])) out.Fail("mean top-10 quantile did not decrease");
  if (!(std::abs(on.popularity_delta) < std::abs(off.popularity_delta))) {
    out.Fail("popularity_delta did not move toward 0");
  }
  std::ostringstream s;
  s << "profile " << profile << "; top-10 quantile " << mean_top[0] << " -> " << mean_top[1]
    << "; popularity_delta " << off.popularity_delta << " -> " << on.popularity_delta;
  out.detail = out.pass ? s.str() : out.detail + " (" + s.str() + ")";
  return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome Determinism() {
  Outcome out;
  synth::Rng rng(808);
  const auto log = synth::RandomLog(rng, 30, 25, 10, 40);
  const auto base = fs::temp_directory_path() / "hyper_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  WriteFile(base / "log.csv", SerializeCsv(log));
  const EngineConfig config;
  WriteFile(base / "engine.ini", SerializeConfig(config));
  std::string groups = "user_id,group_id\n";
  int g = 0;
  for (const auto& user : log.users()) groups += user + ",g" + std::to_string(g++ % 3) + "\n";
  WriteFile(base / "groups.csv", groups);

  std::vector<std::string> rules_bytes, report_bytes;
  for (int run = 0; run < 2; ++run) {
    const auto dir = base / ("run" + std::to_string(run));
    const auto cfg = (base / "engine.ini").string();
    auto cli = [&](std::vector<std::string> args) {
      std::vector<const char*> argv = {"hyper", "--config", cfg.c_str()};
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream o, e;
      return RunCli(static_cast<int>(argv.size()), argv.data(), o, e);
    };
    const auto store = (dir / "store").string();
    int code = cli({"ingest", "--log", (base / "log.csv").string(), "--out", store});
    code |= cli({"mine", "--store", store, "--groups", (base / "groups.csv").string(), "--out",
                 (dir / "rules.jsonl").string()});
    code |= cli({"evaluate", "--store", store, "--groups", (base / "groups.csv").string(),
                 "--k", "1,5,10", "--workers", run == 0 ? "1" : "4", "--out",
                 (dir / "report.json").string()});
    if (code != 0) out.Fail("CLI run failed");
    rules_bytes.push_back(ReadFile(dir / "rules.jsonl"));
    report_bytes.push_back(ReadFile(dir / "report.json"));
  }
  fs::remove_all(base);
  if (rules_bytes[0].empty()) out.Fail("no rules mined");
  if (rules_bytes[0] != rules_bytes[1]) out.Fail("rules.jsonl differs");
  if (report_bytes[0] != report_bytes[1]) out.Fail("MetricReport differs");
  if (out.pass) {
    out.detail = "rules.jsonl (" + std::to_string(rules_bytes[0].size()) +
                 " bytes) and report (" + std::to_string(report_bytes[0].size()) +
                 " bytes) identical; 1 vs 4 workers";
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"activation oracle", ActivationOracle},
      {"mining oracle equivalence", MiningOracle},
      {"boost semantics", BoostSemantics},
      {"firing soundness", FiringSoundness},
      {"planted-pattern recovery", PlantedRecovery},
      {"explanation fidelity", ExplanationFidelity},
      {"popularity calibration", PopularityCalibration},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.Fail(std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " ("
              << criteria[i].first << "): " << outcome.detail << " [" << ms << " ms]"
              << std::endl;
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
