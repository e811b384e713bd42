#include "hyper/cli.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyper/config.hpp"
#include "hyper/error.hpp"
#include "hyper/evalharness.hpp"
#include "hyper/recommend.hpp"
#include "hyper/rulemine.hpp"
#include "hyper/store.hpp"

namespace hyper {

namespace {

int ExitFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput:
    case ErrorCode::kEmptyLog:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidConfig:
      return kExitInputError;
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownRule:
    case ErrorCode::kNoCandidates:
    case ErrorCode::kEmptyCandidates:
    case ErrorCode::kNoTestCases:
      return kExitDomainError;
    case ErrorCode::kNoOccurrences:
    case ErrorCode::kInvariantViolation:
      return kExitInternalError;
  }
  return kExitInternalError;
}

EngineConfig ResolveConfig(const std::string& path) {
  if (!path.empty()) return LoadConfig(path);
  if (const char* env = std::getenv("HYPER_CONFIG"); env != nullptr && *env != '\0') {
    return LoadConfig(env);
  }
  return EngineConfig{};
}

UserGroupMap ResolveGroups(const std::string& path) {
  return path.empty() ? UserGroupMap{} : LoadGroups(path);
}

RuleSet LoadRuleFiles(const std::vector<std::string>& paths) {
  RuleSet rules;
  for (const auto& path : paths) rules = rules.Merged(LoadRules(path));
  return rules;
}

ContextMap ParseContextPairs(const std::vector<std::string>& pairs) {
  ContextMap out;
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kMalformedInput, "--context expects key=value, got '" + pair + "'");
    }
    out[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return out;
}

/// Options shared by recommend, explain and ablate.
struct ServeArgs {
  std::string store;
  std::vector<std::string> rules;
  std::string groups;
  std::string user;
  Timestamp now = 0;
  int k = 10;
  std::vector<std::string> disable;
  std::vector<std::string> context;
};

void AddServeOptions(CLI::App* cmd, ServeArgs& args) {
  cmd->add_option("--store", args.store, "Store directory written by `ingest`")->required();
  cmd->add_option("--rules", args.rules, "Rule file(s) in JSON-lines format (repeatable)");
  cmd->add_option("--groups", args.groups, "CSV mapping user_id,group_id");
  cmd->add_option("--user", args.user, "User to recommend for")->required();
  cmd->add_option("--now", args.now, "Request time, seconds since epoch")->required();
  cmd->add_option("--k", args.k, "Number of recommendations")->check(CLI::PositiveNumber);
  cmd->add_option("--disable", args.disable, "Rule id to switch off (repeatable)");
  cmd->add_option("--context", args.context, "Request context entry key=value (repeatable)");
}

Engine BuildEngine(const ServeArgs& args, const EngineConfig& config) {
  auto store = LoadStore(args.store, config.cooc_window);
  return Engine(std::move(store), LoadRuleFiles(args.rules), ResolveGroups(args.groups),
                config.engine_params());
}

std::vector<Recommendation> Serve(const Engine& engine, const ServeArgs& args) {
  const std::set<std::string> disabled(args.disable.begin(), args.disable.end());
  try {
    return engine.Recommend(args.user, args.now, args.k, disabled,
                            ParseContextPairs(args.context));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoCandidates && !engine.store().has_user(args.user)) {
      throw Error(ErrorCode::kUnknownUser, "'" + args.user + "'");
    }
    throw;
  }
}

std::vector<int> ParseKs(const std::string& text) {
  std::vector<int> ks;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(part, &used);
      if (used != part.size() || k < 1) throw std::invalid_argument(part);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad --k entry '" + part + "'");
    }
  }
  if (ks.empty()) throw Error(ErrorCode::kInvalidConfig, "--k needs at least one value");
  return ks;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid declarative/procedural-memory recommender", "hyper"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "Engine config file (default: $HYPER_CONFIG, else built-in defaults)");

  // ingest
  std::string log_path, format = "csv", out_dir;
  auto* ingest = app.add_subcommand("ingest", "Parse an interaction log into a store");
  ingest->add_option("--log", log_path, "Interaction log file")->required();
  ingest->add_option("--format", format, "Log format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  ingest->add_option("--out", out_dir, "Store directory to write")->required();

  // mine
  std::string mine_store, mine_groups, mine_out;
  std::vector<std::string> mine_manual;
  auto* mine = app.add_subcommand("mine", "Mine production rules at every scope");
  mine->add_option("--store", mine_store, "Store directory")->required();
  mine->add_option("--groups", mine_groups, "CSV mapping user_id,group_id");
  mine->add_option("--manual", mine_manual, "Manual rule file(s) appended to the output");
  mine->add_option("--out", mine_out, "Rule file to write (JSON lines)")->required();

  ServeArgs rec_args, explain_args, ablate_args;
  auto* recommend = app.add_subcommand("recommend", "Top-k recommendations as JSON lines");
  AddServeOptions(recommend, rec_args);
  auto* explain = app.add_subcommand("explain", "Explanations for the top-k as JSON lines");
  AddServeOptions(explain, explain_args);
  auto* ablate = app.add_subcommand("ablate", "Rank changes caused by disabling rules");
  AddServeOptions(ablate, ablate_args);
  ablate->get_option("--disable")->required();

  // evaluate
  std::string eval_store, eval_groups, eval_rules, eval_out, eval_csv, eval_ks = "1,5,10";
  std::vector<std::string> eval_manual, eval_disable;
  int holdout = 1, min_history = 0;
  unsigned workers = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Offline next-item evaluation");
  evaluate->add_option("--store", eval_store, "Store directory")->required();
  evaluate->add_option("--holdout", holdout, "Interactions held out per user")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--min-history", min_history,
                       "Skip users with fewer interactions (default holdout+1)");
  evaluate->add_option("--k", eval_ks, "Comma-separated cutoffs, e.g. 1,5,10");
  evaluate->add_option("--groups", eval_groups, "CSV mapping user_id,group_id");
  evaluate->add_option("--rules", eval_rules, "Serve these rules instead of mining the train split");
  evaluate->add_option("--manual", eval_manual, "Extra rule file(s), e.g. calibration rules");
  evaluate->add_option("--disable", eval_disable, "Rule id to switch off (repeatable)");
  evaluate->add_option("--out", eval_out, "Also write the report JSON here");
  evaluate->add_option("--per-user-csv", eval_csv, "Write per-user metrics CSV here");
  evaluate->add_option("--workers", workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    const auto config = ResolveConfig(config_path);

    if (ingest->parsed()) {
      auto fmt = ParseLogFormat(format);
      const auto log = IngestLog(log_path, *fmt);
      SaveStore(out_dir, ChunkStore(log, config.cooc_window));
      out << "users=" << log.users().size() << " items=" << log.catalog().size()
          << " interactions=" << log.size() << "\n";
    } else if (mine->parsed()) {
      const auto store = LoadStore(mine_store, config.cooc_window);
      auto rules = MineScoped(store.memory(), ResolveGroups(mine_groups), config.mining,
                              config.bucket, config.boost);
      rules = rules.Merged(LoadRuleFiles(mine_manual));
      WriteFile(mine_out, SerializeRules(rules));
      std::map<ScopeLevel, std::map<RuleClass, int>> counts;
      for (const auto& entry : rules.rules()) ++counts[entry.scope.level][entry.rule_class()];
      for (auto level : {ScopeLevel::kIndividual, ScopeLevel::kGroup, ScopeLevel::kGlobal}) {
        out << ScopeLabel(level);
        for (auto cls : {RuleClass::kSequential, RuleClass::kPeriodic, RuleClass::kContextual,
                         RuleClass::kCalibration}) {
          out << " " << RuleClassName(cls) << "=" << counts[level][cls];
        }
        out << "\n";
      }
    } else if (recommend->parsed()) {
      const auto engine = BuildEngine(rec_args, config);
      for (const auto& rec : Serve(engine, rec_args)) {
        out << RecommendationToJson(rec, Explain(rec, engine.rules())) << "\n";
      }
    } else if (explain->parsed()) {
      const auto engine = BuildEngine(explain_args, config);
      for (const auto& rec : Serve(engine, explain_args)) {
        out << ExplanationToJson(rec, Explain(rec, engine.rules())) << "\n";
      }
    } else if (ablate->parsed()) {
      const auto engine = BuildEngine(ablate_args, config);
      const std::set<std::string> disabled(ablate_args.disable.begin(),
                                           ablate_args.disable.end());
      const auto result = engine.Ablate(ablate_args.user, ablate_args.now, ablate_args.k,
                                        disabled, ParseContextPairs(ablate_args.context));
      out << DiffToJson(result.diff) << "\n";
    } else if (evaluate->parsed()) {
      const auto store = LoadStore(eval_store, config.cooc_window);
      SplitSpec spec;
      spec.holdout_n = holdout;
      spec.min_history = min_history > 0 ? min_history : holdout + 1;
      EvalOptions options;
      options.groups = ResolveGroups(eval_groups);
      if (!eval_rules.empty()) options.rules = LoadRules(eval_rules);
      options.manual_rules = LoadRuleFiles(eval_manual);
      options.disabled = std::set<std::string>(eval_disable.begin(), eval_disable.end());
      options.workers = workers;
      const auto report =
          Evaluate(store.memory(), spec, config, ParseKs(eval_ks), options);
      const auto json = MetricReportToJson(report);
      if (!eval_out.empty()) WriteFile(eval_out, json);
      if (!eval_csv.empty()) WriteFile(eval_csv, PerUserCsv(report));
      out << json;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitFor(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}

}  // namespace hyper
