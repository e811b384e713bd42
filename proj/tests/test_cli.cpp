#include "hyper/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hyper/datamodel.hpp"
#include "hyper/rules.hpp"

namespace hyper {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hyper_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Write(const std::string& name, const std::string& content) const {
    WriteFile(dir_ / name, content);
    return Path(name);
  }

  static Result Run(std::vector<std::string> args) {
    std::vector<const char*> argv = {"hyper"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  /// Four users who each read a then b, plus fillers; ingested into "store".
  std::string ToyStore() {
    std::string csv = "user_id,item_id,timestamp\n";
    for (int u = 0; u < 4; ++u) {
      const std::string user = "u" + std::to_string(u);
      csv += user + ",a," + std::to_string(1000 + 100 * u) + "\n";
      csv += user + ",b," + std::to_string(1010 + 100 * u) + "\n";
      csv += user + ",x" + std::to_string(u) + "," + std::to_string(1020 + 100 * u) + "\n";
    }
    const auto r = Run({"ingest", "--log", Write("log.csv", csv), "--out", Path("store")});
    EXPECT_EQ(r.code, 0) << r.err;
    return Path("store");
  }

  fs::path dir_;
};

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_F(CliTest, IngestSummary) {
  const auto log = Write("log.csv", "user_id,item_id,timestamp\nu1,a,10\nu2,b,20\nu1,c,30\n");
  const auto r = Run({"ingest", "--log", log, "--out", Path("store")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "users=2 items=3 interactions=3\n");
  EXPECT_TRUE(fs::exists(Path("store/events.jsonl")));
}

TEST_F(CliTest, IngestErrors) {
  EXPECT_EQ(Run({"ingest", "--log", Path("missing.csv"), "--out", Path("s")}).code, 2);
  const auto bad = Write("bad.csv", "user_id,item_id,timestamp\nu1,a,ten\n");
  EXPECT_EQ(Run({"ingest", "--log", bad, "--out", Path("s")}).code, 2);
  const auto empty = Write("empty.csv", "user_id,item_id,timestamp\n");
  EXPECT_EQ(Run({"ingest", "--log", empty, "--out", Path("s")}).code, 2);
  EXPECT_EQ(Run({"ingest", "--log", bad, "--format", "xml", "--out", Path("s")}).code, 2);
}

TEST_F(CliTest, JsonlContextSurvivesStore) {
  const auto log = Write("log.jsonl",
                         R"({"user_id":"u1","item_id":"a","timestamp":5,"context":{"device":"tv"}})"
                         "\n"
                         R"({"user_id":"u1","item_id":"b","timestamp":6})"
                         "\n");
  ASSERT_EQ(Run({"ingest", "--log", log, "--format", "jsonl", "--out", Path("store")}).code, 0);
  const auto events = ReadFile(Path("store/events.jsonl"));
  EXPECT_EQ(ParseJsonlLog(events).interactions(), ParseJsonlLog(ReadFile(log)).interactions());
}

TEST_F(CliTest, MineWritesRules) {
  const auto store = ToyStore();
  const auto r = Run({"mine", "--store", store, "--out", Path("rules.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Lines(r.out).size(), 3u);
  EXPECT_EQ(Lines(r.out)[1], "group sequential=0 periodic=0 contextual=0 calibration=0");
  const auto rules = LoadRules(Path("rules.jsonl"));
  bool found = false;
  for (const auto& entry : rules.rules()) {
    const auto* seq = std::get_if<SequentialRule>(&entry.body);
    found |= entry.scope == Scope::Global() && seq && seq->antecedent == ItemSet{"a"} &&
             seq->consequent == ItemSet{"b"};
  }
  EXPECT_TRUE(found);

  const auto first = ReadFile(Path("rules.jsonl"));
  const auto groups = Write("groups.csv", "user_id,group_id\n");
  ASSERT_EQ(Run({"mine", "--store", store, "--groups", groups, "--out", Path("rules.jsonl")}).code, 0);
  EXPECT_EQ(ReadFile(Path("rules.jsonl")), first);
}

TEST_F(CliTest, MineAppendsManualRules) {
  const auto store = ToyStore();
  const auto manual = Write("manual.jsonl",
                            R"({"rule_id":"manual/cal","scope":"global","class":"calibration","body":{"strength":0.5}})"
                            "\n");
  const auto r = Run({"mine", "--store", store, "--manual", manual, "--out", Path("rules.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(Lines(r.out)[2].find("calibration=1"), std::string::npos);
  EXPECT_TRUE(LoadRules(Path("rules.jsonl")).contains("manual/cal"));
}

TEST_F(CliTest, RecommendTopK) {
  const auto store = ToyStore();
  ASSERT_EQ(Run({"mine", "--store", store, "--out", Path("rules.jsonl")}).code, 0);
  const auto r = Run({"recommend", "--store", store, "--rules", Path("rules.jsonl"), "--user", "u1",
                      "--now", "5000", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_LE(lines.size(), 2u);
  ASSERT_FALSE(lines.empty());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    EXPECT_EQ(lines[i].find("{\"rank\":" + std::to_string(i + 1) + ","), 0u) << lines[i];
    EXPECT_NE(lines[i].find("\"explanation_lines\""), std::string::npos);
  }
}

TEST_F(CliTest, ExplainLines) {
  const auto store = ToyStore();
  const auto r = Run({"explain", "--store", store, "--user", "u2", "--now", "5000", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(Lines(r.out).size(), 1u);
  EXPECT_NE(r.out.find("recency and frequency"), std::string::npos);
}

TEST_F(CliTest, AblateNeverFiringRule) {
  const auto store = ToyStore();
  const auto rules = Write("rules.jsonl",
                           R"({"rule_id":"idle","scope":"global","class":"periodic","body":{"item":"zzz","w_min":1,"w_max":2}})"
                           "\n");
  const auto r = Run({"ablate", "--store", store, "--rules", rules, "--user", "u1", "--now", "5000",
                      "--disable", "idle"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "[]\n");
  EXPECT_EQ(Run({"ablate", "--store", store, "--rules", rules, "--user", "u1", "--now", "5000",
                 "--disable", "nope"})
                .code,
            3);
}

TEST_F(CliTest, DomainErrors) {
  const auto store = ToyStore();
  const auto r = Run({"recommend", "--store", store, "--user", "ghost", "--now", "5000"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ghost"), std::string::npos);
  EXPECT_EQ(Run({"recommend", "--store", store, "--user", "u1", "--now", "5000", "--disable", "x"}).code, 3);
  EXPECT_EQ(Run({"evaluate", "--store", store, "--holdout", "5"}).code, 3);
}

TEST_F(CliTest, InputErrors) {
  const auto store = ToyStore();
  const auto cfg = Write("bad.ini", "[activation]\nspeed = 3\n");
  EXPECT_EQ(Run({"--config", cfg, "recommend", "--store", store, "--user", "u1", "--now", "5"}).code, 2);
  EXPECT_EQ(Run({"recommend", "--store", store, "--user", "u1"}).code, 2);  // --now missing
  EXPECT_EQ(Run({"recommend", "--store", store, "--user", "u1", "--now", "5", "--k", "0"}).code, 2);
  EXPECT_EQ(Run({"evaluate", "--store", store, "--k", "1,zero"}).code, 2);
  EXPECT_EQ(Run({}).code, 2);
  EXPECT_EQ(Run({"bogus"}).code, 2);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = Run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("evaluate"), std::string::npos);
  EXPECT_EQ(Run({"recommend", "--help"}).code, 0);
}

TEST_F(CliTest, ConfigFromEnvironment) {
  const auto store = ToyStore();
  const auto cfg = Write("cfg.ini", "[mining]\nminsup = 99\n");
  ASSERT_EQ(setenv("HYPER_CONFIG", cfg.c_str(), 1), 0);
  const auto r = Run({"mine", "--store", store, "--out", Path("rules.jsonl")});
  unsetenv("HYPER_CONFIG");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Lines(r.out)[2], "global sequential=0 periodic=0 contextual=0 calibration=0");

  const auto plain = Run({"mine", "--store", store, "--out", Path("rules.jsonl")});
  EXPECT_EQ(Lines(plain.out)[2].find("global sequential=0 "), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesReports) {
  const auto store = ToyStore();
  const auto r = Run({"evaluate", "--store", store, "--k", "1,2", "--workers", "2", "--out",
                      Path("report.json"), "--per-user-csv", Path("users.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadFile(Path("report.json")), r.out);
  EXPECT_NE(r.out.find("\"test_cases\": 4"), std::string::npos);
  const auto csv = Lines(ReadFile(Path("users.csv")));
  ASSERT_EQ(csv.size(), 5u);
  EXPECT_EQ(csv[0], "user_id,cases,hr@1,mrr@1,ndcg@1,hr@2,mrr@2,ndcg@2");
}

}  // namespace
}  // namespace hyper
