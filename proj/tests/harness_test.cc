// Copyright 2026 The privconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "privconsensus/harness.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_format.h"
#include "cli.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace privconsensus {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

std::string ConfigPath(const std::string& name) {
  return std::string(PRIVCONS_SOURCE_DIR) + "/configs/" + name;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "privcons_harness_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Cli {
  int code;
  std::string out;
  std::string err;
};

Cli RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "privcons");
  std::ostringstream out, err;
  const int code = CliMain(args, out, err);
  return {code, out.str(), err.str()};
}

// Final (k = steps) values of a trajectory.csv, indexed by agent.
std::vector<double> FinalValues(const std::string& csv, int64_t steps) {
  std::vector<double> values;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
    long long k;
    int agent, dim;
    double x;
    if (std::sscanf(line.c_str(), "%lld,%d,%d,%lf", &k, &agent, &dim, &x) ==
            4 &&
        k == steps && dim == 0) {
      values.push_back(x);
    }
  }
  return values;
}

constexpr char kNoisyStatic[] = R"(
protocol: dp-static
graph: {preset: circle, nodes: 4, weight: 0.5}
initial: [1, 2, 3, 4]
schedules:
  noise: {kind: geometric, ratio: 0.9}
steps: 50
seeds: [3]
)";

TEST(HarnessRunTest, TwoAgentPlainEndsAtTwo) {
  const ExperimentConfig c = *LoadConfig(ConfigPath("two-agent-plain.yaml"));
  const CellResult r = *RunCell(c, 0, "");
  const std::vector<double> last = FinalValues(r.trajectory_csv, c.steps);
  ASSERT_EQ(last.size(), 2u);
  EXPECT_EQ(last[0], 2.0);
  EXPECT_EQ(last[1], 2.0);
}

TEST(HarnessRunTest, RendezvousReachesMeanOfAnchors) {
  const ExperimentConfig c = *LoadConfig(ConfigPath("rendezvous.yaml"));
  double mean = 0.0;
  for (const auto& a : c.objective.anchors) mean += a[0];
  mean /= c.objective.anchors.size();
  const CellResult r = *RunCell(c, c.seeds[0], "");
  EXPECT_LT(r.final_error, 1e-4);
  for (double x : FinalValues(r.trajectory_csv, c.steps)) {
    EXPECT_NEAR(x, mean, 1e-4);
  }
  EXPECT_TRUE(std::isinf(r.epsilon_hat));
}

TEST(HarnessRunTest, MalformedEdgeExitsNonzeroNamingTheEdge) {
  const Cli cli = RunCli({"run", ConfigPath("bad-edge.yaml")});
  EXPECT_NE(cli.code, 0);
  EXPECT_THAT(cli.err, HasSubstr("graph.edges[1]"));
  EXPECT_THAT(cli.err, HasSubstr("(1, 3)"));
}

TEST(HarnessConfigTest, ErrorsNameTheField) {
  const std::string base = "graph: {preset: circle, nodes: 4}\n";
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"protocol: plain\n" + base + "stepz: 3\n", "stepz: unknown field"},
      {"protocol: nope\n" + base, "protocol: unknown protocol"},
      {"protocol: plain\n" + base + "epsilon: 0.9\n", "epsilon:"},
      {"protocol: plain\ngraph: {nodes: 4, edges: [[0, 1], [2, 3]]}\n",
       "graph: not connected"},
      {"protocol: plain\ngraph: {nodes: 3, edges: [[1, 1]]}\n", "self-loop"},
      {"protocol: plain\n" + base + "initial: [1, 2]\n",
       "initial: expected 4 agents"},
      {"protocol: dp-static\n" + base +
           "schedules: {noise: {kind: constant, c: -1}}\n",
       "schedules.noise"},
      {"protocol: alg3\n" + base, "objective: required"},
      {"protocol: alg3\n" + base +
           "objective: {kind: logistic-surrogate}\n"
           "adversaries: [{kind: eavesdropper}]\n",
       "adversaries: the anchor attack"},
      {"protocol: alg1\n" + base +
           "reference: {kind: constant, offset: [1, 2, 3, 4]}\n"
           "adversaries: [{kind: eavesdropper}]\n",
       "adversaries: no attack model"},
      {"protocol: plain\n" + base +
           "adversaries: [{kind: eavesdropper, links: [[0, 2]]}]\n",
       "adversaries[0].links[0]: (0, 2) is not a link"},
      {"protocol: plain\n" + base + "seeds: [1, 1]\n", "seeds[1]: duplicate"},
      {"protocol: plain\n" + base + "schedules: paper-alg3\n",
       "schedules: not used by protocol plain"},
      {"protocol: dgd\n" + base +
           "objective: {kind: quadratic-anchor, anchors: [1, 2, 3, 4]}\n"
           "schedules: paper-alg3\nnoise: {scale: 2}\n",
       "noise.scale"},
      {"protocol: plain\n" + base + "steps: 0\n", "steps:"},
      {"protocol: [\n", "config:"},
  };
  for (const auto& [yaml, want] : cases) {
    auto c = ParseConfig(yaml);
    ASSERT_FALSE(c.ok()) << yaml;
    EXPECT_EQ(c.status().code(), absl::StatusCode::kInvalidArgument) << yaml;
    EXPECT_THAT(std::string(c.status().message()), HasSubstr(want)) << yaml;
  }
}

TEST(HarnessConfigTest, ShippedConfigsParse) {
  for (const auto& entry :
       fs::directory_iterator(std::string(PRIVCONS_SOURCE_DIR) + "/configs")) {
    if (entry.path().filename() == "bad-edge.yaml") continue;
    EXPECT_TRUE(LoadConfig(entry.path().string()).ok()) << entry.path();
  }
}

TEST(HarnessConfigTest, HashIgnoresFormattingAndNonSemanticFields) {
  const ExperimentConfig a = *ParseConfig(
      "protocol: plain\ngraph: {preset: circle, nodes: 4, weight: 0.5}\n"
      "initial: [1, 2, 3, 4]\nsteps: 10\n");
  const ExperimentConfig b = *ParseConfig(
      "# reordered, reformatted\nsteps: 10.0\ninitial: [1.0, 2, 3, 4]\n"
      "graph:\n  weight: 0.50\n  nodes: 4\n  preset: circle\n"
      "protocol: plain\nname: other\ntolerance: 0.1\noutput: elsewhere\n"
      "workers: 3\nseeds: [5, 6]\n");
  const ExperimentConfig c = *ParseConfig(
      "protocol: plain\ngraph: {preset: circle, nodes: 4, weight: 0.5}\n"
      "initial: [1, 2, 3, 5]\nsteps: 10\n");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_EQ(a.HashHex().size(), 16u);
}

TEST(HarnessConfigTest, ProtocolDefaults) {
  const ExperimentConfig dec = *ParseConfig(
      "protocol: decomposed\ngraph: {preset: circle, nodes: 5}\n");
  EXPECT_DOUBLE_EQ(*dec.epsilon, 1.0 / 3.0);  // degree 2 plus the beta link
  const ExperimentConfig alg3 = *ParseConfig(
      "protocol: alg3\ngraph: {preset: fig4-five-agent, weight: 0.3}\n"
      "objective: {kind: logistic-surrogate}\n");
  EXPECT_EQ(alg3.schedules.noise.ToString(),
            Preset("paper-alg3")->noise.ToString());
  EXPECT_EQ(alg3.sensitivity_model, SensitivityModel::kWeakening);
  const ExperimentConfig quiet = *ParseConfig(
      "protocol: alg3\ngraph: {preset: path, nodes: 3, weight: 0.3}\n"
      "objective: {kind: quadratic-anchor, anchors: [1, 2, 3]}\n"
      "noise: {enabled: false}\n");
  EXPECT_EQ(quiet.schedules.noise.Eval(7), 0.0);
}

TEST(HarnessConfigTest, FigurePresetMatchesShippedEdgeList) {
  const ExperimentConfig c = *LoadConfig(ConfigPath("fig4-five-agent.yaml"));
  const WeightedGraph inline_graph = *BuildGraph(c.graph);
  const WeightedGraph preset = *FiveAgentGraph(0.3);
  EXPECT_EQ(inline_graph.SkeletonLinks(), preset.SkeletonLinks());
}

TEST(HarnessDeterminismTest, RepeatedCellsAreByteIdentical) {
  const ExperimentConfig c = *ParseConfig(kNoisyStatic);
  EXPECT_EQ(RunCell(c, 3, "")->trajectory_csv,
            RunCell(c, 3, "")->trajectory_csv);
}

TEST(HarnessDeterminismTest, WorkerCountDoesNotChangeOutputs) {
  ExperimentConfig c = *ParseConfig(std::string(kNoisyStatic) +
                                    "name: pool\n");
  c.seeds = {0, 1, 2, 3, 4, 5, 6, 7};
  c.workers = 1;
  const fs::path one = FreshDir("workers1");
  ASSERT_TRUE(RunExperiment(c, one.string()).ok());
  c.workers = 4;
  const fs::path four = FreshDir("workers4");
  ASSERT_TRUE(RunExperiment(c, four.string()).ok());
  for (uint64_t s : c.seeds) {
    const std::string cell = "pool/seed-" + std::to_string(s);
    EXPECT_EQ(ReadFile(one / cell / "trajectory.csv"),
              ReadFile(four / cell / "trajectory.csv"));
    EXPECT_EQ(ReadFile(one / cell / "log.ndjson"),
              ReadFile(four / cell / "log.ndjson"));
  }
}

TEST(HarnessOutputTest, EveryFileCarriesHashSeedAndVersion) {
  const ExperimentConfig c = *LoadConfig(ConfigPath("plain-circle-attack.yaml"));
  const fs::path dir = FreshDir("headers");
  const RunResult r = *RunExperiment(c, dir.string());
  const fs::path cell = fs::path(r.directory) / "seed-0";
  for (const char* name : {"trajectory.csv", "summary.csv"}) {
    const std::string text = ReadFile(cell / name);
    EXPECT_THAT(text, StartsWith("# privcons 0.1.0 config_hash=" +
                                 c.HashHex() + " seed=0"))
        << name;
  }
  for (const char* name : {"log.ndjson", "attacks.ndjson"}) {
    const std::string text = ReadFile(cell / name);
    EXPECT_THAT(text, StartsWith("{\"record\":\"header\",\"version\":\"0.1.0\","
                                 "\"config_hash\":\"" +
                                 c.HashHex() + "\",\"seed\":0"))
        << name;
  }
  const std::string merged = ReadFile(fs::path(r.directory) / "summary.csv");
  EXPECT_THAT(merged, StartsWith("# privcons 0.1.0 config_hash=" + c.HashHex()));
  EXPECT_THAT(merged, HasSubstr("eavesdropper(0-1)=exact-recovery"));
  EXPECT_THAT(ReadFile(fs::path(r.directory) / "aggregate.csv"),
              HasSubstr("\"exact_recovery[honest-but-curious(2)]\",1,1,1,0"));
  EXPECT_FALSE(fs::exists(fs::path(r.directory) / "summary.csv.tmp"));
}

TEST(HarnessOutputTest, StrideZeroKeepsFirstAndLast) {
  ExperimentConfig c = *ParseConfig(kNoisyStatic);
  c.trajectory_stride = 0;
  const CellResult r = *RunCell(c, 3, "");
  EXPECT_EQ(r.recorded_k, (std::vector<int64_t>{0, 50}));
  c.trajectory_stride = 20;
  EXPECT_EQ(RunCell(c, 3, "")->recorded_k,
            (std::vector<int64_t>{0, 20, 40, 50}));
}

TEST(HarnessOutputTest, AggregateUsesPerSeedValues) {
  const Aggregate a = Summarize({4.0, 1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(a.median, 2.5);
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_NEAR(a.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(Summarize({7.0}).stddev, 0.0);

  ExperimentConfig c = *ParseConfig(std::string(kNoisyStatic) + "name: agg\n");
  c.seeds = {0, 1, 2};
  const RunResult r = *RunExperiment(c, FreshDir("aggregate").string());
  std::vector<double> finals;
  for (const CellResult& cell : r.cells) finals.push_back(cell.final_error);
  const Aggregate want = Summarize(finals);
  EXPECT_THAT(ReadFile(fs::path(r.directory) / "aggregate.csv"),
              HasSubstr(absl::StrFormat("\"final_error\",3,%.17g,%.17g",
                                        want.median, want.mean)));
}

TEST(HarnessOutputTest, OutputDirectoryPrecedence) {
  const ExperimentConfig c =
      *ParseConfig(std::string(kNoisyStatic) + "output: from-config\n");
  unsetenv(kOutputDirEnv);
  EXPECT_EQ(ResolveOutputDir(c, std::nullopt), "from-config");
  setenv(kOutputDirEnv, "from-env", 1);
  EXPECT_EQ(ResolveOutputDir(c, std::nullopt), "from-env");
  EXPECT_EQ(ResolveOutputDir(c, "from-flag"), "from-flag");
  unsetenv(kOutputDirEnv);
}

TEST(HarnessAttackTest, ReplayedPrefixMatchesFullRun) {
  const WeightedGraph g = *CircleGraph(5, 0.5);
  const std::vector<double> init = {1, 2, 3, 4, 5};
  const DecomposedRun full = *RunDecomposed(g, init, 1.0 / 3, {}, 80, 9);
  const DecomposedRun prefix = *RunDecomposed(g, init, 1.0 / 3, {}, 20, 9);
  for (int64_t k = 0; k <= 20; ++k) {
    EXPECT_EQ(prefix.alpha[k], full.alpha[k]);
    EXPECT_EQ(prefix.beta[k], full.beta[k]);
  }
  EXPECT_EQ(prefix.log, full.log.Filter([](const Message& m) {
    return m.k < 20;
  }));
}

TEST(HarnessAttackTest, ProtectedProtocolsResistShippedAdversaries) {
  for (const char* name : {"decomposed-circle.yaml", "secure-edge-pair.yaml"}) {
    const ExperimentConfig c = *LoadConfig(ConfigPath(name));
    const CellResult r = *RunCell(c, c.seeds[0], "");
    ASSERT_EQ(r.attacks.size(), 2u);
    for (const AttackReport& a : r.attacks) {
      EXPECT_NE(a.outcome, AttackOutcome::kExactRecovery)
          << name << " " << a.adversary;
    }
  }
}

class TraceVerifyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = FreshDir("trace");
    config_ = (dir_ / "noisy.yaml").string();
    std::ofstream(config_) << kNoisyStatic << "name: noisy\n";
    const Cli cli = RunCli({"run", config_, "--output", dir_.string()});
    ASSERT_EQ(cli.code, 0) << cli.err;
    golden_ = (dir_ / "noisy" / "seed-3" / "trajectory.csv").string();
  }
  fs::path dir_;
  std::string config_;
  std::string golden_;
};

TEST_F(TraceVerifyTest, FreshGoldenPasses) {
  const Cli cli = RunCli({"trace-verify", golden_, config_, "--seed", "3"});
  EXPECT_EQ(cli.code, 0) << cli.out << cli.err;
  EXPECT_THAT(cli.out, StartsWith("PASS"));
}

TEST_F(TraceVerifyTest, PerturbedSeedFailsAtFirstNoiseDraw) {
  // Initial states are fixed, so the first difference is the first noisy
  // round.
  const Cli cli = RunCli({"trace-verify", golden_, config_, "--seed", "4"});
  EXPECT_EQ(cli.code, 1);
  EXPECT_THAT(cli.out, HasSubstr("FAIL first divergence at k=1 agent=0"));
}

TEST_F(TraceVerifyTest, PerturbedSeedWithRandomInitFailsAtZero) {
  const ExperimentConfig c = *ParseConfig(
      "protocol: plain\ngraph: {preset: path, nodes: 3}\nsteps: 5\n");
  const std::string golden = RunCell(c, 1, "")->trajectory_csv;
  const TraceVerdict v = *VerifyTrace(golden, c, 2);
  EXPECT_FALSE(v.match);
  EXPECT_EQ(v.k, 0);
  EXPECT_EQ(v.agent, 0);
}

TEST_F(TraceVerifyTest, ToleranceOnlyChangePasses) {
  const std::string edited = (dir_ / "edited.yaml").string();
  std::ofstream(edited) << kNoisyStatic << "name: noisy\ntolerance: 0.5\n";
  EXPECT_EQ(LoadConfig(edited)->hash, LoadConfig(config_)->hash);
  const Cli cli = RunCli({"trace-verify", golden_, edited, "--seed", "3"});
  EXPECT_EQ(cli.code, 0) << cli.out;
}

TEST_F(TraceVerifyTest, TruncatedGoldenFails) {
  std::string text = ReadFile(golden_);
  text.resize(text.rfind('\n', text.size() - 2) + 1);
  const TraceVerdict v = *VerifyTrace(text, *LoadConfig(config_), 3);
  EXPECT_FALSE(v.match);
  EXPECT_EQ(v.k, 50);
  EXPECT_THAT(v.detail, HasSubstr("lengths differ"));
}

TEST(HarnessCompareTest, SingleConfigIsAnError) {
  const Cli cli = RunCli({"compare", ConfigPath("surrogate-alg3.yaml"), "-o",
                          FreshDir("single").string()});
  EXPECT_EQ(cli.code, 2);
  EXPECT_THAT(cli.err, HasSubstr("nothing to compare"));
}

TEST(HarnessCompareTest, IncompatibleConfigsAreRejected) {
  const Cli cli = RunCli({"compare", ConfigPath("surrogate-alg3.yaml"),
                          ConfigPath("rendezvous.yaml"), "-o",
                          FreshDir("incompatible").string()});
  EXPECT_EQ(cli.code, 2);
  EXPECT_THAT(cli.err, HasSubstr("different graphs"));
}

TEST(HarnessCompareTest, IdenticalConfigsGiveIdenticalRows) {
  const std::string yaml =
      "name: twin\nprotocol: dgd\n"
      "graph: {preset: circle, nodes: 4, weight: 0.3}\n"
      "objective: {kind: quadratic-anchor, anchors: [1, 2, 3, 4]}\n"
      "steps: 200\ntrajectory_stride: 50\nseeds: [0, 1, 2]\n";
  const fs::path dir = FreshDir("twins");
  std::ofstream(dir / "a.yaml") << yaml;
  std::ofstream(dir / "b.yaml") << yaml;
  const Cli cli = RunCli({"compare", (dir / "a.yaml").string(),
                          (dir / "b.yaml").string(), "-o", dir.string()});
  ASSERT_EQ(cli.code, 0) << cli.err;
  std::istringstream table(ReadFile(dir / "compare.csv"));
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(table, line)) {
    if (line.rfind("twin,", 0) == 0) rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], rows[1]);
}

TEST(HarnessCompareTest, SurrogateOrderingAtSmallScale) {
  std::vector<ExperimentConfig> configs;
  for (const char* name : {"surrogate-alg3.yaml", "surrogate-dgd.yaml",
                           "surrogate-pdop.yaml"}) {
    ExperimentConfig c = *LoadConfig(ConfigPath(name));
    c.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    configs.push_back(std::move(c));
  }
  const auto results = *Compare(configs, FreshDir("surrogate").string());
  std::vector<double> median;
  for (const RunResult& r : results) {
    std::vector<double> e;
    for (const CellResult& c : r.cells) e.push_back(c.final_error);
    median.push_back(Summarize(e).median);
  }
  EXPECT_LT(median[0], median[1]);
  EXPECT_LT(median[0], median[2]);
}

TEST(HarnessCliTest, ListPresets) {
  const Cli cli = RunCli({"list-presets"});
  EXPECT_EQ(cli.code, 0);
  for (const char* want : {"paper-alg3", "paper-pdop", "dgd-plain",
                           "fig4-five-agent", "secure-edge", "eavesdropper"}) {
    EXPECT_THAT(cli.out, HasSubstr(want));
  }
}

TEST(HarnessCliTest, UsageErrors) {
  EXPECT_EQ(RunCli({}).code, 2);
  EXPECT_EQ(RunCli({"frobnicate"}).code, 2);
  EXPECT_EQ(RunCli({"trace-verify", "/nonexistent", ConfigPath("rendezvous.yaml"),
                    "--seed", "0"})
                .code,
            2);
  EXPECT_EQ(RunCli({"run", "/nonexistent.yaml"}).code, 2);
}

}  // namespace
}  // namespace privconsensus
