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


#include "cli.h"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "privconsensus/harness.h"

namespace privconsensus {
namespace {

constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::string Short(double v) {
  if (std::isinf(v)) return "inf";
  return absl::StrFormat("%.6g", v);
}

int Run(const std::string& path, const std::optional<std::string>& output,
        int workers, std::ostream& out, std::ostream& err) {
  auto config = LoadConfig(path);
  if (!config.ok()) {
    err << "error: " << config.status().message() << "\n";
    return kUsage;
  }
  if (workers > 0) config->workers = workers;
  const std::string dir = ResolveOutputDir(*config, output);
  auto result = RunExperiment(*config, dir);
  if (!result.ok()) {
    err << "error: " << result.status().message() << "\n";
    return kFailed;
  }
  out << absl::StrFormat("%s  protocol=%s  config_hash=%s  seeds=%d\n",
                         config->name, ProtocolName(config->protocol),
                         config->HashHex(), result->cells.size());
  for (const CellResult& c : result->cells) {
    out << absl::StrFormat("  seed %-6d final_error=%s", c.seed,
                           Short(c.final_error));
    if (c.final_gap) out << "  gap=" << Short(*c.final_gap);
    out << "  converged_at=" << c.convergence_k
        << "  eps_hat=" << Short(c.epsilon_hat);
    for (const AttackReport& a : c.attacks) {
      out << "  " << a.adversary << ":" << OutcomeName(a.outcome);
    }
    out << "\n";
  }
  out << "wrote " << result->directory << "\n";
  return 0;
}

int CompareVerb(const std::vector<std::string>& paths,
                const std::optional<std::string>& output, std::ostream& out,
                std::ostream& err) {
  std::vector<ExperimentConfig> configs;
  for (const std::string& p : paths) {
    auto c = LoadConfig(p);
    if (!c.ok()) {
      err << "error: " << c.status().message() << "\n";
      return kUsage;
    }
    configs.push_back(*std::move(c));
  }
  if (absl::Status st = CheckComparable(configs); !st.ok()) {
    err << "error: " << st.message() << "\n";
    return kUsage;
  }
  const std::string dir = ResolveOutputDir(configs.front(), output);
  auto results = Compare(configs, dir);
  if (!results.ok()) {
    err << "error: " << results.status().message() << "\n";
    return kFailed;
  }
  std::ifstream table(dir + "/compare.csv");
  out << table.rdbuf();
  out << "wrote " << dir << "/compare.csv\n";
  return 0;
}

int TraceVerify(const std::string& golden_path, const std::string& path,
                uint64_t seed, std::ostream& out, std::ostream& err) {
  std::ifstream in(golden_path);
  if (!in) {
    err << "error: cannot read golden trace " << golden_path << "\n";
    return kUsage;
  }
  std::stringstream golden;
  golden << in.rdbuf();
  auto config = LoadConfig(path);
  if (!config.ok()) {
    err << "error: " << config.status().message() << "\n";
    return kUsage;
  }
  auto verdict = VerifyTrace(golden.str(), *config, seed);
  if (!verdict.ok()) {
    err << "error: " << verdict.status().message() << "\n";
    return kFailed;
  }
  if (verdict->match) {
    out << "PASS " << verdict->detail << "\n";
    return 0;
  }
  out << "FAIL first divergence at k=" << verdict->k
      << " agent=" << verdict->agent << ": " << verdict->detail << "\n";
  return kFailed;
}

void ListPresets(std::ostream& out) {
  out << "protocols: " << absl::StrJoin(ProtocolNames(), ", ") << "\n";
  out << "graphs: " << absl::StrJoin(GraphPresetNames(), ", ") << "\n";
  out << "schedules:\n";
  for (const std::string& name : PresetNames()) {
    const SchedulePreset p = *Preset(name);
    out << "  " << name << ": stepsize=" << p.stepsize.ToString()
        << " weakening=" << p.weakening.ToString()
        << " noise=" << p.noise.ToString() << "\n";
  }
  out << "objectives: quadratic-anchor, logistic-surrogate\n";
  out << "references: constant, ramp, sinusoid\n";
  out << "sets: box, ball, halfspace\n";
  out << "adversaries: honest-but-curious, eavesdropper\n";
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"privcons: privacy-preserving consensus experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output;
  int workers = 0;
  CLI::App* run = app.add_subcommand("run", "run every seed of a config");
  run->add_option("config", config_path, "YAML config")->required();
  run->add_option("-o,--output", output,
                  "output directory (overrides PRIVCONS_OUTPUT_DIR and the "
                  "config)");
  run->add_option("-j,--workers", workers, "worker threads");

  std::vector<std::string> compare_paths;
  CLI::App* compare =
      app.add_subcommand("compare", "run configs side by side");
  compare->add_option("configs", compare_paths, "YAML configs")->required();
  compare->add_option("-o,--output", output, "output directory");

  std::string golden;
  uint64_t seed = 0;
  CLI::App* verify = app.add_subcommand(
      "trace-verify", "re-run a seed and compare against a golden trajectory");
  verify->add_option("golden", golden, "golden trajectory.csv")->required();
  verify->add_option("config", config_path, "YAML config")->required();
  verify->add_option("-s,--seed", seed, "seed")->required();

  CLI::App* list = app.add_subcommand("list-presets", "show named presets");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kUsage;
  }

  if (run->parsed()) return Run(config_path, output, workers, out, err);
  if (compare->parsed()) return CompareVerb(compare_paths, output, out, err);
  if (verify->parsed()) return TraceVerify(golden, config_path, seed, out, err);
  if (list->parsed()) ListPresets(out);
  return 0;
}

}  // namespace privconsensus
