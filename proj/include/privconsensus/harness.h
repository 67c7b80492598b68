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

// Config-driven experiment runner: one YAML file describes a protocol, a
// graph and its parameters; every seed is an independent cell.
#ifndef PRIVCONSENSUS_HARNESS_H_
#define PRIVCONSENSUS_HARNESS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privconsensus/adversary_privacy.h"
#include "privconsensus/dynamic_protocols.h"
#include "privconsensus/graph.h"
#include "privconsensus/noise.h"
#include "privconsensus/optimization_protocols.h"
#include "privconsensus/schedule.h"
#include "privconsensus/static_protocols.h"

namespace privconsensus {

inline constexpr char kArtifactVersion[] = "0.1.0";
inline constexpr char kOutputDirEnv[] = "PRIVCONS_OUTPUT_DIR";

enum class Protocol {
  kPlain,
  kDecomposed,
  kSecureEdge,
  kDpStatic,
  kAlg1,
  kAlg2,
  kAlg3,
  kDgd,
  kPdop,
};
absl::StatusOr<Protocol> ParseProtocol(std::string_view name);
std::string ProtocolName(Protocol protocol);
std::vector<std::string> ProtocolNames();
bool IsOptimization(Protocol protocol);

struct GraphSpec {
  std::string preset;  // empty for an inline edge list
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;
  bool directed = false;
  double weight = 0.5;
};
std::vector<std::string> GraphPresetNames();
absl::StatusOr<WeightedGraph> BuildGraph(const GraphSpec& spec);

// What s_k in the budget eps_hat = sum s_k / nu_k scales with.
enum class SensitivityModel { kConstant, kWeakening, kStepsize };

struct ObjectiveSpec {
  std::string kind;  // "quadratic-anchor" or "logistic-surrogate"
  std::vector<std::vector<double>> anchors;  // [agent][dim]
  double anchor_weight = 1.0;
  LogisticSurrogateConfig logistic;
  // The objective is shared by every seed of a config.
  uint64_t data_seed = 0;
};

struct AdversarySpec {
  AdversaryView view;
  int64_t horizon = 30;
};

struct ExperimentConfig {
  std::string name;
  Protocol protocol = Protocol::kPlain;
  GraphSpec graph;
  // [agent][dim]; drawn uniformly on [-1, 1] per seed when absent.
  std::optional<std::vector<std::vector<double>>> initial;
  // Consensus stepsize; defaults to the largest admissible value.
  std::optional<double> epsilon;

  // lambda, gamma/chi, nu, alpha (Algorithm 1), input gain (Algorithm 2).
  SchedulePreset schedules;
  Schedule forgetting;
  Schedule input_gain;
  NoiseConfig noise;
  bool noise_enabled = true;

  ObjectiveSpec objective;
  std::optional<ReferenceSignal> reference;
  std::optional<ConvexSet> set;
  DecompositionConfig decomposition;
  SecureEdgeConfig secure_edge;
  std::vector<AdversarySpec> adversaries;

  double sensitivity = 1.0;
  SensitivityModel sensitivity_model = SensitivityModel::kConstant;

  int64_t steps = 100;
  std::vector<uint64_t> seeds = {0};
  int64_t trajectory_stride = 1;
  bool record_log = true;

  // Not part of the hash: they change neither trajectories nor logs.
  std::string output = "out";
  double tolerance = 1e-6;
  int workers = 0;  // 0: one per hardware thread

  // Sorted-key JSON of the semantic fields and its FNV-1a 64 hash.
  std::string canonical;
  uint64_t hash = 0;
  // Canonical graph and problem (objective, reference or initial states)
  // sections, used to decide whether two configs can be compared.
  std::string graph_key;
  std::string problem_key;
  std::string HashHex() const;
};

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view yaml_text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// --output flag, then the environment variable, then the config.
std::string ResolveOutputDir(const ExperimentConfig& config,
                             const std::optional<std::string>& flag);

struct CellResult {
  uint64_t seed = 0;
  std::vector<int64_t> recorded_k;
  // Protocol error at each recorded k: distance to the average for
  // consensus, tracking error for dynamic runs, max_i |x_i - theta*| for
  // optimization.
  std::vector<double> error;
  double final_error = 0.0;
  std::optional<double> final_gap;  // optimization only
  int64_t convergence_k = -1;       // first recorded k with error < tol
  double epsilon_hat = 0.0;         // +inf when no noise protects the run
  std::vector<AttackReport> attacks;
  double wall_seconds = 0.0;
  std::string trajectory_csv;  // exact bytes of trajectory.csv
};

struct Aggregate {
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample, 0 for a single value
};
Aggregate Summarize(std::vector<double> values);

struct RunResult {
  std::string directory;
  std::vector<CellResult> cells;  // ordered as config.seeds
};

// Runs one cell. Files go to `cell_dir` unless it is empty.
absl::StatusOr<CellResult> RunCell(const ExperimentConfig& config,
                                   uint64_t seed, const std::string& cell_dir);

// All seeds on a worker pool; outputs under <output_dir>/<name>/.
absl::StatusOr<RunResult> RunExperiment(const ExperimentConfig& config,
                                        const std::string& output_dir);

void WriteSummaryCsv(const ExperimentConfig& config,
                     const std::vector<CellResult>& cells, std::ostream& out);

// Configs must share graph and objective (or reference).
absl::Status CheckComparable(const std::vector<ExperimentConfig>& configs);

// Writes compare.csv (one row per config) and compare_curves.csv (median
// error per recorded k) to `output_dir`.
absl::StatusOr<std::vector<RunResult>> Compare(
    const std::vector<ExperimentConfig>& configs,
    const std::string& output_dir);

struct TraceVerdict {
  bool match = false;
  int64_t k = -1;  // first diverging row, when !match
  int agent = -1;
  std::string detail;
};
// Re-runs (config, seed) and compares its trajectory against a golden
// trajectory.csv value by value.
absl::StatusOr<TraceVerdict> VerifyTrace(std::string_view golden,
                                         const ExperimentConfig& config,
                                         uint64_t seed);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_HARNESS_H_
