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


// Distributed optimization min_theta F(theta) = (1/m) sum_i f_i(theta):
// the attenuated-coupling DP algorithm, classic DGD, and a geometric-decay
// baseline, over a small library of local objectives.

#ifndef PRIVCONSENSUS_OPTIMIZATION_PROTOCOLS_H_
#define PRIVCONSENSUS_OPTIMIZATION_PROTOCOLS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privconsensus/agent_states.h"
#include "privconsensus/graph.h"
#include "privconsensus/noise.h"
#include "privconsensus/observation_log.h"
#include "privconsensus/rng.h"
#include "privconsensus/schedule.h"

namespace privconsensus {

class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  virtual double Value(std::span<const double> theta) const = 0;
  virtual void Gradient(std::span<const double> theta,
                        std::span<double> out) const = 0;
  // Row-major d x d.
  virtual void Hessian(std::span<const double> theta,
                       std::span<double> out) const = 0;
};

using Objectives = std::vector<std::shared_ptr<const LocalObjective>>;

// (weight / 2) ||theta - anchor||^2. weight = 1 is the rendezvous cost;
// weight = 2 gives ||theta - anchor||^2, which turns the problem into
// static averaging of the anchors.
class QuadraticAnchor : public LocalObjective {
 public:
  explicit QuadraticAnchor(std::vector<double> anchor, double weight = 1.0)
      : anchor_(std::move(anchor)), weight_(weight) {}
  int dim() const override { return static_cast<int>(anchor_.size()); }
  std::string kind() const override { return "quadratic-anchor"; }
  double Value(std::span<const double> theta) const override;
  void Gradient(std::span<const double> theta,
                std::span<double> out) const override;
  void Hessian(std::span<const double> theta,
               std::span<double> out) const override;
  const std::vector<double>& anchor() const { return anchor_; }
  double weight() const { return weight_; }

 private:
  std::vector<double> anchor_;
  double weight_;
};

// 1/2 theta^T A theta + b^T theta with A symmetric (row-major).
class GeneralQuadratic : public LocalObjective {
 public:
  GeneralQuadratic(std::vector<double> a, std::vector<double> b);
  int dim() const override { return static_cast<int>(b_.size()); }
  std::string kind() const override { return "general-quadratic"; }
  double Value(std::span<const double> theta) const override;
  void Gradient(std::span<const double> theta,
                std::span<double> out) const override;
  void Hessian(std::span<const double> theta,
               std::span<double> out) const override;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

// Regularized logistic loss on a local table of labelled rows:
//   (1/n) sum_s log(1 + exp(-y_s <x_s, theta>)) + (l2 / 2) ||theta||^2,
// labels y_s in {-1, +1}.
class LogisticTable : public LocalObjective {
 public:
  LogisticTable(std::vector<std::vector<double>> features,
                std::vector<double> labels, double l2);
  int dim() const override { return dim_; }
  std::string kind() const override { return "logistic-table"; }
  double Value(std::span<const double> theta) const override;
  void Gradient(std::span<const double> theta,
                std::span<double> out) const override;
  void Hessian(std::span<const double> theta,
               std::span<double> out) const override;

 private:
  std::vector<std::vector<double>> features_;
  std::vector<double> labels_;
  double l2_;
  int dim_;
};

struct LogisticSurrogateConfig {
  int agents = 5;
  int dim = 3;
  int rows_per_agent = 40;
  double l2 = 0.01;
  // Labels are drawn from the logistic model with these true weights.
  std::vector<double> true_weights = {3.0, -2.0, 1.5};
  // Agent i's first feature is shifted by (i - (agents - 1) / 2) * shift so
  // local optima differ.
  double feature_shift = 0.5;
};

// Synthetic binary classification split across agents; deterministic in
// `seed` (stream "surrogate-data").
absl::StatusOr<Objectives> MakeLogisticSurrogate(
    const LogisticSurrogateConfig& config, uint64_t seed);

Objectives AnchorObjectives(const std::vector<std::vector<double>>& anchors,
                            double weight = 1.0);

// F(theta) = (1/m) sum_i f_i(theta).
double GlobalObjective(const Objectives& objectives,
                       std::span<const double> theta);

struct Optimum {
  std::vector<double> theta;
  double value = 0.0;
  int iterations = 0;
};

// Damped Newton on F; exact for quadratics in one step. Fails if the summed
// Hessian is not positive definite.
absl::StatusOr<Optimum> CentralizedOptimum(const Objectives& objectives,
                                           double tolerance = 1e-13,
                                           int max_iterations = 100);

// ---------------------------------------------------------------------------

struct OptimizerState {
  AgentStates x;
  int64_t k = 0;
};

// x_i^{k+1} = x_i^k + sum_{j in N_in(i)} gamma^k L_ij (x_j^k + zeta_j^k - x_i^k)
//             - lambda^k grad f_i(x_i^k)
// with zeta_j^k of scale nu^k. `schedules` supplies (lambda, gamma, nu).
absl::StatusOr<OptimizerState> StepAlg3(const OptimizerState& state,
                                        const WeightedGraph& g,
                                        const Objectives& objectives,
                                        const SchedulePreset& schedules,
                                        const NoiseConfig& noise,
                                        std::vector<Rng>& agent_rngs,
                                        ObservationLog* log = nullptr);

// x_i^{k+1} = w_ii x_i^k + sum_{j in N_in(i)} L_ij (x_j^k + zeta_j^k)
//             - lambda^k grad f_i(x_i^k),   w_ii = 1 - sum_j L_ij.
// An agent's own state enters without noise. The weakening schedule of
// `schedules` is ignored.
absl::StatusOr<OptimizerState> StepDgd(const OptimizerState& state,
                                       const WeightedGraph& g,
                                       const Objectives& objectives,
                                       const SchedulePreset& schedules,
                                       const NoiseConfig& noise,
                                       std::vector<Rng>& agent_rngs,
                                       ObservationLog* log = nullptr);

enum class Optimizer { kAlg3, kDgd, kPdop };
absl::StatusOr<Optimizer> ParseOptimizer(std::string_view name);
std::string OptimizerName(Optimizer optimizer);

struct OptimizationOptions {
  bool record_log = false;
  // Keep every stride-th state (and the last); 0 keeps only first and last.
  int64_t trajectory_stride = 1;
  // Default start: uniform on [-1, 1]^d per agent (stream "init").
  std::optional<AgentStates> init;
  // Iteration index of the first update. Schedules are evaluated from here.
  int64_t first_k = 0;
};

struct OptimizationRun {
  std::vector<int64_t> recorded_k;
  std::vector<AgentStates> trajectory;  // aligned with recorded_k
  AgentStates final_state;
  ObservationLog log;
};

// Runs `steps` rounds. kPdop is DGD driven by the schedules given (the
// paper-pdop preset supplies 0.95^k and 0.98^k).
// Weights must satisfy eta <= L_ij < 1 over the first min(steps, 4096)
// iterations; asymmetric weights are allowed.
absl::StatusOr<OptimizationRun> RunOptimization(
    Optimizer optimizer, const WeightedGraph& g, const Objectives& objectives,
    const SchedulePreset& schedules, const NoiseConfig& noise, int64_t steps,
    uint64_t seed, const OptimizationOptions& options = {});

// PDOP-style baseline: DGD with the paper-pdop schedules (0.95^k, 0.98^k).
absl::StatusOr<OptimizationRun> RunPdopBaseline(
    const WeightedGraph& g, const Objectives& objectives,
    const NoiseConfig& noise, int64_t steps, uint64_t seed,
    const OptimizationOptions& options = {});

// gamma^k * zeta for `count` fresh draws of zeta with scale nu^k: the noise
// actually fed into the attenuated update.
std::vector<double> AttenuatedNoiseSamples(const SchedulePreset& schedules,
                                           const NoiseConfig& noise, int64_t k,
                                           int count, Rng& rng);

// mean_i F(x_i) - F*.
double OptimalityGap(const Objectives& objectives, const AgentStates& x,
                     double optimum_value);

// CSV header k,agent,dist_to_opt,F_of_mean; one row per recorded (k, agent).
void WriteOutcomeCsv(const OptimizationRun& run, const Objectives& objectives,
                     const std::vector<double>& theta_star, std::ostream& out);

// Rendezvous: f_i(x) = 1/2 (x - p_i)^2 on a circle, scalar states.
struct RendezvousResult {
  double optimum = 0.0;                 // mean of positions
  std::vector<double> final_distance;   // |x_i^K - optimum| per agent
  OptimizationRun run;
};

absl::StatusOr<RendezvousResult> RunRendezvous(
    const std::vector<double>& positions, double weight, Optimizer optimizer,
    const SchedulePreset& schedules, const NoiseConfig& noise, int64_t steps,
    uint64_t seed, const OptimizationOptions& options = {});

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_OPTIMIZATION_PROTOCOLS_H_
