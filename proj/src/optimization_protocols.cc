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

#include "privconsensus/optimization_protocols.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

// log(1 + exp(-z)) without overflow.
double LogOnePlusExpNeg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)).
double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

absl::Status CheckProblem(const WeightedGraph& g, const Objectives& objectives,
                          const AgentStates& x) {
  const int m = g.node_count();
  if (static_cast<int>(objectives.size()) != m || x.agents() != m) {
    return absl::InvalidArgumentError(
        absl::StrCat("graph has ", m, " nodes but there are ",
                     objectives.size(), " objectives and ", x.agents(),
                     " states"));
  }
  for (int i = 0; i < m; ++i) {
    if (objectives[i] == nullptr || objectives[i]->dim() != x.dim()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "objective of agent ", i, " does not match state dimension ",
          x.dim()));
    }
  }
  return absl::OkStatus();
}

absl::Status LocalGradient(const LocalObjective& f, std::span<const double> x,
                           int agent, int64_t k, std::span<double> out) {
  f.Gradient(x, out);
  for (double v : out) {
    if (!std::isfinite(v)) {
      return absl::OutOfRangeError(absl::StrCat(
          "non-finite gradient at agent ", agent, ", k=", k));
    }
  }
  return absl::OkStatus();
}

}  // namespace

// ---------------------------------------------------------------------------
// Objectives

double QuadraticAnchor::Value(std::span<const double> theta) const {
  double s = 0.0;
  for (size_t c = 0; c < anchor_.size(); ++c) {
    s += (theta[c] - anchor_[c]) * (theta[c] - anchor_[c]);
  }
  return 0.5 * weight_ * s;
}

void QuadraticAnchor::Gradient(std::span<const double> theta,
                               std::span<double> out) const {
  for (size_t c = 0; c < anchor_.size(); ++c) {
    out[c] = weight_ * (theta[c] - anchor_[c]);
  }
}

void QuadraticAnchor::Hessian(std::span<const double>,
                              std::span<double> out) const {
  const int d = dim();
  std::fill(out.begin(), out.end(), 0.0);
  for (int c = 0; c < d; ++c) out[c * d + c] = weight_;
}

GeneralQuadratic::GeneralQuadratic(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {}

double GeneralQuadratic::Value(std::span<const double> theta) const {
  const int d = dim();
  double quad = 0.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) quad += theta[r] * a_[r * d + c] * theta[c];
  }
  return 0.5 * quad + Dot(b_, theta);
}

void GeneralQuadratic::Gradient(std::span<const double> theta,
                                std::span<double> out) const {
  const int d = dim();
  for (int r = 0; r < d; ++r) {
    double s = b_[r];
    for (int c = 0; c < d; ++c) s += a_[r * d + c] * theta[c];
    out[r] = s;
  }
}

void GeneralQuadratic::Hessian(std::span<const double>,
                               std::span<double> out) const {
  std::copy(a_.begin(), a_.end(), out.begin());
}

LogisticTable::LogisticTable(std::vector<std::vector<double>> features,
                             std::vector<double> labels, double l2)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      l2_(l2),
      dim_(features_.empty() ? 0 : static_cast<int>(features_[0].size())) {}

double LogisticTable::Value(std::span<const double> theta) const {
  double loss = 0.0;
  for (size_t s = 0; s < features_.size(); ++s) {
    loss += LogOnePlusExpNeg(labels_[s] * Dot(features_[s], theta));
  }
  return loss / features_.size() + 0.5 * l2_ * Dot(theta, theta);
}

void LogisticTable::Gradient(std::span<const double> theta,
                             std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double n = static_cast<double>(features_.size());
  for (size_t s = 0; s < features_.size(); ++s) {
    const double z = labels_[s] * Dot(features_[s], theta);
    const double coeff = -labels_[s] * Sigmoid(-z) / n;
    for (int c = 0; c < dim_; ++c) out[c] += coeff * features_[s][c];
  }
  for (int c = 0; c < dim_; ++c) out[c] += l2_ * theta[c];
}

void LogisticTable::Hessian(std::span<const double> theta,
                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double n = static_cast<double>(features_.size());
  for (size_t s = 0; s < features_.size(); ++s) {
    const double p = Sigmoid(labels_[s] * Dot(features_[s], theta));
    const double coeff = p * (1.0 - p) / n;
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) {
        out[r * dim_ + c] += coeff * features_[s][r] * features_[s][c];
      }
    }
  }
  for (int c = 0; c < dim_; ++c) out[c * dim_ + c] += l2_;
}

absl::StatusOr<Objectives> MakeLogisticSurrogate(
    const LogisticSurrogateConfig& config, uint64_t seed) {
  if (config.agents < 1 || config.dim < 1 || config.rows_per_agent < 1) {
    return absl::InvalidArgumentError(
        "surrogate needs >= 1 agent, dimension and row");
  }
  if (static_cast<int>(config.true_weights.size()) != config.dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("true_weights has ", config.true_weights.size(),
                     " entries but dim is ", config.dim));
  }
  if (!(config.l2 > 0.0)) {
    return absl::InvalidArgumentError("surrogate l2 must be positive");
  }
  Objectives out;
  for (int i = 0; i < config.agents; ++i) {
    Rng rng(seed, "surrogate-data", i);
    const double shift =
        (i - 0.5 * (config.agents - 1)) * config.feature_shift;
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    for (int s = 0; s < config.rows_per_agent; ++s) {
      std::vector<double> row(config.dim);
      for (double& v : row) v = rng.Gaussian(1.0);
      row[0] += shift;
      const double p = Sigmoid(Dot(row, config.true_weights));
      labels.push_back(rng.Uniform01() < p ? 1.0 : -1.0);
      features.push_back(std::move(row));
    }
    out.push_back(std::make_shared<LogisticTable>(std::move(features),
                                                  std::move(labels),
                                                  config.l2));
  }
  return out;
}

Objectives AnchorObjectives(const std::vector<std::vector<double>>& anchors,
                            double weight) {
  Objectives out;
  for (const auto& p : anchors) {
    out.push_back(std::make_shared<QuadraticAnchor>(p, weight));
  }
  return out;
}

double GlobalObjective(const Objectives& objectives,
                       std::span<const double> theta) {
  double s = 0.0;
  for (const auto& f : objectives) s += f->Value(theta);
  return s / objectives.size();
}

absl::StatusOr<Optimum> CentralizedOptimum(const Objectives& objectives,
                                           double tolerance,
                                           int max_iterations) {
  if (objectives.empty()) {
    return absl::InvalidArgumentError("no objectives");
  }
  const int d = objectives[0]->dim();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  std::vector<double> g_buf(d);
  std::vector<double> h_buf(static_cast<size_t>(d) * d);
  auto value_at = [&](const Eigen::VectorXd& t) {
    return GlobalObjective(objectives, std::span<const double>(t.data(), d));
  };

  Optimum result;
  for (int it = 0; it < max_iterations; ++it) {
    grad.setZero();
    hess.setZero();
    const std::span<const double> t(theta.data(), d);
    for (const auto& f : objectives) {
      f->Gradient(t, g_buf);
      f->Hessian(t, h_buf);
      for (int r = 0; r < d; ++r) {
        grad(r) += g_buf[r];
        for (int c = 0; c < d; ++c) hess(r, c) += h_buf[r * d + c];
      }
    }
    result.iterations = it;
    if (grad.norm() <= tolerance * objectives.size()) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 0.0) {
      return absl::FailedPreconditionError(
          "summed Hessian is not positive definite");
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    // Backtracking keeps Newton monotone on the logistic loss.
    const double f0 = value_at(theta);
    double t_step = 1.0;
    Eigen::VectorXd candidate = theta - step;
    while (value_at(candidate) > f0 && t_step > 1e-10) {
      t_step *= 0.5;
      candidate = theta - t_step * step;
    }
    if ((candidate - theta).norm() == 0.0) break;
    theta = candidate;
  }
  result.theta.assign(theta.data(), theta.data() + d);
  result.value = value_at(theta);
  return result;
}

// ---------------------------------------------------------------------------
// Steppers

absl::StatusOr<OptimizerState> StepAlg3(const OptimizerState& state,
                                        const WeightedGraph& g,
                                        const Objectives& objectives,
                                        const SchedulePreset& schedules,
                                        const NoiseConfig& noise,
                                        std::vector<Rng>& agent_rngs,
                                        ObservationLog* log) {
  RETURN_IF_ERROR(CheckProblem(g, objectives, state.x));
  const int m = g.node_count();
  const int d = state.x.dim();
  const int64_t k = state.k;
  const double lambda = schedules.stepsize.Eval(k);
  const double gamma = schedules.weakening.Eval(k);

  std::vector<double> received;
  ExchangeNoisyStates(g, state.x, k, schedules.noise.Eval(k), noise,
                      agent_rngs, "noisy_state", log, received);
  OptimizerState next{AgentStates(m, d), k + 1};
  std::vector<double> grad(d);
  for (int i = 0; i < m; ++i) {
    RETURN_IF_ERROR(
        LocalGradient(*objectives[i], state.x.row(i), i, k, grad));
    for (int c = 0; c < d; ++c) {
      const double xi = state.x.at(i, c);
      double acc = 0.0;
      for (int j : g.InNeighbors(i)) {
        const double yj = received[(static_cast<size_t>(i) * m + j) * d + c];
        acc += gamma * g.Weight(i, j, k) * (yj - xi);
      }
      next.x.at(i, c) = xi + acc - lambda * grad[c];
    }
  }
  return next;
}

absl::StatusOr<OptimizerState> StepDgd(const OptimizerState& state,
                                       const WeightedGraph& g,
                                       const Objectives& objectives,
                                       const SchedulePreset& schedules,
                                       const NoiseConfig& noise,
                                       std::vector<Rng>& agent_rngs,
                                       ObservationLog* log) {
  RETURN_IF_ERROR(CheckProblem(g, objectives, state.x));
  const int m = g.node_count();
  const int d = state.x.dim();
  const int64_t k = state.k;
  const double lambda = schedules.stepsize.Eval(k);

  std::vector<double> received;
  ExchangeNoisyStates(g, state.x, k, schedules.noise.Eval(k), noise,
                      agent_rngs, "noisy_state", log, received);
  OptimizerState next{AgentStates(m, d), k + 1};
  std::vector<double> grad(d);
  for (int i = 0; i < m; ++i) {
    double self_weight = 1.0;
    for (int j : g.InNeighbors(i)) self_weight -= g.Weight(i, j, k);
    if (self_weight < 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "DGD needs incoming weights summing to at most 1; agent ", i,
          " has self weight ", self_weight, " at k=", k));
    }
    RETURN_IF_ERROR(
        LocalGradient(*objectives[i], state.x.row(i), i, k, grad));
    for (int c = 0; c < d; ++c) {
      double acc = self_weight * state.x.at(i, c);
      for (int j : g.InNeighbors(i)) {
        acc += g.Weight(i, j, k) *
               received[(static_cast<size_t>(i) * m + j) * d + c];
      }
      next.x.at(i, c) = acc - lambda * grad[c];
    }
  }
  return next;
}

absl::StatusOr<Optimizer> ParseOptimizer(std::string_view name) {
  if (name == "alg3") return Optimizer::kAlg3;
  if (name == "dgd") return Optimizer::kDgd;
  if (name == "pdop") return Optimizer::kPdop;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown optimizer '", std::string(name), "' (alg3, dgd, pdop)"));
}

std::string OptimizerName(Optimizer optimizer) {
  switch (optimizer) {
    case Optimizer::kAlg3:
      return "alg3";
    case Optimizer::kDgd:
      return "dgd";
    case Optimizer::kPdop:
      return "pdop";
  }
  return "?";
}

absl::StatusOr<OptimizationRun> RunOptimization(
    Optimizer optimizer, const WeightedGraph& g, const Objectives& objectives,
    const SchedulePreset& schedules, const NoiseConfig& noise, int64_t steps,
    uint64_t seed, const OptimizationOptions& options) {
  const int m = g.node_count();
  if (objectives.empty() || static_cast<int>(objectives.size()) != m) {
    return absl::InvalidArgumentError("need one objective per agent");
  }
  if (!IsConnected(g)) {
    return absl::FailedPreconditionError(
        "distributed optimization needs a (strongly) connected graph");
  }
  RETURN_IF_ERROR(schedules.stepsize.Validate());
  RETURN_IF_ERROR(schedules.weakening.Validate());
  RETURN_IF_ERROR(schedules.noise.Validate());
  const WeightReport weights =
      ValidateWeights(g, kDefaultEta, std::min<int64_t>(steps, 4096));
  for (const WeightViolation& v : weights.violations) {
    if (v.kind != WeightViolation::Kind::kAsymmetric) {
      return absl::InvalidArgumentError(v.ToString());
    }
  }
  if (options.first_k < 0) {
    return absl::InvalidArgumentError("first_k must be non-negative");
  }
  const int d = objectives[0]->dim();

  OptimizerState state{AgentStates(m, d), options.first_k};
  if (options.init.has_value()) {
    state.x = *options.init;
  } else {
    for (int i = 0; i < m; ++i) {
      Rng init_rng(seed, "init", i);
      for (int c = 0; c < d; ++c) state.x.at(i, c) = init_rng.Uniform(-1, 1);
    }
  }
  RETURN_IF_ERROR(CheckProblem(g, objectives, state.x));

  OptimizationRun run;
  auto record = [&](const OptimizerState& s) {
    run.recorded_k.push_back(s.k);
    run.trajectory.push_back(s.x);
  };
  record(state);
  std::vector<Rng> rngs = AgentNoiseStreams(seed, m);
  ObservationLog* log = options.record_log ? &run.log : nullptr;
  const int64_t last_k = options.first_k + steps;
  for (int64_t k = 0; k < steps; ++k) {
    if (optimizer == Optimizer::kAlg3) {
      ASSIGN_OR_RETURN(state,
                       StepAlg3(state, g, objectives, schedules, noise, rngs,
                                log));
    } else {
      ASSIGN_OR_RETURN(state, StepDgd(state, g, objectives, schedules, noise,
                                      rngs, log));
    }
    const bool last = state.k == last_k;
    const bool on_stride = options.trajectory_stride > 0 &&
                           (state.k - options.first_k) %
                                   options.trajectory_stride ==
                               0;
    if (last || on_stride) record(state);
  }
  run.final_state = state.x;
  return run;
}

absl::StatusOr<OptimizationRun> RunPdopBaseline(
    const WeightedGraph& g, const Objectives& objectives,
    const NoiseConfig& noise, int64_t steps, uint64_t seed,
    const OptimizationOptions& options) {
  ASSIGN_OR_RETURN(SchedulePreset preset, Preset("paper-pdop"));
  return RunOptimization(Optimizer::kPdop, g, objectives, preset, noise, steps,
                         seed, options);
}

std::vector<double> AttenuatedNoiseSamples(const SchedulePreset& schedules,
                                           const NoiseConfig& noise, int64_t k,
                                           int count, Rng& rng) {
  const double gamma = schedules.weakening.Eval(k);
  const double scale = schedules.noise.Eval(k);
  std::vector<double> out(count);
  for (double& v : out) v = gamma * noise.Draw(rng, scale);
  return out;
}

double OptimalityGap(const Objectives& objectives, const AgentStates& x,
                     double optimum_value) {
  double s = 0.0;
  for (int i = 0; i < x.agents(); ++i) s += GlobalObjective(objectives, x.row(i));
  return s / x.agents() - optimum_value;
}

void WriteOutcomeCsv(const OptimizationRun& run, const Objectives& objectives,
                     const std::vector<double>& theta_star, std::ostream& out) {
  out << "k,agent,dist_to_opt,F_of_mean\n";
  char buf[128];
  for (size_t r = 0; r < run.trajectory.size(); ++r) {
    const AgentStates& x = run.trajectory[r];
    const std::vector<double> mean = x.Mean();
    const double f_mean = GlobalObjective(objectives, mean);
    for (int i = 0; i < x.agents(); ++i) {
      double dist = 0.0;
      for (int c = 0; c < x.dim(); ++c) {
        dist += (x.at(i, c) - theta_star[c]) * (x.at(i, c) - theta_star[c]);
      }
      std::snprintf(buf, sizeof(buf), "%lld,%d,%.17g,%.17g\n",
                    static_cast<long long>(run.recorded_k[r]), i,
                    std::sqrt(dist), f_mean);
      out << buf;
    }
  }
}

absl::StatusOr<RendezvousResult> RunRendezvous(
    const std::vector<double>& positions, double weight, Optimizer optimizer,
    const SchedulePreset& schedules, const NoiseConfig& noise, int64_t steps,
    uint64_t seed, const OptimizationOptions& options) {
  const int m = static_cast<int>(positions.size());
  if (m < 2) {
    return absl::InvalidArgumentError("rendezvous needs at least 2 agents");
  }
  ASSIGN_OR_RETURN(WeightedGraph g, CircleGraph(m, weight));
  std::vector<std::vector<double>> anchors;
  for (double p : positions) anchors.push_back({p});
  RendezvousResult result;
  for (double p : positions) result.optimum += p;
  result.optimum /= m;
  ASSIGN_OR_RETURN(result.run,
                   RunOptimization(optimizer, g, AnchorObjectives(anchors),
                                   schedules, noise, steps, seed, options));
  for (int i = 0; i < m; ++i) {
    result.final_distance.push_back(
        std::fabs(result.run.final_state.at(i, 0) - result.optimum));
  }
  return result;
}

}  // namespace privconsensus
