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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.17g", v);
}

std::string HeaderLine(const ExperimentConfig& c, uint64_t seed) {
  return absl::StrFormat("# privcons %s config_hash=%s seed=%d protocol=%s\n",
                         kArtifactVersion, c.HashHex(), seed,
                         ProtocolName(c.protocol));
}

std::string NdjsonHeader(const ExperimentConfig& c, uint64_t seed) {
  nlohmann::ordered_json h;
  h["record"] = "header";
  h["version"] = kArtifactVersion;
  h["config_hash"] = c.HashHex();
  h["seed"] = seed;
  h["protocol"] = ProtocolName(c.protocol);
  return h.dump() + "\n";
}

absl::Status WriteAtomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          absl::StrCat("cannot write ", tmp.string()));
    }
    out << text;
    if (!out.flush()) {
      return absl::UnavailableError(absl::StrCat("short write ", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("rename ", tmp.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

bool Keep(int64_t k, int64_t steps, int64_t stride) {
  return k == 0 || k == steps || (stride > 0 && k % stride == 0);
}

struct Recording {
  std::vector<int64_t> ks;
  std::vector<AgentStates> states;
  std::vector<double> error;
};

double Distance(std::span<const double> a, const std::vector<double>& b) {
  double sq = 0.0;
  for (size_t c = 0; c < b.size(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(sq);
}

// max_i ||x_i - target||.
double MaxDistance(const AgentStates& x, const std::vector<double>& target) {
  double worst = 0.0;
  for (int i = 0; i < x.agents(); ++i) {
    worst = std::max(worst, Distance(x.row(i), target));
  }
  return worst;
}

AgentStates InitialStates(const ExperimentConfig& c, int m, int dim,
                          uint64_t seed) {
  AgentStates x(m, dim);
  if (c.initial) {
    for (int i = 0; i < m; ++i) {
      for (int d = 0; d < dim; ++d) x.at(i, d) = (*c.initial)[i][d];
    }
    return x;
  }
  Rng rng(seed, "init");
  for (double& v : x.data()) v = rng.Uniform(-1.0, 1.0);
  return x;
}

// Attack errors (nothing visible, ...) are reported as failures.
AttackReport Settle(absl::StatusOr<AttackReport> report, std::string attack,
                    const AdversarySpec& adv, AttackTarget target,
                    const std::vector<double>& truth) {
  if (!report.ok()) {
    AttackReport failed;
    failed.attack = std::move(attack);
    failed.adversary = adv.view.ToString();
    failed.target = target;
    failed.outcome = AttackOutcome::kFailed;
    failed.diagnostic = std::string(report.status().message());
    return failed;
  }
  return ReconcileWithTruth(*std::move(report), truth);
}

int64_t AttackSteps(const ExperimentConfig& c) {
  int64_t h = 1;
  for (const AdversarySpec& a : c.adversaries) h = std::max(h, a.horizon);
  return std::min(c.steps, h);
}

AttackOptions OptionsFor(const AdversarySpec& a) {
  AttackOptions o;
  o.horizon = a.horizon;
  return o;
}

absl::StatusOr<Objectives> BuildObjectives(const ExperimentConfig& c, int m) {
  if (c.objective.kind == "quadratic-anchor") {
    return AnchorObjectives(c.objective.anchors, c.objective.anchor_weight);
  }
  LogisticSurrogateConfig lc = c.objective.logistic;
  lc.agents = m;
  return MakeLogisticSurrogate(lc, c.objective.data_seed);
}

Optimizer OptimizerFor(Protocol p) {
  if (p == Protocol::kAlg3) return Optimizer::kAlg3;
  if (p == Protocol::kDgd) return Optimizer::kDgd;
  return Optimizer::kPdop;
}

struct CellOutcome {
  Recording rec;
  std::optional<double> gap;
  ObservationLog log;
  std::vector<AttackReport> attacks;
};

absl::StatusOr<CellOutcome> RunStatic(const ExperimentConfig& c,
                                      const WeightedGraph& g, uint64_t seed) {
  const int m = g.node_count();
  const AgentStates x0 = InitialStates(c, m, 1, seed);
  const std::vector<double> init = x0.data();
  const std::vector<double> mean = x0.Mean();
  const double eps = *c.epsilon;
  CellOutcome out;
  ObservationLog* log = c.record_log ? &out.log : nullptr;
  auto offer = [&](int64_t k, const AgentStates& x, double error) {
    if (!Keep(k, c.steps, c.trajectory_stride)) return;
    out.rec.ks.push_back(k);
    out.rec.states.push_back(x);
    out.rec.error.push_back(error);
  };

  switch (c.protocol) {
    case Protocol::kPlain:
    case Protocol::kDpStatic: {
      ConsensusState st{x0, 0, eps};
      std::vector<Rng> rngs = AgentNoiseStreams(seed, m);
      offer(0, st.x, MaxDistance(st.x, mean));
      for (int64_t k = 0; k < c.steps; ++k) {
        if (c.protocol == Protocol::kPlain) {
          ASSIGN_OR_RETURN(st, StepPlain(st, g, log));
        } else {
          ASSIGN_OR_RETURN(st, StepDpStatic(st, g, c.schedules.noise, rngs, log));
        }
        offer(k + 1, st.x, MaxDistance(st.x, mean));
      }
      break;
    }
    case Protocol::kDecomposed: {
      ASSIGN_OR_RETURN(DecomposedRun run,
                       RunDecomposed(g, init, eps, c.decomposition, c.steps,
                                     seed, c.record_log));
      for (int64_t k = 0; k <= c.steps; ++k) {
        if (!Keep(k, c.steps, c.trajectory_stride)) continue;
        AgentStates x(m, 2);  // dim 0: alpha, dim 1: beta
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
          x.at(i, 0) = run.alpha[k][i];
          x.at(i, 1) = run.beta[k][i];
          worst = std::max({worst, std::fabs(run.alpha[k][i] - mean[0]),
                            std::fabs(run.beta[k][i] - mean[0])});
        }
        offer(k, x, worst);
      }
      out.log = std::move(run.log);
      break;
    }
    case Protocol::kSecureEdge: {
      ASSIGN_OR_RETURN(SecureEdgeRun run, RunSecureEdge(g, init, eps,
                                                        c.secure_edge, c.steps,
                                                        seed));
      for (int64_t k = 0; k <= c.steps; ++k) {
        if (!Keep(k, c.steps, c.trajectory_stride)) continue;
        const AgentStates x = AgentStates::FromScalars(run.trajectory[k]);
        offer(k, x, MaxDistance(x, mean));
      }
      if (c.record_log) out.log = std::move(run.log);
      break;
    }
    default:
      return absl::InternalError("not a consensus protocol");
  }

  // Attacks replay the first rounds; runs are deterministic in the seed, so
  // the replayed prefix is the prefix of the run above.
  if (c.adversaries.empty()) return out;
  const int64_t h = AttackSteps(c);
  const AttackTarget target = AttackTarget::kInitialValue;
  if (c.protocol == Protocol::kPlain) {
    ASSIGN_OR_RETURN(PlainRun run, RunPlain(g, x0, eps, h, true));
    for (const AdversarySpec& a : c.adversaries) {
      out.attacks.push_back(Settle(
          AttackPlainConsensus(a.view, run.log, g, eps, OptionsFor(a)),
          "plain-consensus", a, target, init));
    }
  } else if (c.protocol == Protocol::kDecomposed) {
    ASSIGN_OR_RETURN(DecomposedRun run,
                     RunDecomposed(g, init, eps, c.decomposition, h, seed, true));
    for (const AdversarySpec& a : c.adversaries) {
      std::optional<DecomposedInsider> insider;
      if (a.view.kind() == AdversaryView::Kind::kHonestButCurious) {
        insider = InsiderOf(run, a.view.agent());
      }
      out.attacks.push_back(Settle(
          AttackDecomposed(a.view, run.log, g, eps, insider,
                           c.decomposition.pinned_internal_weight,
                           OptionsFor(a)),
          "state-decomposition", a, target, init));
    }
  } else if (c.protocol == Protocol::kSecureEdge) {
    ASSIGN_OR_RETURN(SecureEdgeRun run,
                     RunSecureEdge(g, init, eps, c.secure_edge, h, seed));
    for (const AdversarySpec& a : c.adversaries) {
      std::optional<SecureInsider> insider;
      if (a.view.kind() == AdversaryView::Kind::kHonestButCurious) {
        insider = InsiderOf(run, a.view.agent());
      }
      out.attacks.push_back(Settle(
          AttackSecureEdge(a.view, run.log, g, eps, insider, OptionsFor(a)),
          "secure-edge", a, target, init));
    }
  }
  return out;
}

absl::StatusOr<CellOutcome> RunDynamic(const ExperimentConfig& c,
                                       const WeightedGraph& g, uint64_t seed) {
  DynamicRun run;
  if (c.protocol == Protocol::kAlg1) {
    ASSIGN_OR_RETURN(run, RunAlg1(g, *c.reference, c.schedules.weakening,
                                  c.forgetting, c.schedules.noise, c.noise,
                                  c.steps, seed, c.record_log));
  } else {
    std::optional<AgentStates> init;
    if (c.initial) {
      init = InitialStates(c, g.node_count(), c.reference->dim(), seed);
    }
    ASSIGN_OR_RETURN(run, RunAlg2(g, *c.reference, c.schedules.weakening,
                                  c.input_gain, c.schedules.noise, *c.set,
                                  c.noise, c.steps, seed, c.record_log, init));
  }
  CellOutcome out;
  for (int64_t k = 0; k <= c.steps; ++k) {
    if (!Keep(k, c.steps, c.trajectory_stride)) continue;
    out.rec.ks.push_back(k);
    out.rec.states.push_back(std::move(run.trajectory[k]));
    out.rec.error.push_back(run.tracking_error[k]);
  }
  out.log = std::move(run.log);
  return out;
}

absl::StatusOr<CellOutcome> RunOptimizationCell(const ExperimentConfig& c,
                                                const WeightedGraph& g,
                                                uint64_t seed) {
  const int m = g.node_count();
  ASSIGN_OR_RETURN(Objectives objectives, BuildObjectives(c, m));
  ASSIGN_OR_RETURN(Optimum opt, CentralizedOptimum(objectives));
  const int dim = objectives[0]->dim();
  OptimizationOptions options;
  options.record_log = c.record_log;
  options.trajectory_stride = c.trajectory_stride;
  if (c.initial) options.init = InitialStates(c, m, dim, seed);
  const Optimizer optimizer = OptimizerFor(c.protocol);
  ASSIGN_OR_RETURN(OptimizationRun run,
                   RunOptimization(optimizer, g, objectives, c.schedules,
                                   c.noise, c.steps, seed, options));
  CellOutcome out;
  out.rec.ks = run.recorded_k;
  for (const AgentStates& x : run.trajectory) {
    out.rec.error.push_back(MaxDistance(x, opt.theta));
  }
  out.rec.states = std::move(run.trajectory);
  out.gap = OptimalityGap(objectives, run.final_state, opt.value);
  out.log = std::move(run.log);

  if (c.adversaries.empty()) return out;
  OptimizationOptions prefix = options;
  prefix.record_log = true;
  prefix.trajectory_stride = 1;
  const int64_t h = AttackSteps(c);
  ASSIGN_OR_RETURN(OptimizationRun replay,
                   RunOptimization(optimizer, g, objectives, c.schedules,
                                   c.noise, h, seed, prefix));
  std::vector<double> truth;
  for (const auto& anchor : c.objective.anchors) truth.push_back(anchor[0]);
  for (const AdversarySpec& a : c.adversaries) {
    std::optional<OptimizationInsider> insider;
    if (a.view.kind() == AdversaryView::Kind::kHonestButCurious) {
      OptimizationInsider in;
      in.agent = a.view.agent();
      for (const AgentStates& x : replay.trajectory) {
        in.states.push_back(x.at(in.agent, 0));
      }
      in.anchor = truth[in.agent];
      insider = std::move(in);
    }
    out.attacks.push_back(
        Settle(AttackAnchors(a.view, replay.log, g, optimizer, c.schedules,
                             c.noise, c.objective.anchor_weight, insider,
                             OptionsFor(a)),
               "gradient-anchor", a, AttackTarget::kGradientParameter, truth));
  }
  return out;
}

absl::StatusOr<double> EpsilonHat(const ExperimentConfig& c) {
  if (c.protocol == Protocol::kPlain || c.protocol == Protocol::kDecomposed ||
      c.protocol == Protocol::kSecureEdge) {
    return kInf;
  }
  SensitivityFn s = ConstantSensitivity(c.sensitivity);
  if (c.sensitivity_model == SensitivityModel::kWeakening) {
    s = AttenuatedSensitivity(c.schedules.weakening, c.sensitivity);
  } else if (c.sensitivity_model == SensitivityModel::kStepsize) {
    s = AttenuatedSensitivity(c.schedules.stepsize, c.sensitivity);
  }
  ASSIGN_OR_RETURN(PrivacyLedger ledger,
                   DpBudget(c.schedules.noise, s, c.steps));
  return ledger.Total();
}

std::string TrajectoryCsv(const ExperimentConfig& c, uint64_t seed,
                          const Recording& rec) {
  std::string out = HeaderLine(c, seed);
  out += "k,agent,dim,x\n";
  for (size_t r = 0; r < rec.ks.size(); ++r) {
    const AgentStates& x = rec.states[r];
    for (int i = 0; i < x.agents(); ++i) {
      for (int d = 0; d < x.dim(); ++d) {
        absl::StrAppend(&out, rec.ks[r], ",", i, ",", d, ",", Num(x.at(i, d)),
                        "\n");
      }
    }
  }
  return out;
}

std::string AttackSummary(const std::vector<AttackReport>& attacks) {
  std::vector<std::string> parts;
  for (const AttackReport& a : attacks) {
    std::string s = absl::StrCat(a.adversary, "=", OutcomeName(a.outcome));
    if (a.outcome == AttackOutcome::kAmbiguous) {
      absl::StrAppend(&s, "/", a.ambiguity_dimension);
    }
    parts.push_back(std::move(s));
  }
  return absl::StrJoin(parts, ";");
}

constexpr char kSummaryColumns[] =
    "seed,protocol,final_error,final_gap,convergence_k,epsilon_hat,attacks,"
    "wall_seconds\n";

std::string SummaryRow(const ExperimentConfig& c, const CellResult& r) {
  return absl::StrCat(r.seed, ",", ProtocolName(c.protocol), ",",
                      Num(r.final_error), ",",
                      r.final_gap ? Num(*r.final_gap) : "", ",",
                      r.convergence_k, ",", Num(r.epsilon_hat), ",\"",
                      AttackSummary(r.attacks), "\",",
                      absl::StrFormat("%.3f", r.wall_seconds), "\n");
}

std::string AggregateCsv(const ExperimentConfig& c,
                         const std::vector<CellResult>& cells) {
  std::vector<double> err, gap, conv, eps, wall;
  std::map<std::string, std::vector<double>> exact;
  for (const CellResult& r : cells) {
    err.push_back(r.final_error);
    if (r.final_gap) gap.push_back(*r.final_gap);
    if (r.convergence_k >= 0) conv.push_back(static_cast<double>(r.convergence_k));
    eps.push_back(r.epsilon_hat);
    wall.push_back(r.wall_seconds);
    for (const AttackReport& a : r.attacks) {
      exact[absl::StrCat("exact_recovery[", a.adversary, "]")].push_back(
          a.outcome == AttackOutcome::kExactRecovery ? 1.0 : 0.0);
    }
  }
  std::string out = absl::StrFormat("# privcons %s config_hash=%s seeds=%d\n",
                                    kArtifactVersion, c.HashHex(), cells.size());
  out += "metric,n,median,mean,stddev\n";
  auto row = [&](const std::string& name, const std::vector<double>& v) {
    if (v.empty()) {
      absl::StrAppend(&out, "\"", name, "\",0,,,\n");
      return;
    }
    const Aggregate a = Summarize(v);
    absl::StrAppend(&out, "\"", name, "\",", v.size(), ",", Num(a.median), ",",
                    Num(a.mean), ",", Num(a.stddev), "\n");
  };
  row("final_error", err);
  row("final_gap", gap);
  row("convergence_k", conv);
  row("epsilon_hat", eps);
  row("wall_seconds", wall);
  for (const auto& [name, v] : exact) row(name, v);
  return out;
}

}  // namespace

Aggregate Summarize(std::vector<double> values) {
  Aggregate a;
  if (values.empty()) return a;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  a.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  if (n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / (n - 1));
  }
  return a;
}

absl::StatusOr<CellResult> RunCell(const ExperimentConfig& config,
                                   uint64_t seed, const std::string& cell_dir) {
  const auto start = std::chrono::steady_clock::now();
  ASSIGN_OR_RETURN(WeightedGraph g, BuildGraph(config.graph));
  absl::StatusOr<CellOutcome> outcome;
  if (IsOptimization(config.protocol)) {
    outcome = RunOptimizationCell(config, g, seed);
  } else if (config.protocol == Protocol::kAlg1 ||
             config.protocol == Protocol::kAlg2) {
    outcome = RunDynamic(config, g, seed);
  } else {
    outcome = RunStatic(config, g, seed);
  }
  if (!outcome.ok()) {
    return absl::Status(outcome.status().code(),
                        absl::StrCat("seed ", seed, ": ",
                                     outcome.status().message()));
  }
  CellResult r;
  r.seed = seed;
  r.recorded_k = outcome->rec.ks;
  r.error = outcome->rec.error;
  r.final_error = r.error.back();
  r.final_gap = outcome->gap;
  for (size_t i = 0; i < r.error.size(); ++i) {
    if (r.error[i] < config.tolerance) {
      r.convergence_k = r.recorded_k[i];
      break;
    }
  }
  ASSIGN_OR_RETURN(r.epsilon_hat, EpsilonHat(config));
  r.attacks = std::move(outcome->attacks);
  r.trajectory_csv = TrajectoryCsv(config, seed, outcome->rec);
  r.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  if (cell_dir.empty()) return r;
  const fs::path dir(cell_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", cell_dir, ": ", ec.message()));
  }
  RETURN_IF_ERROR(WriteAtomically(dir / "trajectory.csv", r.trajectory_csv));
  if (config.record_log) {
    std::ostringstream log;
    log << NdjsonHeader(config, seed);
    outcome->log.WriteNdjson(log);
    RETURN_IF_ERROR(WriteAtomically(dir / "log.ndjson", log.str()));
  }
  if (!config.adversaries.empty()) {
    std::ostringstream attacks;
    attacks << NdjsonHeader(config, seed);
    WriteReportsNdjson(r.attacks, attacks);
    RETURN_IF_ERROR(WriteAtomically(dir / "attacks.ndjson", attacks.str()));
  }
  RETURN_IF_ERROR(WriteAtomically(
      dir / "summary.csv",
      HeaderLine(config, seed) + kSummaryColumns + SummaryRow(config, r)));
  return r;
}

void WriteSummaryCsv(const ExperimentConfig& config,
                     const std::vector<CellResult>& cells, std::ostream& out) {
  out << absl::StrFormat("# privcons %s config_hash=%s seeds=%d\n",
                         kArtifactVersion, config.HashHex(), cells.size());
  out << kSummaryColumns;
  for (const CellResult& r : cells) out << SummaryRow(config, r);
}

absl::StatusOr<RunResult> RunExperiment(const ExperimentConfig& config,
                                        const std::string& output_dir) {
  RunResult result;
  const fs::path root = fs::path(output_dir) / config.name;
  result.directory = root.string();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", root.string(), ": ", ec.message()));
  }

  const size_t n = config.seeds.size();
  std::vector<absl::StatusOr<CellResult>> cells(
      n, absl::UnknownError("not run"));
  size_t workers = config.workers > 0
                       ? static_cast<size_t>(config.workers)
                       : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      const uint64_t seed = config.seeds[i];
      cells[i] = RunCell(config, seed,
                         (root / absl::StrCat("seed-", seed)).string());
    }
  };
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  for (auto& cell : cells) {
    if (!cell.ok()) return cell.status();
    result.cells.push_back(*std::move(cell));
  }
  std::ostringstream summary;
  WriteSummaryCsv(config, result.cells, summary);
  RETURN_IF_ERROR(WriteAtomically(root / "summary.csv", summary.str()));
  RETURN_IF_ERROR(
      WriteAtomically(root / "aggregate.csv", AggregateCsv(config, result.cells)));
  RETURN_IF_ERROR(WriteAtomically(
      root / "config.json",
      absl::StrCat(nlohmann::json::parse(config.canonical).dump(2), "\n")));
  return result;
}

absl::Status CheckComparable(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2) {
    return absl::InvalidArgumentError(
        "compare needs at least two configs (nothing to compare)");
  }
  for (size_t i = 1; i < configs.size(); ++i) {
    if (configs[i].graph_key != configs[0].graph_key) {
      return absl::InvalidArgumentError(absl::StrCat(
          "configs '", configs[0].name, "' and '", configs[i].name,
          "' use different graphs"));
    }
    if (configs[i].problem_key != configs[0].problem_key) {
      return absl::InvalidArgumentError(absl::StrCat(
          "configs '", configs[0].name, "' and '", configs[i].name,
          "' solve different problems (objective, reference or initial "
          "states differ)"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<RunResult>> Compare(
    const std::vector<ExperimentConfig>& configs,
    const std::string& output_dir) {
  RETURN_IF_ERROR(CheckComparable(configs));
  std::vector<RunResult> results;
  std::vector<std::string> hashes;
  for (size_t i = 0; i < configs.size(); ++i) {
    const std::string dir =
        (fs::path(output_dir) / "runs" / absl::StrCat(i + 1)).string();
    ASSIGN_OR_RETURN(RunResult r, RunExperiment(configs[i], dir));
    results.push_back(std::move(r));
    hashes.push_back(configs[i].HashHex());
  }

  const std::string header =
      absl::StrFormat("# privcons %s configs=%s\n", kArtifactVersion,
                      absl::StrJoin(hashes, ","));
  std::string table = header;
  table +=
      "config,protocol,config_hash,seeds,median_final_error,"
      "mean_final_error,stddev_final_error,median_final_gap,mean_final_gap,"
      "median_epsilon_hat\n";
  std::string curves = header;
  curves += "config,protocol,k,median_error,mean_error\n";
  for (size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    const std::vector<CellResult>& cells = results[i].cells;
    std::vector<double> err, gap, eps;
    for (const CellResult& r : cells) {
      err.push_back(r.final_error);
      if (r.final_gap) gap.push_back(*r.final_gap);
      eps.push_back(r.epsilon_hat);
    }
    const Aggregate e = Summarize(err);
    const Aggregate gp = Summarize(gap);
    absl::StrAppend(&table, c.name, ",", ProtocolName(c.protocol), ",",
                    c.HashHex(), ",", cells.size(), ",", Num(e.median), ",",
                    Num(e.mean), ",", Num(e.stddev), ",",
                    gap.empty() ? "" : Num(gp.median), ",",
                    gap.empty() ? "" : Num(gp.mean), ",",
                    Num(Summarize(eps).median), "\n");
    const std::vector<int64_t>& ks = cells.front().recorded_k;
    for (size_t t = 0; t < ks.size(); ++t) {
      std::vector<double> at;
      for (const CellResult& r : cells) at.push_back(r.error[t]);
      const Aggregate a = Summarize(at);
      absl::StrAppend(&curves, c.name, ",", ProtocolName(c.protocol), ",",
                      ks[t], ",", Num(a.median), ",", Num(a.mean), "\n");
    }
  }
  RETURN_IF_ERROR(WriteAtomically(fs::path(output_dir) / "compare.csv", table));
  RETURN_IF_ERROR(
      WriteAtomically(fs::path(output_dir) / "compare_curves.csv", curves));
  return results;
}

absl::StatusOr<TraceVerdict> VerifyTrace(std::string_view golden,
                                         const ExperimentConfig& config,
                                         uint64_t seed) {
  ASSIGN_OR_RETURN(CellResult fresh, RunCell(config, seed, ""));
  auto rows = [](absl::string_view text) {
    std::vector<absl::string_view> out;
    for (absl::string_view line : absl::StrSplit(text, '\n')) {
      if (line.empty() || line[0] == '#' || line == "k,agent,dim,x") continue;
      out.push_back(line);
    }
    return out;
  };
  const std::vector<absl::string_view> want =
      rows(absl::string_view(golden.data(), golden.size()));
  const std::vector<absl::string_view> got = rows(fresh.trajectory_csv);
  if (want.empty()) {
    return absl::InvalidArgumentError("golden trace has no rows");
  }
  TraceVerdict v;
  const size_t n = std::min(want.size(), got.size());
  for (size_t r = 0; r <= n; ++r) {
    if (r < n && want[r] == got[r]) continue;
    if (r == n && want.size() == got.size()) break;
    const absl::string_view row = r < want.size() ? want[r] : got[r];
    const std::vector<absl::string_view> f = absl::StrSplit(row, ',');
    if (f.size() != 4 || !absl::SimpleAtoi(f[0], &v.k) ||
        !absl::SimpleAtoi(f[1], &v.agent)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed trace row: ", row));
    }
    v.detail = r == n ? absl::StrCat("trace lengths differ: golden ",
                                     want.size(), " rows, rerun ", got.size())
                      : absl::StrCat("golden '", want[r], "' vs rerun '",
                                     got[r], "'");
    return v;
  }
  v.match = true;
  v.detail = absl::StrCat(want.size(), " rows identical");
  return v;
}

}  // namespace privconsensus
