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

#include "privconsensus/adversary_privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "boost/math/distributions/normal.hpp"
#include "json.hpp"
#include "privconsensus/linear_inference.h"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

using Expr = LinearSystem::Expr;

std::string Label(const char* name, int agent, int64_t k) {
  return absl::StrCat(name, "[", agent, "][", k, "]");
}
std::string Label(const char* name, int a, int b, int64_t k) {
  return absl::StrCat(name, "[", a, "][", b, "][", k, "]");
}
std::string Label(const char* name, int agent) {
  return absl::StrCat(name, "[", agent, "]");
}

absl::StatusOr<std::vector<int>> ResolveTargets(const AdversaryView& view,
                                                const WeightedGraph& g,
                                                const AttackOptions& options) {
  std::vector<int> targets = options.targets;
  if (targets.empty()) {
    for (int j = 0; j < g.node_count(); ++j) {
      if (j != view.agent()) targets.push_back(j);
    }
  }
  for (int t : targets) {
    if (t < 0 || t >= g.node_count()) {
      return absl::InvalidArgumentError(
          absl::StrCat("target agent ", t, " is not a node"));
    }
  }
  if (view.kind() == AdversaryView::Kind::kHonestButCurious &&
      (view.agent() < 0 || view.agent() >= g.node_count())) {
    return absl::InvalidArgumentError(
        absl::StrCat("adversary agent ", view.agent(), " is not a node"));
  }
  return targets;
}

AttackReport StartReport(std::string attack, const AdversaryView& view,
                         AttackTarget target, std::vector<int> agents) {
  AttackReport r;
  r.attack = std::move(attack);
  r.adversary = view.ToString();
  r.target = target;
  r.recovered.assign(agents.size(), std::nullopt);
  r.target_agents = std::move(agents);
  return r;
}

AttackReport Fail(AttackReport r, std::string why) {
  r.outcome = AttackOutcome::kFailed;
  r.diagnostic = std::move(why);
  return r;
}

AttackReport Finish(AttackReport r, const LinearSystem& system,
                    const std::vector<Expr>& targets, double tolerance) {
  const LinearSystem::Solution s = system.Solve(targets, tolerance);
  r.unknowns = s.unknowns;
  r.equations = s.equations;
  r.nullity = s.nullity;
  r.residual = s.residual;
  r.ambiguity_dimension = s.target_dimension;
  bool all = true;
  for (size_t t = 0; t < targets.size(); ++t) {
    if (s.determined[t]) {
      r.recovered[t] = s.values[t];
    } else {
      all = false;
    }
  }
  r.outcome = all ? AttackOutcome::kExactRecovery : AttackOutcome::kAmbiguous;
  if (!all && r.ambiguity_dimension < 1) r.ambiguity_dimension = 1;
  if (!all) {
    r.diagnostic = absl::StrCat(r.ambiguity_dimension,
                                "-dimensional family of target values fits "
                                "the observations");
  }
  return r;
}

ObservationLog OnChannel(const ObservationLog& log, const std::string& channel) {
  return log.Filter([&](const Message& m) { return m.channel == channel; });
}

absl::Status SetObserved(LinearSystem& system, const ObservationLog& seen,
                         const char* name, int coordinate, int64_t max_k) {
  for (const Message& m : seen.messages()) {
    if (m.k > max_k || m.kind != PayloadKind::kPlaintextReal) continue;
    if (coordinate < 0 || coordinate >= static_cast<int>(m.values.size())) {
      return absl::InvalidArgumentError(absl::StrCat(
          "message at k=", m.k, " has no coordinate ", coordinate));
    }
    system.SetKnown(Label(name, m.sender, m.k), m.values[coordinate]);
  }
  return absl::OkStatus();
}

bool HasRoundZero(const ObservationLog& seen) {
  for (const Message& m : seen.messages()) {
    if (m.k == 0) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Views

AdversaryView AdversaryView::HonestButCurious(int agent) {
  AdversaryView v;
  v.kind_ = Kind::kHonestButCurious;
  v.agent_ = agent;
  return v;
}

AdversaryView AdversaryView::Eavesdropper(
    std::vector<std::pair<int, int>> tapped_links) {
  AdversaryView v;
  v.kind_ = Kind::kEavesdropper;
  for (auto& [a, b] : tapped_links) {
    v.links_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(v.links_.begin(), v.links_.end());
  v.links_.erase(std::unique(v.links_.begin(), v.links_.end()), v.links_.end());
  return v;
}

bool AdversaryView::Sees(const Message& m) const {
  if (kind_ == Kind::kHonestButCurious) {
    return m.sender == agent_ || m.receiver == agent_;
  }
  if (links_.empty()) return true;
  const std::pair<int, int> link(std::min(m.sender, m.receiver),
                                 std::max(m.sender, m.receiver));
  return std::binary_search(links_.begin(), links_.end(), link);
}

ObservationLog AdversaryView::Visible(const ObservationLog& log) const {
  return log.Filter([this](const Message& m) { return Sees(m); });
}

std::string AdversaryView::ToString() const {
  if (kind_ == Kind::kHonestButCurious) {
    return absl::StrCat("honest-but-curious(", agent_, ")");
  }
  if (links_.empty()) return "eavesdropper(all)";
  std::vector<std::string> parts;
  for (const auto& [a, b] : links_) parts.push_back(absl::StrCat(a, "-", b));
  return absl::StrCat("eavesdropper(", absl::StrJoin(parts, ","), ")");
}

// ---------------------------------------------------------------------------
// Reports

std::string OutcomeName(AttackOutcome outcome) {
  switch (outcome) {
    case AttackOutcome::kExactRecovery:
      return "exact-recovery";
    case AttackOutcome::kAmbiguous:
      return "ambiguous";
    case AttackOutcome::kFailed:
      return "failed";
  }
  return "?";
}

std::string TargetName(AttackTarget target) {
  switch (target) {
    case AttackTarget::kInitialValue:
      return "initial-value";
    case AttackTarget::kGradientParameter:
      return "gradient-parameter";
    case AttackTarget::kReference:
      return "reference";
  }
  return "?";
}

std::string AttackReport::ToJson() const {
  nlohmann::ordered_json j;
  j["attack"] = attack;
  j["adversary"] = adversary;
  j["target"] = TargetName(target);
  j["outcome"] = OutcomeName(outcome);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t t = 0; t < target_agents.size(); ++t) {
    nlohmann::ordered_json row;
    row["agent"] = target_agents[t];
    if (recovered[t].has_value()) {
      row["recovered"] = *recovered[t];
    } else {
      row["recovered"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  j["targets"] = std::move(rows);
  j["ambiguity_dimension"] = ambiguity_dimension;
  j["unknowns"] = unknowns;
  j["equations"] = equations;
  j["nullity"] = nullity;
  j["residual"] = residual;
  j["diagnostic"] = diagnostic;
  return j.dump();
}

void WriteReportsNdjson(const std::vector<AttackReport>& reports,
                        std::ostream& out) {
  for (const AttackReport& r : reports) out << r.ToJson() << "\n";
}

AttackReport ReconcileWithTruth(AttackReport report,
                                const std::vector<double>& truth,
                                double tolerance) {
  double worst = 0.0;
  int worst_agent = -1;
  for (size_t t = 0; t < report.target_agents.size(); ++t) {
    const int agent = report.target_agents[t];
    if (!report.recovered[t].has_value() || agent < 0 ||
        agent >= static_cast<int>(truth.size())) {
      continue;
    }
    const double err = std::fabs(*report.recovered[t] - truth[agent]);
    if (!(err <= tolerance)) {
      report.recovered[t].reset();
      if (!(err <= worst)) {
        worst = err;
        worst_agent = agent;
      }
    }
  }
  if (worst_agent >= 0) {
    if (report.outcome == AttackOutcome::kExactRecovery) {
      report.outcome = AttackOutcome::kFailed;
    }
    report.diagnostic = absl::StrCat(
        "reconstruction disagrees with ground truth (agent ", worst_agent,
        ", error ", worst, ")");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Attacks

absl::StatusOr<AttackReport> AttackPlainConsensus(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon, const AttackOptions& options) {
  ASSIGN_OR_RETURN(std::vector<int> targets, ResolveTargets(view, g, options));
  AttackReport report = StartReport("plain-consensus", view,
                                    AttackTarget::kInitialValue, targets);
  const ObservationLog seen = OnChannel(view.Visible(log), "state");
  if (seen.empty()) return Fail(std::move(report), "no visible messages");
  if (!HasRoundZero(seen)) {
    return Fail(std::move(report), "log has no round-0 messages");
  }
  const int m = g.node_count();
  const int64_t horizon =
      std::max<int64_t>(1, std::min(seen.MaxIteration() + 1, options.horizon));

  LinearSystem system;
  RETURN_IF_ERROR(
      SetObserved(system, seen, "x", options.coordinate, horizon));
  for (int l = 0; l < m; ++l) {
    for (int64_t k = 0; k < horizon; ++k) {
      Expr row = {{Label("x", l, k + 1), 1.0}, {Label("x", l, k), -1.0}};
      for (int j : g.InNeighbors(l)) {
        const double w = epsilon * g.Weight(l, j, k);
        row.push_back({Label("x", j, k), -w});
        row.push_back({Label("x", l, k), w});
      }
      system.AddEquation(std::move(row));
    }
  }
  std::vector<Expr> goals;
  for (int t : targets) goals.push_back({{Label("x", t, 0), 1.0}});
  return Finish(std::move(report), system, goals, options.rank_tolerance);
}

DecomposedInsider InsiderOf(const DecomposedRun& run, int agent) {
  DecomposedInsider d;
  for (const auto& row : run.alpha) d.alpha.push_back(row[agent]);
  for (const auto& row : run.beta) d.beta.push_back(row[agent]);
  for (const auto& row : run.internal_weights) {
    d.internal_weights.push_back(row[agent]);
  }
  return d;
}

absl::StatusOr<AttackReport> AttackDecomposed(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon,
    const std::optional<DecomposedInsider>& insider,
    std::optional<double> public_internal_weight,
    const AttackOptions& options) {
  ASSIGN_OR_RETURN(std::vector<int> targets, ResolveTargets(view, g, options));
  if (insider.has_value() &&
      view.kind() != AdversaryView::Kind::kHonestButCurious) {
    return absl::InvalidArgumentError(
        "an eavesdropper has no insider knowledge");
  }
  AttackReport report = StartReport("state-decomposition", view,
                                    AttackTarget::kInitialValue, targets);
  const ObservationLog seen = OnChannel(view.Visible(log), "alpha");
  if (seen.empty()) return Fail(std::move(report), "no visible messages");
  const int m = g.node_count();
  const int64_t horizon =
      std::max<int64_t>(1, std::min(seen.MaxIteration() + 1, options.horizon));

  LinearSystem system;
  RETURN_IF_ERROR(
      SetObserved(system, seen, "alpha", options.coordinate, horizon));
  if (insider.has_value()) {
    const int i = view.agent();
    for (int64_t k = 0; k <= horizon; ++k) {
      if (k < static_cast<int64_t>(insider->alpha.size())) {
        system.SetKnown(Label("alpha", i, k), insider->alpha[k]);
      }
      if (k < static_cast<int64_t>(insider->beta.size())) {
        system.SetKnown(Label("beta", i, k), insider->beta[k]);
      }
      if (k < horizon &&
          k < static_cast<int64_t>(insider->internal_weights.size()) &&
          k < static_cast<int64_t>(insider->beta.size())) {
        system.SetKnown(Label("w", i, k),
                        insider->internal_weights[k] *
                            (insider->beta[k] - insider->alpha[k]));
      }
    }
  }
  for (int l = 0; l < m; ++l) {
    for (int64_t k = 0; k < horizon; ++k) {
      // alpha: external coupling plus the hidden term w = a (beta - alpha).
      Expr row = {{Label("alpha", l, k + 1), 1.0},
                  {Label("alpha", l, k), -1.0},
                  {Label("w", l, k), -epsilon}};
      for (int j : g.InNeighbors(l)) {
        const double w = epsilon * g.Weight(l, j, k);
        row.push_back({Label("alpha", j, k), -w});
        row.push_back({Label("alpha", l, k), w});
      }
      system.AddEquation(std::move(row));
      system.AddEquation({{Label("beta", l, k + 1), 1.0},
                          {Label("beta", l, k), -1.0},
                          {Label("w", l, k), epsilon}});
      if (public_internal_weight.has_value()) {
        const double a = *public_internal_weight;
        system.AddEquation({{Label("w", l, k), 1.0},
                            {Label("beta", l, k), -a},
                            {Label("alpha", l, k), a}});
      }
    }
  }
  std::vector<Expr> goals;
  for (int t : targets) {
    goals.push_back({{Label("alpha", t, 0), 0.5}, {Label("beta", t, 0), 0.5}});
  }
  return Finish(std::move(report), system, goals, options.rank_tolerance);
}

SecureInsider InsiderOf(const SecureEdgeRun& run, int agent) {
  SecureInsider s;
  s.key = &run.keys[agent];
  s.view = &run.agent_views[agent];
  return s;
}

absl::StatusOr<AttackReport> AttackSecureEdge(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon,
    const std::optional<SecureInsider>& insider,
    const AttackOptions& options) {
  ASSIGN_OR_RETURN(std::vector<int> targets, ResolveTargets(view, g, options));
  const bool is_hbc = view.kind() == AdversaryView::Kind::kHonestButCurious;
  if (insider.has_value() && !is_hbc) {
    return absl::InvalidArgumentError(
        "an eavesdropper has no insider knowledge");
  }
  AttackReport report = StartReport("secure-edge", view,
                                    AttackTarget::kInitialValue, targets);
  const ObservationLog seen = view.Visible(log);
  if (seen.empty()) return Fail(std::move(report), "no visible messages");
  if (!insider.has_value() || insider->key == nullptr ||
      insider->view == nullptr) {
    for (const Message& msg : seen.messages()) {
      if (msg.kind == PayloadKind::kPlaintextReal) {
        return absl::InvalidArgumentError(
            "secure-edge log carries plaintext messages");
      }
    }
    return Fail(std::move(report),
                "ciphertext-only view: no plaintext equations");
  }

  const int m = g.node_count();
  const int i = view.agent();
  const SecureAgentView& own = *insider->view;
  const FixedPointCodec codec(insider->key->public_key.n, insider->frac_bits);
  const int64_t horizon = std::max<int64_t>(
      1, std::min({seen.MaxIteration() + 1, options.horizon,
                   static_cast<int64_t>(own.states.size()) - 1}));

  // t[{k, j}] = a_{j->i}[k] (x_j[k] - x_i[k]), decrypted by i.
  std::map<std::pair<int64_t, int>, double> terms;
  for (const Message& msg : seen.messages()) {
    if (msg.k >= horizon || msg.channel != "interaction" ||
        msg.receiver != i || msg.key_owner != i) {
      continue;
    }
    ASSIGN_OR_RETURN(Ciphertext c, DeserializeCiphertext(msg.bytes));
    ASSIGN_OR_RETURN(mpz_class v, Decrypt(*insider->key, c));
    terms[{msg.k, msg.sender}] = codec.Decode(v, /*scale_power=*/2);
  }

  LinearSystem system;
  for (int64_t k = 0; k <= horizon; ++k) {
    system.SetKnown(Label("x", i, k), own.states[k]);
  }
  for (int64_t k = 0; k < horizon; ++k) {
    for (int l = 0; l < m; ++l) {
      if (l == i) continue;
      Expr row = {{Label("x", l, k + 1), 1.0}, {Label("x", l, k), -1.0}};
      double rhs = 0.0;
      for (int j : g.InNeighbors(l)) {
        auto t = terms.find({k, l});
        if (j == i && t != terms.end() &&
            k < static_cast<int64_t>(own.own_factors.size()) &&
            own.own_factors[k].count(l) > 0) {
          // l's increment from i is a_{l->i} a_{i->l} (x_i - x_l)
          // = -a_{i->l} t.
          rhs += -epsilon * own.own_factors[k].at(l) * t->second;
        } else {
          row.push_back({Label("z", l, j, k), -epsilon});
          if (j != i && l < j) {
            // Effective weights are symmetric.
            system.AddEquation({{Label("z", l, j, k), 1.0},
                                {Label("z", j, l, k), 1.0}});
          }
        }
      }
      system.AddEquation(std::move(row), rhs);
    }
    if (insider->leaked_factors.has_value() &&
        k < static_cast<int64_t>(insider->leaked_factors->size())) {
      for (const auto& [j, a_ji] : (*insider->leaked_factors)[k]) {
        auto t = terms.find({k, j});
        if (t == terms.end() || a_ji == 0.0) continue;
        system.AddEquation({{Label("x", j, k), 1.0}},
                           own.states[k] + t->second / a_ji);
      }
    }
  }
  std::vector<Expr> goals;
  for (int t : targets) goals.push_back({{Label("x", t, 0), 1.0}});
  return Finish(std::move(report), system, goals, options.rank_tolerance);
}

absl::StatusOr<AttackReport> AttackAnchors(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, Optimizer optimizer,
    const SchedulePreset& schedules, const NoiseConfig& noise,
    double anchor_weight, const std::optional<OptimizationInsider>& insider,
    const AttackOptions& options) {
  ASSIGN_OR_RETURN(std::vector<int> targets, ResolveTargets(view, g, options));
  if (insider.has_value() &&
      (view.kind() != AdversaryView::Kind::kHonestButCurious ||
       insider->agent != view.agent())) {
    return absl::InvalidArgumentError(
        "insider knowledge must belong to the honest-but-curious agent");
  }
  AttackReport report = StartReport("quadratic-anchor", view,
                                    AttackTarget::kGradientParameter, targets);
  const ObservationLog seen = OnChannel(view.Visible(log), "noisy_state");
  if (seen.empty()) return Fail(std::move(report), "no visible messages");
  const int m = g.node_count();
  const int c = options.coordinate;
  const int64_t horizon =
      std::max<int64_t>(1, std::min(seen.MaxIteration() + 1, options.horizon));

  // What l received from j in round k: an observed number or x_j + zeta.
  std::map<std::tuple<int64_t, int, int>, double> observed;
  for (const Message& msg : seen.messages()) {
    if (msg.k >= horizon) continue;
    if (c < 0 || c >= static_cast<int>(msg.values.size())) {
      return absl::InvalidArgumentError(absl::StrCat(
          "message at k=", msg.k, " has no coordinate ", c));
    }
    observed[{msg.k, msg.sender, msg.receiver}] = msg.values[c];
  }
  auto noise_label = [&](int j, int l, int64_t k) {
    return noise.per_edge ? Label("zeta", j, l, k) : Label("zeta", j, k);
  };

  LinearSystem system;
  if (insider.has_value()) {
    for (int64_t k = 0;
         k <= horizon && k < static_cast<int64_t>(insider->states.size());
         ++k) {
      system.SetKnown(Label("x", insider->agent, k), insider->states[k]);
    }
    system.SetKnown(Label("p", insider->agent), insider->anchor);
  }
  for (const auto& [key, y] : observed) {
    const auto& [k, j, l] = key;
    Expr row = {{Label("x", j, k), 1.0}};
    if (schedules.noise.Eval(k) != 0.0) row.push_back({noise_label(j, l, k), 1.0});
    system.AddEquation(std::move(row), y);
  }
  for (int l = 0; l < m; ++l) {
    for (int64_t k = 0; k < horizon; ++k) {
      const double lambda = schedules.stepsize.Eval(k);
      const double mix = optimizer == Optimizer::kAlg3
                             ? schedules.weakening.Eval(k)
                             : 1.0;
      double self = 1.0 - lambda * anchor_weight;
      if (optimizer == Optimizer::kAlg3) {
        for (int j : g.InNeighbors(l)) self -= mix * g.Weight(l, j, k);
      } else {
        double out = 0.0;
        for (int j : g.InNeighbors(l)) out += g.Weight(l, j, k);
        self -= out;
      }
      Expr row = {{Label("x", l, k + 1), 1.0},
                  {Label("x", l, k), -self},
                  {Label("p", l), -lambda * anchor_weight}};
      double rhs = 0.0;
      const bool quiet = schedules.noise.Eval(k) == 0.0;
      for (int j : g.InNeighbors(l)) {
        const double w = mix * g.Weight(l, j, k);
        auto y = observed.find({k, j, l});
        if (y != observed.end()) {
          rhs += w * y->second;
        } else {
          row.push_back({Label("x", j, k), -w});
          if (!quiet) row.push_back({noise_label(j, l, k), -w});
        }
      }
      system.AddEquation(std::move(row), rhs);
    }
  }
  std::vector<Expr> goals;
  for (int t : targets) goals.push_back({{Label("p", t), 1.0}});
  return Finish(std::move(report), system, goals, options.rank_tolerance);
}

// ---------------------------------------------------------------------------
// Budget accounting

namespace {
constexpr int kFixedShift = 1100;

mpz_class ScaledExact(double v) {
  int exp = 0;
  const double mant = std::frexp(v, &exp);  // v = mant * 2^exp
  mpz_class z;
  mpz_set_d(z.get_mpz_t(), std::ldexp(mant, 53));
  const int shift = exp - 53 + kFixedShift;
  if (shift >= 0) {
    z <<= shift;
  } else {
    z >>= -shift;  // unreachable for doubles >= 2^-1074
  }
  return z;
}
}  // namespace

absl::Status PrivacyLedger::Append(double sensitivity, double noise_scale) {
  if (!(sensitivity >= 0.0) || !(noise_scale >= 0.0) ||
      !std::isfinite(sensitivity) || !std::isfinite(noise_scale)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ledger needs finite s >= 0 and nu >= 0; got s=", sensitivity,
        ", nu=", noise_scale, " at k=", entries_.size()));
  }
  Entry e;
  e.k = size();
  e.sensitivity = sensitivity;
  e.noise_scale = noise_scale;
  if (sensitivity == 0.0) {
    e.summand = 0.0;
  } else if (noise_scale == 0.0) {
    e.summand = std::numeric_limits<double>::infinity();
    if (!infinite_) {
      infinite_ = true;
      infinite_from_ = e.k;
    }
  } else {
    e.summand = sensitivity / noise_scale;
  }
  if (std::isfinite(e.summand) && e.summand > 0.0) {
    fixed_sum_ += ScaledExact(e.summand);
  }
  if (infinite_) {
    e.cumulative = std::numeric_limits<double>::infinity();
  } else {
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, fixed_sum_.get_mpz_t());
    e.cumulative = std::ldexp(mant, static_cast<int>(exp) - kFixedShift);
  }
  entries_.push_back(e);
  return absl::OkStatus();
}

double PrivacyLedger::Total() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return entries_.empty() ? 0.0 : entries_.back().cumulative;
}

mpq_class PrivacyLedger::ExactTotal() const {
  mpz_class denom = 1;
  denom <<= kFixedShift;
  mpq_class q(fixed_sum_, denom);
  q.canonicalize();
  return q;
}

SensitivityFn ConstantSensitivity(double delta_adj) {
  return [delta_adj](int64_t) { return delta_adj; };
}

SensitivityFn AttenuatedSensitivity(const Schedule& weakening,
                                    double delta_adj) {
  return [weakening, delta_adj](int64_t k) {
    return delta_adj * weakening.Eval(k);
  };
}

absl::Status ExtendBudget(PrivacyLedger& ledger, const Schedule& noise,
                          const SensitivityFn& sensitivity, int64_t steps) {
  if (steps < 0) return absl::InvalidArgumentError("negative step count");
  const int64_t start = ledger.size();
  for (int64_t k = start; k < start + steps; ++k) {
    RETURN_IF_ERROR(ledger.Append(sensitivity(k), noise.Eval(k)));
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyLedger> DpBudget(const Schedule& noise,
                                       const SensitivityFn& sensitivity,
                                       int64_t horizon) {
  RETURN_IF_ERROR(noise.Validate());
  PrivacyLedger ledger;
  RETURN_IF_ERROR(ExtendBudget(ledger, noise, sensitivity, horizon));
  return ledger;
}

// ---------------------------------------------------------------------------
// Empirical check

std::vector<ObservationPredicate> BinPredicates(int coordinate, double lo,
                                                double hi, double width) {
  std::vector<ObservationPredicate> out;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "obs[%d]<%g", coordinate, lo);
  out.push_back({buf, [=](const std::vector<double>& o) {
                   return o[coordinate] < lo;
                 }});
  const int bins = static_cast<int>(std::llround((hi - lo) / width));
  for (int b = 0; b < bins; ++b) {
    const double a = lo + b * width;
    const double z = b + 1 == bins ? hi : lo + (b + 1) * width;
    std::snprintf(buf, sizeof(buf), "obs[%d] in [%g,%g)", coordinate, a, z);
    out.push_back({buf, [=](const std::vector<double>& o) {
                     return o[coordinate] >= a && o[coordinate] < z;
                   }});
  }
  std::snprintf(buf, sizeof(buf), "obs[%d]>=%g", coordinate, hi);
  out.push_back({buf, [=](const std::vector<double>& o) {
                   return o[coordinate] >= hi;
                 }});
  return out;
}

std::pair<double, double> WilsonInterval(int64_t successes, int64_t trials,
                                         double z) {
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void DpCheckReport::WriteCsv(std::ostream& out) const {
  out << "predicate,p_hat_P,p_hat_P_prime,log_ratio,ci_lo,ci_hi\n";
  char buf[256];
  for (const PredicateEstimate& e : predicates) {
    std::snprintf(buf, sizeof(buf), "\"%s\",%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  e.id.c_str(), e.p_hat, e.p_prime_hat,
                  e.skipped ? NAN : e.log_ratio, e.skipped ? NAN : e.ci_lo,
                  e.skipped ? NAN : e.ci_hi);
    out << buf;
  }
}

absl::StatusOr<DpCheckReport> EmpiricalDpCheck(
    const ObservationRunner& runner, const std::vector<double>& p,
    const std::vector<double>& p_prime,
    const std::vector<ObservationPredicate>& predicates, int64_t trials,
    double claimed_epsilon, uint64_t seed, double confidence) {
  if (trials < 10000) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 1e4 trials, got ", trials));
  }
  if (predicates.empty()) {
    return absl::InvalidArgumentError("no predicates");
  }
  if (p.size() != p_prime.size()) {
    return absl::InvalidArgumentError(
        "adjacent initial states must have the same size");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  const size_t np = predicates.size();
  std::vector<int64_t> count_p(np, 0), count_q(np, 0);
  Rng rng_p(seed, "dp-trials-p");
  Rng rng_q(seed, "dp-trials-p-prime");
  for (int64_t t = 0; t < trials; ++t) {
    ASSIGN_OR_RETURN(std::vector<double> op, runner(p, rng_p));
    ASSIGN_OR_RETURN(std::vector<double> oq, runner(p_prime, rng_q));
    for (size_t s = 0; s < np; ++s) {
      if (predicates[s].holds(op)) ++count_p[s];
      if (predicates[s].holds(oq)) ++count_q[s];
    }
  }

  DpCheckReport report;
  report.trials = trials;
  report.claimed_epsilon = claimed_epsilon;
  report.confidence = confidence;
  // Two proportions per predicate, all covered simultaneously.
  const double alpha = (1.0 - confidence) / (2.0 * np);
  const double z = boost::math::quantile(
      boost::math::complement(boost::math::normal(), alpha / 2.0));
  const double inf = std::numeric_limits<double>::infinity();
  bool have_max = false;
  for (size_t s = 0; s < np; ++s) {
    PredicateEstimate e;
    e.id = predicates[s].id;
    e.count_p = count_p[s];
    e.count_p_prime = count_q[s];
    e.p_hat = static_cast<double>(count_p[s]) / trials;
    e.p_prime_hat = static_cast<double>(count_q[s]) / trials;
    if (count_p[s] == 0 && count_q[s] == 0) {
      e.skipped = true;
      report.diagnostics.push_back(
          absl::StrCat("predicate '", e.id, "' skipped: zero counts"));
      report.predicates.push_back(e);
      continue;
    }
    e.log_ratio = count_p[s] == 0   ? -inf
                  : count_q[s] == 0 ? inf
                                    : std::log(e.p_hat / e.p_prime_hat);
    const auto [p_lo, p_hi] = WilsonInterval(count_p[s], trials, z);
    const auto [q_lo, q_hi] = WilsonInterval(count_q[s], trials, z);
    e.ci_lo = p_lo > 0.0 ? std::log(p_lo / q_hi) : -inf;
    e.ci_hi = q_lo > 0.0 ? std::log(p_hi / q_lo) : inf;
    const double lower = e.ci_lo > 0.0   ? e.ci_lo
                         : e.ci_hi < 0.0 ? -e.ci_hi
                                         : 0.0;
    report.max_abs_lower_bound = std::max(report.max_abs_lower_bound, lower);
    if (!have_max || std::fabs(e.log_ratio) > report.max_abs_log_ratio) {
      have_max = true;
      report.max_predicate = e.id;
      report.max_abs_log_ratio = std::fabs(e.log_ratio);
      report.max_ci_lo = e.ci_lo;
      report.max_ci_hi = e.ci_hi;
    }
    report.predicates.push_back(e);
  }
  report.violation = report.max_abs_lower_bound > claimed_epsilon;
  return report;
}

}  // namespace privconsensus
