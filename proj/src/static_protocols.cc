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

#include "privconsensus/static_protocols.h"

#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

absl::Status CheckDimensions(const WeightedGraph& g, int agents) {
  if (agents != g.node_count()) {
    return absl::InvalidArgumentError(
        absl::StrCat("state has ", agents, " agents but the graph has ",
                     g.node_count(), " nodes"));
  }
  return absl::OkStatus();
}

absl::Status CheckSubrange(const char* what, double lo, double hi,
                           double eta) {
  if (!(lo >= eta && lo <= hi && hi < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " range [", lo, ", ", hi,
                     "] must satisfy eta <= lo <= hi < 1 (eta = ", eta, ")"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateStepsize(const WeightedGraph& g, double epsilon,
                              int extra_degree) {
  const int degree = MaxDegree(g) + extra_degree;
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (degree > 0 && epsilon > 1.0 / degree) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon ", epsilon, " exceeds 1/Delta = 1/", degree));
  }
  return absl::OkStatus();
}

absl::StatusOr<ConsensusState> StepPlain(const ConsensusState& state,
                                         const WeightedGraph& g,
                                         ObservationLog* log) {
  RETURN_IF_ERROR(CheckDimensions(g, state.x.agents()));
  RETURN_IF_ERROR(ValidateStepsize(g, state.epsilon));
  const int m = g.node_count();
  const int d = state.x.dim();
  const int64_t k = state.k;

  if (log != nullptr) {
    for (int j = 0; j < m; ++j) {
      const auto row = state.x.row(j);
      for (int i : g.OutNeighbors(j)) {
        log->AddPlain(k, j, i, "state", {row.begin(), row.end()});
      }
    }
  }

  ConsensusState next = state;
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int j : g.InNeighbors(i)) {
        acc += g.Weight(i, j, k) * (state.x.at(j, c) - state.x.at(i, c));
      }
      next.x.at(i, c) = state.x.at(i, c) + state.epsilon * acc;
    }
  }
  next.k = k + 1;
  return next;
}

absl::StatusOr<PlainRun> RunPlain(const WeightedGraph& g,
                                  const AgentStates& init, double epsilon,
                                  int64_t steps, bool record_log) {
  PlainRun run;
  run.trajectory.reserve(steps + 1);
  ConsensusState state{init, 0, epsilon};
  run.trajectory.push_back(init);
  for (int64_t k = 0; k < steps; ++k) {
    ASSIGN_OR_RETURN(state,
                     StepPlain(state, g, record_log ? &run.log : nullptr));
    run.trajectory.push_back(state.x);
  }
  return run;
}

absl::StatusOr<DecomposedRun> RunDecomposed(const WeightedGraph& g,
                                            const std::vector<double>& init,
                                            double epsilon,
                                            const DecompositionConfig& config,
                                            int64_t steps, uint64_t seed,
                                            bool record_log) {
  const int m = g.node_count();
  RETURN_IF_ERROR(CheckDimensions(g, static_cast<int>(init.size())));
  if (g.directed()) {
    return absl::InvalidArgumentError(
        "state decomposition requires an undirected graph");
  }
  if (!IsConnected(g)) {
    return absl::FailedPreconditionError(
        "state decomposition requires a connected graph to converge");
  }
  RETURN_IF_ERROR(ValidateStepsize(g, epsilon, /*extra_degree=*/1));
  if (config.pinned_internal_weight.has_value()) {
    const double w = *config.pinned_internal_weight;
    RETURN_IF_ERROR(CheckSubrange("pinned internal weight", w, w, config.eta));
  } else {
    RETURN_IF_ERROR(CheckSubrange("internal weight", config.internal_lo,
                                  config.internal_hi, config.eta));
  }
  if (!(config.split_radius >= 0.0)) {
    return absl::InvalidArgumentError("split_radius must be nonnegative");
  }

  if (config.initial_alpha.has_value() &&
      static_cast<int>(config.initial_alpha->size()) != m) {
    return absl::InvalidArgumentError("initial_alpha needs one value per agent");
  }

  DecomposedRun run;
  std::vector<double> alpha(m);
  std::vector<double> beta(m);
  Rng split_rng(seed, "substate-split");
  for (int i = 0; i < m; ++i) {
    const double u = split_rng.Uniform01();
    alpha[i] = config.initial_alpha.has_value()
                   ? (*config.initial_alpha)[i]
                   : init[i] + config.split_radius * (2.0 * u - 1.0);
    beta[i] = 2.0 * init[i] - alpha[i];
  }
  std::vector<Rng> weight_rngs;
  for (int i = 0; i < m; ++i) weight_rngs.emplace_back(seed, "internal", i);

  run.alpha.reserve(steps + 1);
  run.beta.reserve(steps + 1);
  run.internal_weights.reserve(steps);
  run.alpha.push_back(alpha);
  run.beta.push_back(beta);

  std::vector<double> internal(m, 0.0);
  std::vector<double> next_alpha(m);
  std::vector<double> next_beta(m);
  for (int64_t k = 0; k < steps; ++k) {
    if (config.pinned_internal_weight.has_value()) {
      internal.assign(m, *config.pinned_internal_weight);
    } else if (k == 0 || k < config.randomize_steps) {
      for (int i = 0; i < m; ++i) {
        internal[i] =
            weight_rngs[i].Uniform(config.internal_lo, config.internal_hi);
      }
    }
    run.internal_weights.push_back(internal);

    if (record_log) {
      for (int j = 0; j < m; ++j) {
        for (int i : g.OutNeighbors(j)) {
          run.log.AddPlain(k, j, i, "alpha", {alpha[j]});
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j : g.InNeighbors(i)) {
        acc += g.Weight(i, j, k) * (alpha[j] - alpha[i]);
      }
      acc += internal[i] * (beta[i] - alpha[i]);
      next_alpha[i] = alpha[i] + epsilon * acc;
      next_beta[i] = beta[i] + epsilon * internal[i] * (alpha[i] - beta[i]);
    }
    alpha.swap(next_alpha);
    beta.swap(next_beta);
    run.alpha.push_back(alpha);
    run.beta.push_back(beta);
  }
  return run;
}

absl::StatusOr<SecureEdgeRun> RunSecureEdge(const WeightedGraph& g,
                                            const std::vector<double>& init,
                                            double epsilon,
                                            const SecureEdgeConfig& config,
                                            int64_t steps, uint64_t seed) {
  const int m = g.node_count();
  RETURN_IF_ERROR(CheckDimensions(g, static_cast<int>(init.size())));
  if (g.directed()) {
    return absl::InvalidArgumentError(
        "weight decomposition requires an undirected graph");
  }
  RETURN_IF_ERROR(ValidateStepsize(g, epsilon));
  if (config.pinned_factor.has_value()) {
    const double a = *config.pinned_factor;
    if (!(a > 0.0) || !(a * a >= config.eta && a * a < 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "pinned factor ", a, " gives an effective weight outside [eta, 1)"));
    }
  } else if (!(config.factor_lo > 0.0 && config.factor_lo <= config.factor_hi &&
               config.factor_lo * config.factor_lo >= config.eta &&
               config.factor_hi * config.factor_hi < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "factor range [", config.factor_lo, ", ", config.factor_hi,
        "] gives effective weights outside [eta, 1)"));
  }

  SecureEdgeRun run;
  std::vector<FixedPointCodec> codecs;
  std::vector<Rng> crypto_rngs;
  std::vector<Rng> factor_rngs;
  for (int i = 0; i < m; ++i) {
    ASSIGN_OR_RETURN(PaillierKeyPair key,
                     GenerateKeyPair(config.key_bits,
                                     StreamSeed(seed, "paillier-key", i)));
    codecs.emplace_back(key.public_key.n, config.frac_bits);
    run.keys.push_back(std::move(key));
    crypto_rngs.emplace_back(seed, "crypto", i);
    factor_rngs.emplace_back(seed, "factors", i);
  }
  run.agent_views.resize(m);

  std::vector<double> x = init;
  run.trajectory.push_back(x);
  for (int i = 0; i < m; ++i) run.agent_views[i].states.push_back(x[i]);

  for (int64_t k = 0; k < steps; ++k) {
    // Each agent draws its private factor for every neighbor.
    std::vector<std::map<int, double>> factors(m);
    for (int i = 0; i < m; ++i) {
      for (int j : g.InNeighbors(i)) {
        factors[i][j] = config.pinned_factor.has_value()
                            ? *config.pinned_factor
                            : factor_rngs[i].Uniform(config.factor_lo,
                                                     config.factor_hi);
      }
      run.agent_views[i].own_factors.push_back(factors[i]);
    }
    std::map<std::pair<int, int>, double> effective;
    for (const auto& [a, b] : g.SkeletonLinks()) {
      effective[{a, b}] = factors[a][b] * factors[b][a];
    }
    run.effective_weights.push_back(std::move(effective));

    std::vector<double> next = x;
    for (int i = 0; i < m; ++i) {
      const PaillierPublicKey& pk_i = run.keys[i].public_key;
      const FixedPointCodec& codec_i = codecs[i];
      double acc = 0.0;
      for (int j : g.InNeighbors(i)) {
        // Agent i: Enc_i(-x_i) -> j.
        ASSIGN_OR_RETURN(mpz_class neg_xi, codec_i.Encode(-x[i]));
        ASSIGN_OR_RETURN(Ciphertext c_neg, Encrypt(pk_i, neg_xi,
                                                   crypto_rngs[i]));
        run.log.AddCipher(k, i, j, "neg_state", i,
                          SerializeCiphertext(pk_i, c_neg));
        // Agent j: Enc_i(a_{j->i} (x_j - x_i)) -> i.
        ASSIGN_OR_RETURN(mpz_class xj, codec_i.Encode(x[j]));
        ASSIGN_OR_RETURN(Ciphertext c_xj, Encrypt(pk_i, xj, crypto_rngs[j]));
        ASSIGN_OR_RETURN(Ciphertext c_diff, HomAdd(pk_i, c_neg, c_xj));
        ASSIGN_OR_RETURN(mpz_class a_ji, codec_i.Encode(factors[j][i]));
        ASSIGN_OR_RETURN(Ciphertext c_term, HomScale(pk_i, c_diff, a_ji));
        run.log.AddCipher(k, j, i, "interaction", i,
                          SerializeCiphertext(pk_i, c_term));
        // Agent i: decrypt and apply its own factor.
        ASSIGN_OR_RETURN(mpz_class term, Decrypt(run.keys[i], c_term));
        acc += factors[i][j] * codec_i.Decode(term, /*scale_power=*/2);
      }
      next[i] = x[i] + epsilon * acc;
    }
    x.swap(next);
    run.trajectory.push_back(x);
    for (int i = 0; i < m; ++i) run.agent_views[i].states.push_back(x[i]);
  }
  return run;
}

absl::StatusOr<ConsensusState> StepDpStatic(const ConsensusState& state,
                                            const WeightedGraph& g,
                                            const Schedule& noise,
                                            std::vector<Rng>& agent_rngs,
                                            ObservationLog* log) {
  RETURN_IF_ERROR(CheckDimensions(g, state.x.agents()));
  RETURN_IF_ERROR(ValidateStepsize(g, state.epsilon));
  const int m = g.node_count();
  const int d = state.x.dim();
  if (static_cast<int>(agent_rngs.size()) != m) {
    return absl::InvalidArgumentError("need one noise stream per agent");
  }
  const int64_t k = state.k;
  const double scale = noise.Eval(k);

  // received[(i * m + j) * d + c]: noisy x_j as seen by i.
  std::vector<double> received(static_cast<size_t>(m) * m * d, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int i : g.OutNeighbors(j)) {
      std::vector<double> noisy(d);
      for (int c = 0; c < d; ++c) {
        noisy[c] = state.x.at(j, c) + agent_rngs[j].Laplace(scale);
        received[(static_cast<size_t>(i) * m + j) * d + c] = noisy[c];
      }
      if (log != nullptr) log->AddPlain(k, j, i, "noisy_state", noisy);
    }
  }

  ConsensusState next = state;
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int j : g.InNeighbors(i)) {
        const double xj = received[(static_cast<size_t>(i) * m + j) * d + c];
        acc += g.Weight(i, j, k) * (xj - state.x.at(i, c));
      }
      next.x.at(i, c) = state.x.at(i, c) + state.epsilon * acc;
    }
  }
  next.k = k + 1;
  return next;
}

}  // namespace privconsensus
