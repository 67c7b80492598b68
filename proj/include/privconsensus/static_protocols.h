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

// Static average consensus engines. Every engine runs synchronous
// (Jacobi-style) rounds: all updates of round k read the round-k snapshot.
//
//   x_i[k+1] = x_i[k] + eps * sum_{j in N_i} L_ij[k] (x_j[k] - x_i[k])
//
// with eps in (0, 1/Delta], Delta the maximum neighbor count.

#ifndef PRIVCONSENSUS_STATIC_PROTOCOLS_H_
#define PRIVCONSENSUS_STATIC_PROTOCOLS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privconsensus/agent_states.h"
#include "privconsensus/graph.h"
#include "privconsensus/observation_log.h"
#include "privconsensus/paillier.h"
#include "privconsensus/rng.h"
#include "privconsensus/schedule.h"

namespace privconsensus {

struct ConsensusState {
  AgentStates x;
  int64_t k = 0;
  double epsilon = 0.0;
};

// eps must lie in (0, 1/(Delta + extra_degree)]; any eps > 0 is accepted
// when the (augmented) degree is zero.
absl::Status ValidateStepsize(const WeightedGraph& g, double epsilon,
                              int extra_degree = 0);

// One synchronous round of plain consensus. Each agent j sends its plaintext
// state on every outgoing edge; those messages go to `log` when non-null.
absl::StatusOr<ConsensusState> StepPlain(const ConsensusState& state,
                                         const WeightedGraph& g,
                                         ObservationLog* log = nullptr);

// Trajectory[k] is the state after k rounds; size steps + 1.
struct PlainRun {
  std::vector<AgentStates> trajectory;
  ObservationLog log;
};

absl::StatusOr<PlainRun> RunPlain(const WeightedGraph& g,
                                  const AgentStates& init, double epsilon,
                                  int64_t steps, bool record_log = true);

// ---------------------------------------------------------------------------
// State decomposition.
//
// Agent i holds x_i^alpha and x_i^beta with x_i^alpha[0] + x_i^beta[0] =
// 2 x_i[0]. The run is plain consensus on the augmented graph with nodes
// alpha_i (original links and weights) and beta_i (a single link to alpha_i
// with private weight a_i[k]). Only alpha values are ever transmitted.

struct DecompositionConfig {
  // Internal weights a_i[k] are uniform on [internal_lo, internal_hi], a
  // subinterval of [eta, 1), redrawn each round for k < randomize_steps and
  // held at the last drawn value afterwards.
  double internal_lo = 0.1;
  double internal_hi = 0.9;
  int64_t randomize_steps = 50;
  // alpha_i[0] is uniform on [x_i[0] - split_radius, x_i[0] + split_radius].
  double split_radius = 10.0;
  // Overrides the random split (one value per agent) when set.
  std::optional<std::vector<double>> initial_alpha;
  // Negative control: every internal weight equals this public value.
  std::optional<double> pinned_internal_weight;
  double eta = kDefaultEta;
};

struct DecomposedRun {
  std::vector<std::vector<double>> alpha;  // [k][agent], k = 0..steps
  std::vector<std::vector<double>> beta;   // [k][agent]
  // Ground truth a_i[k] used in round k; [k][agent], k = 0..steps-1.
  std::vector<std::vector<double>> internal_weights;
  ObservationLog log;
};

absl::StatusOr<DecomposedRun> RunDecomposed(const WeightedGraph& g,
                                            const std::vector<double>& init,
                                            double epsilon,
                                            const DecompositionConfig& config,
                                            int64_t steps, uint64_t seed,
                                            bool record_log = true);

// ---------------------------------------------------------------------------
// Weight decomposition over Paillier.
//
// For every link {i, j} and round k, agent i holds a private factor
// a_{i->j}[k] and agent j holds a_{j->i}[k]. To obtain its interaction term
// from j, agent i sends Enc_i(-x_i); j homomorphically adds its encoded x_j
// and scales by its encoded factor, returning Enc_i(a_{j->i} (x_j - x_i));
// i decrypts and multiplies by a_{i->j}. The effective weight is the product
// a_{i->j} a_{j->i}, known to neither agent.

struct SecureEdgeConfig {
  int key_bits = kDefaultKeyBits;
  int frac_bits = FixedPointCodec::kDefaultFracBits;
  // Factors are uniform on [factor_lo, factor_hi] each round, so products lie
  // in [factor_lo^2, factor_hi^2], which must be inside [eta, 1).
  double factor_lo = 0.45;
  double factor_hi = 0.89;
  std::optional<double> pinned_factor;
  double eta = kDefaultEta;
};

// What agent i legitimately holds after a run besides its keys: its own
// states and the factors it applied. own_factors[k][j] = a_{i->j}[k].
struct SecureAgentView {
  std::vector<double> states;                    // x_i[k], k = 0..steps
  std::vector<std::map<int, double>> own_factors;
};

struct SecureEdgeRun {
  std::vector<std::vector<double>> trajectory;  // [k][agent]
  ObservationLog log;                           // ciphertexts only
  std::vector<PaillierKeyPair> keys;            // keys[i] belongs to agent i
  std::vector<SecureAgentView> agent_views;
  // Ground truth effective weights [k][{i, j}] with i < j.
  std::vector<std::map<std::pair<int, int>, double>> effective_weights;
};

absl::StatusOr<SecureEdgeRun> RunSecureEdge(const WeightedGraph& g,
                                            const std::vector<double>& init,
                                            double epsilon,
                                            const SecureEdgeConfig& config,
                                            int64_t steps, uint64_t seed);

// ---------------------------------------------------------------------------
// Differentially-private variant: each agent transmits x_j[k] + Laplace(nu^k)
// with a fresh draw per outgoing edge; receivers use the noisy values.
// agent_rngs[j] is agent j's noise stream.
absl::StatusOr<ConsensusState> StepDpStatic(const ConsensusState& state,
                                            const WeightedGraph& g,
                                            const Schedule& noise,
                                            std::vector<Rng>& agent_rngs,
                                            ObservationLog* log = nullptr);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_STATIC_PROTOCOLS_H_
