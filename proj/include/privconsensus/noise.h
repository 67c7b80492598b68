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

#ifndef PRIVCONSENSUS_NOISE_H_
#define PRIVCONSENSUS_NOISE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "privconsensus/agent_states.h"
#include "privconsensus/graph.h"
#include "privconsensus/observation_log.h"
#include "privconsensus/rng.h"

namespace privconsensus {

enum class NoiseDistribution { kLaplace, kGaussian };

// How privacy noise is injected into shared states.
struct NoiseConfig {
  NoiseDistribution distribution = NoiseDistribution::kLaplace;
  // false: one draw per agent per iteration, broadcast to every neighbor.
  // true: a fresh draw for every outgoing edge.
  bool per_edge = false;

  // Zero-mean sample whose scale is `scale` (Laplace b, or Gaussian sigma).
  double Draw(Rng& rng, double scale) const {
    return distribution == NoiseDistribution::kLaplace ? rng.Laplace(scale)
                                                       : rng.Gaussian(scale);
  }
};

// One independent noise stream per agent, derived from the run seed.
inline std::vector<Rng> AgentNoiseStreams(uint64_t seed, int agents) {
  std::vector<Rng> rngs;
  rngs.reserve(agents);
  for (int i = 0; i < agents; ++i) rngs.emplace_back(seed, "noise", i);
  return rngs;
}

// Every agent j sends x_j + zeta_j to each out-neighbor. Afterwards
// received[(i * m + j) * d + c] holds coordinate c of what i got from j.
// Messages are appended to `log` under `channel` when it is non-null.
void ExchangeNoisyStates(const WeightedGraph& g, const AgentStates& x,
                         int64_t k, double scale, const NoiseConfig& noise,
                         std::vector<Rng>& agent_rngs,
                         const std::string& channel, ObservationLog* log,
                         std::vector<double>& received);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_NOISE_H_
