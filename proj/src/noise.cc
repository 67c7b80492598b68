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

#include "privconsensus/noise.h"

namespace privconsensus {

void ExchangeNoisyStates(const WeightedGraph& g, const AgentStates& x,
                         int64_t k, double scale, const NoiseConfig& noise,
                         std::vector<Rng>& agent_rngs,
                         const std::string& channel, ObservationLog* log,
                         std::vector<double>& received) {
  const int m = g.node_count();
  const int d = x.dim();
  received.assign(static_cast<size_t>(m) * m * d, 0.0);
  std::vector<double> message(d);
  for (int j = 0; j < m; ++j) {
    const auto& outs = g.OutNeighbors(j);
    if (outs.empty()) continue;
    if (!noise.per_edge) {
      for (int c = 0; c < d; ++c) {
        message[c] = x.at(j, c) + noise.Draw(agent_rngs[j], scale);
      }
    }
    for (int i : outs) {
      if (noise.per_edge) {
        for (int c = 0; c < d; ++c) {
          message[c] = x.at(j, c) + noise.Draw(agent_rngs[j], scale);
        }
      }
      std::copy(message.begin(), message.end(),
                received.begin() + (static_cast<size_t>(i) * m + j) * d);
      if (log != nullptr) log->AddPlain(k, j, i, channel, message);
    }
  }
}

}  // namespace privconsensus
