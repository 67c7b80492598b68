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

#ifndef PRIVCONSENSUS_AGENT_STATES_H_
#define PRIVCONSENSUS_AGENT_STATES_H_

#include <cassert>
#include <span>
#include <vector>

namespace privconsensus {

// Per-agent real vectors of a common dimension, stored row-major.
class AgentStates {
 public:
  AgentStates() = default;
  AgentStates(int agents, int dim, double fill = 0.0)
      : agents_(agents), dim_(dim), data_(static_cast<size_t>(agents) * dim,
                                          fill) {}

  // One scalar per agent (d = 1).
  static AgentStates FromScalars(const std::vector<double>& values) {
    AgentStates s(static_cast<int>(values.size()), 1);
    s.data_ = values;
    return s;
  }

  int agents() const { return agents_; }
  int dim() const { return dim_; }

  std::span<double> row(int i) {
    assert(i >= 0 && i < agents_);
    return {data_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  std::span<const double> row(int i) const {
    assert(i >= 0 && i < agents_);
    return {data_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }

  double& at(int i, int c) { return data_[static_cast<size_t>(i) * dim_ + c]; }
  double at(int i, int c) const {
    return data_[static_cast<size_t>(i) * dim_ + c];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Coordinate-wise mean over agents.
  std::vector<double> Mean() const {
    std::vector<double> mean(dim_, 0.0);
    for (int i = 0; i < agents_; ++i) {
      for (int c = 0; c < dim_; ++c) mean[c] += at(i, c);
    }
    for (double& v : mean) v /= agents_;
    return mean;
  }

  bool operator==(const AgentStates&) const = default;

 private:
  int agents_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_AGENT_STATES_H_
