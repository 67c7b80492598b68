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


// Dynamic average consensus: agents track the time-varying mean of locally
// sampled reference signals while sharing only noise-obscured states.

#ifndef PRIVCONSENSUS_DYNAMIC_PROTOCOLS_H_
#define PRIVCONSENSUS_DYNAMIC_PROTOCOLS_H_

#include <cstdint>
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

// r_i^k for every agent. Per-agent, per-coordinate parameters give
//   constant:  offset
//   ramp:      offset + slope * k
//   sinusoid:  offset + amplitude * sin(frequency * k + phase)
// and a table holds its last row past the end.
class ReferenceSignal {
 public:
  enum class Kind { kConstant, kRamp, kSinusoid, kTable };
  using Matrix = std::vector<std::vector<double>>;  // [agent][dim]

  static ReferenceSignal Constant(Matrix offset);
  static ReferenceSignal Ramp(Matrix offset, Matrix slope);
  static ReferenceSignal Sinusoid(Matrix offset, Matrix amplitude,
                                  double frequency, Matrix phase);
  static ReferenceSignal Table(std::vector<Matrix> rows);  // [k][agent][dim]

  // Scalar convenience: one value per agent, d = 1.
  static ReferenceSignal ConstantScalars(const std::vector<double>& values);

  Kind kind() const { return kind_; }
  int agents() const { return agents_; }
  int dim() const { return dim_; }

  std::vector<double> Eval(int agent, int64_t k) const;
  std::vector<double> Average(int64_t k) const;
  // Shapes agree and every parameter is finite.
  absl::Status Validate() const;

 private:
  Kind kind_ = Kind::kConstant;
  int agents_ = 0;
  int dim_ = 0;
  Matrix offset_;
  Matrix slope_;
  Matrix amplitude_;
  Matrix phase_;
  double frequency_ = 0.0;
  std::vector<Matrix> table_;
};

// Nonempty closed convex sets with closed-form Euclidean projections.
//   box:       [lo, hi]^d
//   ball:      { y : ||y - center|| <= radius }
//   halfspace: { y : <normal, y> <= offset }
class ConvexSet {
 public:
  enum class Kind { kBox, kBall, kHalfspace };

  static absl::StatusOr<ConvexSet> Box(int dim, double lo, double hi);
  static absl::StatusOr<ConvexSet> Ball(std::vector<double> center,
                                        double radius);
  static absl::StatusOr<ConvexSet> Halfspace(std::vector<double> normal,
                                             double offset);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(center_.size()); }

  // Membership is exact in floating point, and Project always returns a
  // point for which Contains is true, so feasibility checks never need a
  // tolerance.
  bool Contains(std::span<const double> y) const;
  std::vector<double> Project(std::span<const double> y) const;
  // A random point of the set: uniform for boxes and balls (balls are
  // capped at radius 1 around the center), a projected uniform point of
  // [-1, 1]^d for halfspaces.
  std::vector<double> Sample(Rng& rng) const;

  std::string ToString() const;

 private:
  Kind kind_ = Kind::kBox;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> center_;  // ball center; box/halfspace use only size
  double radius_ = 0.0;
  std::vector<double> normal_;
  double offset_ = 0.0;
  double normal_sq_ = 0.0;
};

struct DynamicRun {
  std::vector<AgentStates> trajectory;  // k = 0..steps
  // Tracking error max_i ||x_i^k - rbar^k||, k = 0..steps.
  std::vector<double> tracking_error;
  ObservationLog log;
};

// x_i^{k+1} = (1 - alpha^k) x_i^k
//             + chi^k sum_j L_ij (x_j^k + zeta_j^k - x_i^k)
//             + r_i^{k+1} - (1 - alpha^k) r_i^k,
// started at x_i^0 = r_i^0. Noise draws use the scale nu^k.
absl::StatusOr<DynamicRun> RunAlg1(const WeightedGraph& g,
                                   const ReferenceSignal& reference,
                                   const Schedule& weakening,
                                   const Schedule& forgetting,
                                   const Schedule& noise_scale,
                                   const NoiseConfig& noise, int64_t steps,
                                   uint64_t seed, bool record_log = true);

// x_i^{k+1} = Proj_X[x_i^k + chi^k sum_j L_ij (x_j^k + zeta_j^k - x_i^k)
//                    + gamma^k r_i^k],
// started at random points of X unless `init` is given.
absl::StatusOr<DynamicRun> RunAlg2(
    const WeightedGraph& g, const ReferenceSignal& reference,
    const Schedule& weakening, const Schedule& input_gain,
    const Schedule& noise_scale, const ConvexSet& set,
    const NoiseConfig& noise, int64_t steps, uint64_t seed,
    bool record_log = true, std::optional<AgentStates> init = std::nullopt);

// CSV with header k,agent,dim,x,r_bar,abs_err, one row per (k, agent, dim).
void WriteTrackingCsv(const DynamicRun& run, const ReferenceSignal& reference,
                      std::ostream& out);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_DYNAMIC_PROTOCOLS_H_
