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

#ifndef PRIVCONSENSUS_SCHEDULE_H_
#define PRIVCONSENSUS_SCHEDULE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privconsensus {

// A nonnegative scalar sequence indexed by iteration k >= 0: stepsizes,
// weakening factors and noise scales. Pure function of k.
class Schedule {
 public:
  enum class Kind {
    kConstant,       // c
    kHarmonicPower,  // c / (1 + rate * k^power)
    kGeometric,      // c * ratio^k
    kPowerGrowth,    // base + coeff * k^power
    kTable,          // values[k], holding the last entry past the end
  };

  static Schedule Constant(double c);
  static Schedule HarmonicPower(double c, double power, double rate = 0.01);
  static Schedule Geometric(double ratio, double c = 1.0);
  static Schedule PowerGrowth(double base, double coeff, double power);
  static Schedule Table(std::vector<double> values);

  Schedule() : Schedule(Constant(0.0)) {}

  double Eval(int64_t k) const;
  double operator()(int64_t k) const { return Eval(k); }

  Kind kind() const { return kind_; }
  // Parameters in declaration order of the factory (c, power, rate), etc.
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& table() const { return table_; }

  // Rejects parameters that can yield negative or non-finite values.
  absl::Status Validate() const;

  // Canonical text form, e.g. "harmonic(c=1,power=0.9,rate=0.01)".
  std::string ToString() const;

 private:
  Schedule(Kind kind, std::vector<double> params, std::vector<double> table)
      : kind_(kind), params_(std::move(params)), table_(std::move(table)) {}

  Kind kind_;
  std::vector<double> params_;
  std::vector<double> table_;
};

struct SchedulePreset {
  Schedule stepsize;   // lambda^k
  Schedule weakening;  // gamma^k
  Schedule noise;      // nu^k
};

// paper-alg3: (1/(1+0.01k), 1/(1+0.01k^0.9), 1+0.01k^0.3)
// paper-pdop: (0.95^k, 1, 0.98^k)
// dgd-plain:  (1/(1+0.01k), 1, dgd_noise)
absl::StatusOr<SchedulePreset> Preset(std::string_view name,
                                      double dgd_noise = 1.0);

std::vector<std::string> PresetNames();

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_SCHEDULE_H_
