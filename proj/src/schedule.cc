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

#include "privconsensus/schedule.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace privconsensus {
namespace {

bool FiniteNonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

Schedule Schedule::Constant(double c) { return {Kind::kConstant, {c}, {}}; }

Schedule Schedule::HarmonicPower(double c, double power, double rate) {
  return {Kind::kHarmonicPower, {c, power, rate}, {}};
}

Schedule Schedule::Geometric(double ratio, double c) {
  return {Kind::kGeometric, {c, ratio}, {}};
}

Schedule Schedule::PowerGrowth(double base, double coeff, double power) {
  return {Kind::kPowerGrowth, {base, coeff, power}, {}};
}

Schedule Schedule::Table(std::vector<double> values) {
  return {Kind::kTable, {}, std::move(values)};
}

double Schedule::Eval(int64_t k) const {
  const double kk = static_cast<double>(k);
  switch (kind_) {
    case Kind::kConstant:
      return params_[0];
    case Kind::kHarmonicPower:
      return params_[0] / (1.0 + params_[2] * std::pow(kk, params_[1]));
    case Kind::kGeometric:
      // Underflows to 0 for very large k.
      return params_[0] * std::pow(params_[1], kk);
    case Kind::kPowerGrowth:
      return params_[0] + params_[1] * std::pow(kk, params_[2]);
    case Kind::kTable:
      if (table_.empty()) return 0.0;
      return k < static_cast<int64_t>(table_.size()) ? table_[k]
                                                      : table_.back();
  }
  return 0.0;
}

absl::Status Schedule::Validate() const {
  for (double p : params_) {
    if (!std::isfinite(p)) {
      return absl::InvalidArgumentError(
          absl::StrCat("schedule ", ToString(), " has a non-finite parameter"));
    }
  }
  bool ok = true;
  switch (kind_) {
    case Kind::kConstant:
      ok = FiniteNonneg(params_[0]);
      break;
    case Kind::kHarmonicPower:
      ok = FiniteNonneg(params_[0]) && params_[1] >= 0 && params_[2] >= 0;
      break;
    case Kind::kGeometric:
      ok = FiniteNonneg(params_[0]) && FiniteNonneg(params_[1]);
      break;
    case Kind::kPowerGrowth:
      ok = FiniteNonneg(params_[0]) && FiniteNonneg(params_[1]) &&
           params_[2] >= 0;
      break;
    case Kind::kTable:
      for (double v : table_) ok = ok && FiniteNonneg(v);
      break;
  }
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("schedule ", ToString(),
                     " can produce negative or non-finite values"));
  }
  return absl::OkStatus();
}

std::string Schedule::ToString() const {
  switch (kind_) {
    case Kind::kConstant:
      return absl::StrCat("constant(c=", params_[0], ")");
    case Kind::kHarmonicPower:
      return absl::StrCat("harmonic(c=", params_[0], ",power=", params_[1],
                          ",rate=", params_[2], ")");
    case Kind::kGeometric:
      return absl::StrCat("geometric(c=", params_[0], ",ratio=", params_[1],
                          ")");
    case Kind::kPowerGrowth:
      return absl::StrCat("growth(base=", params_[0], ",coeff=", params_[1],
                          ",power=", params_[2], ")");
    case Kind::kTable:
      return absl::StrCat("table(", absl::StrJoin(table_, ","), ")");
  }
  return "";
}

absl::StatusOr<SchedulePreset> Preset(std::string_view name,
                                      double dgd_noise) {
  if (name == "paper-alg3") {
    return SchedulePreset{Schedule::HarmonicPower(1.0, 1.0),
                          Schedule::HarmonicPower(1.0, 0.9),
                          Schedule::PowerGrowth(1.0, 0.01, 0.3)};
  }
  if (name == "paper-pdop") {
    return SchedulePreset{Schedule::Geometric(0.95), Schedule::Constant(1.0),
                          Schedule::Geometric(0.98)};
  }
  if (name == "dgd-plain") {
    return SchedulePreset{Schedule::HarmonicPower(1.0, 1.0),
                          Schedule::Constant(1.0),
                          Schedule::Constant(dgd_noise)};
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown schedule preset '", std::string(name),
      "' (expected one of: ", absl::StrJoin(PresetNames(), ", "), ")"));
}

std::vector<std::string> PresetNames() {
  return {"paper-alg3", "paper-pdop", "dgd-plain"};
}

}  // namespace privconsensus
