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

#include "gtest/gtest.h"

namespace privconsensus {
namespace {

TEST(ScheduleTest, EvalExamples) {
  const Schedule harmonic = Schedule::HarmonicPower(1.0, 1.0);
  EXPECT_DOUBLE_EQ(harmonic.Eval(0), 1.0);
  EXPECT_DOUBLE_EQ(harmonic.Eval(100), 0.5);
  EXPECT_NEAR(Schedule::Geometric(0.95).Eval(2), 0.9025, 1e-15);
}

TEST(ScheduleTest, GeometricUnderflowsToZero) {
  EXPECT_EQ(Schedule::Geometric(0.95).Eval(int64_t{1} << 40), 0.0);
}

TEST(ScheduleTest, TableHoldsLastValue) {
  const Schedule t = Schedule::Table({3.0, 2.0, 1.0});
  EXPECT_EQ(t.Eval(0), 3.0);
  EXPECT_EQ(t.Eval(2), 1.0);
  EXPECT_EQ(t.Eval(1000), 1.0);
}

TEST(ScheduleTest, ValidateRejectsNegativeParameters) {
  EXPECT_TRUE(Schedule::Constant(0.0).Validate().ok());
  EXPECT_FALSE(Schedule::Constant(-1.0).Validate().ok());
  EXPECT_FALSE(Schedule::Geometric(-0.5).Validate().ok());
  EXPECT_FALSE(Schedule::HarmonicPower(1.0, 1.0, -0.01).Validate().ok());
  EXPECT_FALSE(Schedule::Table({1.0, NAN}).Validate().ok());
}

TEST(PresetTest, PaperValues) {
  const SchedulePreset alg3 = *Preset("paper-alg3");
  EXPECT_DOUBLE_EQ(alg3.noise.Eval(0), 1.0);
  EXPECT_DOUBLE_EQ(alg3.weakening.Eval(0), 1.0);
  EXPECT_DOUBLE_EQ(alg3.stepsize.Eval(0), 1.0);
  EXPECT_NEAR(alg3.noise.Eval(1000), 1.0 + 0.01 * std::pow(1000.0, 0.3),
              1e-15);
  const SchedulePreset pdop = *Preset("paper-pdop");
  EXPECT_DOUBLE_EQ(pdop.stepsize.Eval(1), 0.95);
  EXPECT_DOUBLE_EQ(pdop.noise.Eval(1), 0.98);
  EXPECT_DOUBLE_EQ(pdop.weakening.Eval(12345), 1.0);
  const SchedulePreset dgd = *Preset("dgd-plain", 2.5);
  EXPECT_DOUBLE_EQ(dgd.noise.Eval(77), 2.5);
  EXPECT_DOUBLE_EQ(dgd.stepsize.Eval(100), 0.5);
}

TEST(PresetTest, UnknownNameIsConfigurationError) {
  EXPECT_EQ(Preset("adam").status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(SchedulePropertyTest, DecayingPresetsAreNonincreasing) {
  const std::vector<Schedule> decaying = {
      Preset("paper-alg3")->stepsize, Preset("paper-alg3")->weakening,
      Preset("paper-pdop")->stepsize, Preset("paper-pdop")->noise,
      Schedule::HarmonicPower(2.0, 0.5, 0.3)};
  for (const Schedule& s : decaying) {
    double prev = s.Eval(0);
    for (int64_t k = 1; k <= 100000; k += 7) {
      const double v = s.Eval(k);
      ASSERT_LE(v, prev) << s.ToString() << " at k=" << k;
      ASSERT_GE(v, 0.0);
      prev = v;
    }
  }
}

TEST(SchedulePropertyTest, GeometricIsStrictlyDecreasing) {
  const Schedule s = Schedule::Geometric(0.95);
  for (int64_t k = 0; k < 500; ++k) ASSERT_LT(s.Eval(k + 1), s.Eval(k));
}

// The injected noise gamma^k nu^k vanishes although nu^k grows.
TEST(SchedulePropertyTest, AttenuatedNoiseScaleVanishes) {
  const SchedulePreset p = *Preset("paper-alg3");
  auto product = [&](int64_t k) {
    return p.weakening.Eval(k) * p.noise.Eval(k);
  };
  // Direct formula as an independent check.
  for (int64_t k : {0, 10, 1000, 123456}) {
    const double kk = static_cast<double>(k);
    EXPECT_NEAR(product(k),
                (1 + 0.01 * std::pow(kk, 0.3)) / (1 + 0.01 * std::pow(kk, 0.9)),
                1e-15);
  }
  double prev = product(1000);
  for (int64_t k = 2000; k <= 10000000; k *= 2) {
    const double v = product(k);
    EXPECT_LT(v, prev) << "k=" << k;
    prev = v;
  }
  EXPECT_LT(product(10000000), 0.01);
  EXPECT_GT(p.noise.Eval(10000000), p.noise.Eval(0));
}

}  // namespace
}  // namespace privconsensus
