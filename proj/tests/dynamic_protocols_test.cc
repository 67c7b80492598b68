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

#include "privconsensus/dynamic_protocols.h"

#include <cmath>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace privconsensus {
namespace {

using ::testing::HasSubstr;

double Norm(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

TEST(ProjectTest, Examples) {
  const ConvexSet ball = *ConvexSet::Ball({0.0, 0.0}, 1.0);
  const std::vector<double> p = ball.Project(std::vector<double>{3.0, 4.0});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  const ConvexSet box2 = *ConvexSet::Box(2, 0.0, 1.0);
  EXPECT_EQ(box2.Project(std::vector<double>{-1.0, 0.5}),
            (std::vector<double>{0.0, 0.5}));
  const ConvexSet box1 = *ConvexSet::Box(1, 0.0, 1.0);
  EXPECT_EQ(box1.Project(std::vector<double>{1.7}), std::vector<double>{1.0});
  const std::vector<double> inside = {0.25, -0.5};
  EXPECT_EQ(ball.Project(inside), inside);
  const ConvexSet half = *ConvexSet::Halfspace({1.0, 1.0}, 1.0);
  const std::vector<double> h = half.Project(std::vector<double>{2.0, 2.0});
  EXPECT_NEAR(h[0], 0.5, 1e-15);
  EXPECT_NEAR(h[1], 0.5, 1e-15);
}

TEST(ProjectTest, ConstructionErrors) {
  EXPECT_FALSE(ConvexSet::Box(2, 1.0, 0.0).ok());
  EXPECT_FALSE(ConvexSet::Box(0, 0.0, 1.0).ok());
  EXPECT_FALSE(ConvexSet::Ball({}, 1.0).ok());
  EXPECT_FALSE(ConvexSet::Ball({0.0}, -1.0).ok());
  EXPECT_FALSE(ConvexSet::Halfspace({0.0, 0.0}, 1.0).ok());
}

std::vector<ConvexSet> TestSets() {
  return {*ConvexSet::Box(3, -0.5, 2.0), *ConvexSet::Ball({1.0, -2.0, 0.5}, 1.3),
          *ConvexSet::Halfspace({0.3, -1.2, 2.0}, 0.7)};
}

std::vector<double> RandomPoint(Rng& rng, int d, double spread) {
  std::vector<double> y(d);
  for (double& v : y) v = rng.Uniform(-spread, spread);
  return y;
}

// Idempotence, nonexpansiveness, membership, plus the variational
// characterization <y - P(y), z - P(y)> <= 0 for points z of the set.
TEST(ProjectPropertyTest, TenThousandPointsPerKind) {
  Rng rng(41);
  for (const ConvexSet& set : TestSets()) {
    for (int trial = 0; trial < 10000; ++trial) {
      const std::vector<double> y = RandomPoint(rng, 3, 6.0);
      const std::vector<double> z = RandomPoint(rng, 3, 6.0);
      const std::vector<double> py = set.Project(y);
      const std::vector<double> pz = set.Project(z);
      ASSERT_TRUE(set.Contains(py)) << set.ToString();
      ASSERT_EQ(set.Project(py), py) << set.ToString();
      ASSERT_LE(Norm(py, pz), Norm(y, z) * (1 + 1e-12) + 1e-12);
      const std::vector<double> w = set.Sample(rng);
      ASSERT_TRUE(set.Contains(w));
      double inner = 0.0;
      for (int c = 0; c < 3; ++c) inner += (y[c] - py[c]) * (w[c] - py[c]);
      ASSERT_LE(inner, 1e-9) << set.ToString();
    }
  }
}

TEST(ReferenceSignalTest, KindsAndAverage) {
  const ReferenceSignal ramp =
      ReferenceSignal::Ramp({{1.0}, {3.0}}, {{0.5}, {-0.5}});
  EXPECT_EQ(ramp.Eval(0, 4), std::vector<double>{3.0});
  EXPECT_EQ(ramp.Average(10), std::vector<double>{2.0});
  const ReferenceSignal sine =
      ReferenceSignal::Sinusoid({{0.0}}, {{2.0}}, 0.5, {{0.0}});
  EXPECT_DOUBLE_EQ(sine.Eval(0, 3)[0], 2.0 * std::sin(1.5));
  const ReferenceSignal table =
      ReferenceSignal::Table({{{1.0}, {2.0}}, {{5.0}, {6.0}}});
  EXPECT_EQ(table.Eval(1, 99), std::vector<double>{6.0});
  EXPECT_FALSE(ReferenceSignal::Ramp({{1.0}}, {{1.0, 2.0}}).Validate().ok());
  EXPECT_FALSE(ReferenceSignal::ConstantScalars({NAN}).Validate().ok());
}

// ---------------------------------------------------------------------------

const Schedule kZero = Schedule::Constant(0.0);

TEST(Alg1Test, SingleAgentTracksReferenceExactly) {
  auto g = *WeightedGraph::Undirected(1, {}, WeightedGraph::ConstantWeight(0.5));
  const ReferenceSignal r =
      ReferenceSignal::Sinusoid({{0.3, -1.0}}, {{2.0, 0.1}}, 0.37, {{0.0, 1.0}});
  const DynamicRun run =
      *RunAlg1(g, r, Schedule::Constant(0.5), Schedule::HarmonicPower(1, 1),
               kZero, {}, 500, 1);
  for (int64_t k = 0; k <= 500; ++k) {
    const std::vector<double> expect = r.Eval(0, k);
    ASSERT_EQ(run.trajectory[k].at(0, 0), expect[0]) << k;
    ASSERT_EQ(run.trajectory[k].at(0, 1), expect[1]) << k;
  }
}

TEST(Alg1Test, IdenticalReferencesStayOnTheSignal) {
  auto g = *CircleGraph(4, 0.5);
  ReferenceSignal::Matrix offset(4, {1.0});
  ReferenceSignal::Matrix slope(4, {0.25});
  const ReferenceSignal r = ReferenceSignal::Ramp(offset, slope);
  const DynamicRun run =
      *RunAlg1(g, r, Schedule::Constant(0.5), Schedule::HarmonicPower(1, 1),
               kZero, {}, 200, 1);
  for (int64_t k = 0; k <= 200; ++k) {
    for (int i = 0; i < 4; ++i) {
      ASSERT_EQ(run.trajectory[k].at(i, 0), r.Eval(i, k)[0]);
    }
    ASSERT_EQ(run.tracking_error[k], 0.0);
  }
}

TEST(Alg1Test, ConstantReferencesApproachTheMean) {
  auto g = *CircleGraph(5, 0.5);
  const ReferenceSignal r = ReferenceSignal::ConstantScalars({1, 4, -2, 8, 3});
  const DynamicRun run =
      *RunAlg1(g, r, Schedule::Constant(0.5),
               Schedule::HarmonicPower(1.0, 1.0, 0.5), kZero, {}, 20000, 1,
               false);
  // forgetting = 1/(1 + k/2) = 2/(k+2); the residual scales with it.
  EXPECT_LT(run.tracking_error[20000], run.tracking_error[200] / 50);
  EXPECT_LT(run.tracking_error[20000], 1e-2);
  double mean = 0.0;
  for (int i = 0; i < 5; ++i) mean += run.trajectory.back().at(i, 0) / 5;
  EXPECT_NEAR(mean, 2.8, 1e-12);
}

TEST(Alg1Test, FastForgettingReachesMeanToHighAccuracy) {
  for (int m : {2, 5, 10}) {
    for (auto g : {*PathGraph(m, 0.5), *CircleGraph(m, 0.5),
                   *CompleteGraph(m, 0.5)}) {
      std::vector<double> refs(m);
      for (int i = 0; i < m; ++i) refs[i] = 3.0 * i - 7.0;
      const DynamicRun run = *RunAlg1(
          g, ReferenceSignal::ConstantScalars(refs),
          Schedule::Constant(1.0 / MaxDegree(g)),
          Schedule::HarmonicPower(1.0, 2.0, 1.0), kZero, {}, 100000, 1, false);
      EXPECT_LT(run.tracking_error.back(), 1e-6) << "m=" << m;
    }
  }
}

TEST(Alg1Test, NoiseIsBroadcastOncePerAgentByDefault) {
  auto g = *CircleGraph(4, 0.5);
  const ReferenceSignal r = ReferenceSignal::ConstantScalars({1, 2, 3, 4});
  const DynamicRun shared =
      *RunAlg1(g, r, Schedule::Constant(0.5), Schedule::HarmonicPower(1, 1),
               Schedule::Constant(1.0), {}, 1, 3);
  ASSERT_EQ(shared.log.size(), 8u);
  std::map<int, double> sent;
  for (const Message& msg : shared.log.messages()) {
    if (sent.count(msg.sender)) {
      EXPECT_EQ(sent[msg.sender], msg.values[0]);
    }
    sent[msg.sender] = msg.values[0];
  }
  NoiseConfig per_edge;
  per_edge.per_edge = true;
  const DynamicRun fresh =
      *RunAlg1(g, r, Schedule::Constant(0.5), Schedule::HarmonicPower(1, 1),
               Schedule::Constant(1.0), per_edge, 1, 3);
  EXPECT_NE(fresh.log.messages()[0].values[0],
            fresh.log.messages()[1].values[0]);
}

TEST(Alg1Test, RejectsDirectedOrAsymmetricGraphs) {
  const ReferenceSignal r = ReferenceSignal::ConstantScalars({1, 2});
  auto directed = *WeightedGraph::Create(2, {{0, 1}, {1, 0}}, true,
                                         WeightedGraph::ConstantWeight(0.5));
  EXPECT_FALSE(RunAlg1(directed, r, Schedule::Constant(0.5),
                       Schedule::Constant(0.5), kZero, {}, 5, 1)
                   .ok());
  auto asym = *WeightedGraph::Undirected(
      2, {{0, 1}}, [](int i, int, int64_t) { return i == 0 ? 0.3 : 0.4; });
  auto status = RunAlg1(asym, r, Schedule::Constant(0.5),
                        Schedule::Constant(0.5), kZero, {}, 5, 1)
                    .status();
  EXPECT_EQ(status.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(status.message()), HasSubstr("symmetric"));
  EXPECT_FALSE(RunAlg1(*CircleGraph(2, 0.5), r, Schedule::Constant(0.0),
                       Schedule::Constant(0.5), kZero, {}, 5, 1)
                   .ok());
}

TEST(Alg1Test, TrackingCsvLayout) {
  const ReferenceSignal r = ReferenceSignal::ConstantScalars({1, 3});
  const DynamicRun run =
      *RunAlg1(*CircleGraph(2, 0.5), r, Schedule::Constant(1.0),
               Schedule::Constant(0.5), kZero, {}, 2, 1);
  std::ostringstream out;
  WriteTrackingCsv(run, r, out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,agent,dim,x,r_bar,abs_err");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 2);
  EXPECT_THAT(csv, HasSubstr("\n0,1,0,3,2,1\n"));
}

// ---------------------------------------------------------------------------

TEST(Alg2Test, LargeDriftClampsToUpperFace) {
  auto g = *CircleGraph(4, 0.5);
  const ConvexSet box = *ConvexSet::Box(1, 0.0, 1.0);
  const DynamicRun run = *RunAlg2(
      g, ReferenceSignal::ConstantScalars({10, 10, 10, 10}),
      Schedule::Constant(0.5), Schedule::HarmonicPower(1.0, 1.0, 1.0), kZero,
      box, {}, 200, 2);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(run.trajectory.back().at(i, 0), 1.0);
}

TEST(Alg2Test, InactiveProjectionGivesConsensus) {
  auto g = *CircleGraph(5, 0.5);
  const ConvexSet ball = *ConvexSet::Ball({0.0}, 1e12);
  AgentStates init = AgentStates::FromScalars({5, -3, 2, 9, 1});
  const DynamicRun run =
      *RunAlg2(g, ReferenceSignal::ConstantScalars({0, 0, 0, 0, 0}),
               Schedule::Constant(0.5), Schedule::Constant(1.0), kZero, ball,
               {}, 2000, 2, false, init);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(run.trajectory.back().at(i, 0), 2.8, 1e-9);
  }
}

TEST(Alg2Test, EveryIterateIsFeasible) {
  auto g = *CircleGraph(5, 0.5);
  ReferenceSignal::Matrix offset(5, std::vector<double>(3));
  Rng rng(43);
  for (auto& row : offset) {
    for (double& v : row) v = rng.Uniform(-5.0, 5.0);
  }
  const ReferenceSignal r = ReferenceSignal::Constant(offset);
  for (const ConvexSet& set : TestSets()) {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const DynamicRun run =
          *RunAlg2(g, r, Schedule::HarmonicPower(0.5, 0.9),
                   Schedule::HarmonicPower(1.0, 1.0),
                   Schedule::PowerGrowth(1.0, 0.01, 0.3), set, {}, 300, seed);
      for (const AgentStates& x : run.trajectory) {
        for (int i = 0; i < 5; ++i) ASSERT_TRUE(set.Contains(x.row(i)));
      }
    }
  }
}

TEST(Alg2Test, Errors) {
  auto g = *CircleGraph(2, 0.5);
  const ReferenceSignal r = ReferenceSignal::ConstantScalars({1, 2});
  EXPECT_FALSE(RunAlg2(g, r, Schedule::Constant(0.5), Schedule::Constant(1.0),
                       kZero, *ConvexSet::Box(2, 0, 1), {}, 5, 1)
                   .ok());
  EXPECT_FALSE(RunAlg2(g, r, Schedule::Constant(0.5), Schedule::Constant(1.0),
                       kZero, *ConvexSet::Box(1, 0, 1), {}, 5, 1, true,
                       AgentStates::FromScalars({0.5, 3.0}))
                   .ok());
}

}  // namespace
}  // namespace privconsensus
