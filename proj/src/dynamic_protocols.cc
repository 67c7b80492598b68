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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "absl/strings/str_cat.h"
#include "privconsensus/status_macros.h"

namespace privconsensus {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

bool SameShape(const ReferenceSignal::Matrix& a, int agents, int dim) {
  if (static_cast<int>(a.size()) != agents) return false;
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != dim) return false;
  }
  return true;
}

bool AllFinite(const ReferenceSignal::Matrix& a) {
  for (const auto& row : a) {
    for (double v : row) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

absl::Status CheckSymmetricUndirected(const WeightedGraph& g, int64_t steps) {
  if (g.directed()) {
    return absl::InvalidArgumentError(
        "dynamic consensus requires an undirected graph with symmetric "
        "weights");
  }
  const WeightReport report = ValidateWeights(g, kDefaultEta, steps);
  for (const WeightViolation& v : report.violations) {
    if (v.kind == WeightViolation::Kind::kAsymmetric) {
      return absl::InvalidArgumentError(
          absl::StrCat("weights must be symmetric: ", v.ToString()));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckPositive(const char* name, double v, int64_t k) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive, got ", v, " at k=", k));
  }
  return absl::OkStatus();
}

absl::Status CheckReference(const WeightedGraph& g,
                            const ReferenceSignal& reference) {
  RETURN_IF_ERROR(reference.Validate());
  if (reference.agents() != g.node_count()) {
    return absl::InvalidArgumentError(
        absl::StrCat("reference has ", reference.agents(),
                     " agents but the graph has ", g.node_count(), " nodes"));
  }
  return absl::OkStatus();
}

double TrackingError(const AgentStates& x, const std::vector<double>& rbar) {
  double worst = 0.0;
  for (int i = 0; i < x.agents(); ++i) {
    worst = std::max(worst, Distance(x.row(i), rbar));
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// ReferenceSignal

ReferenceSignal ReferenceSignal::Constant(Matrix offset) {
  ReferenceSignal r;
  r.kind_ = Kind::kConstant;
  r.agents_ = static_cast<int>(offset.size());
  r.dim_ = offset.empty() ? 0 : static_cast<int>(offset[0].size());
  r.offset_ = std::move(offset);
  return r;
}

ReferenceSignal ReferenceSignal::Ramp(Matrix offset, Matrix slope) {
  ReferenceSignal r = Constant(std::move(offset));
  r.kind_ = Kind::kRamp;
  r.slope_ = std::move(slope);
  return r;
}

ReferenceSignal ReferenceSignal::Sinusoid(Matrix offset, Matrix amplitude,
                                          double frequency, Matrix phase) {
  ReferenceSignal r = Constant(std::move(offset));
  r.kind_ = Kind::kSinusoid;
  r.amplitude_ = std::move(amplitude);
  r.frequency_ = frequency;
  r.phase_ = std::move(phase);
  return r;
}

ReferenceSignal ReferenceSignal::Table(std::vector<Matrix> rows) {
  ReferenceSignal r;
  r.kind_ = Kind::kTable;
  if (!rows.empty()) {
    r.agents_ = static_cast<int>(rows[0].size());
    r.dim_ = rows[0].empty() ? 0 : static_cast<int>(rows[0][0].size());
  }
  r.table_ = std::move(rows);
  return r;
}

ReferenceSignal ReferenceSignal::ConstantScalars(
    const std::vector<double>& values) {
  Matrix offset;
  for (double v : values) offset.push_back({v});
  return Constant(std::move(offset));
}

std::vector<double> ReferenceSignal::Eval(int agent, int64_t k) const {
  if (kind_ == Kind::kTable) {
    const size_t row = std::min<size_t>(static_cast<size_t>(k),
                                        table_.size() - 1);
    return table_[row][agent];
  }
  std::vector<double> out = offset_[agent];
  const double kk = static_cast<double>(k);
  for (int c = 0; c < dim_; ++c) {
    if (kind_ == Kind::kRamp) out[c] += slope_[agent][c] * kk;
    if (kind_ == Kind::kSinusoid) {
      out[c] += amplitude_[agent][c] *
                std::sin(frequency_ * kk + phase_[agent][c]);
    }
  }
  return out;
}

std::vector<double> ReferenceSignal::Average(int64_t k) const {
  std::vector<double> avg(dim_, 0.0);
  for (int i = 0; i < agents_; ++i) {
    const std::vector<double> r = Eval(i, k);
    for (int c = 0; c < dim_; ++c) avg[c] += r[c];
  }
  for (double& v : avg) v /= agents_;
  return avg;
}

absl::Status ReferenceSignal::Validate() const {
  if (agents_ <= 0 || dim_ <= 0) {
    return absl::InvalidArgumentError("reference needs >= 1 agent and dim");
  }
  auto check = [&](const Matrix& a, const char* what) -> absl::Status {
    if (!SameShape(a, agents_, dim_)) {
      return absl::InvalidArgumentError(
          absl::StrCat("reference ", what, " must be ", agents_, " x ", dim_));
    }
    if (!AllFinite(a)) {
      return absl::InvalidArgumentError(
          absl::StrCat("reference ", what, " has a non-finite entry"));
    }
    return absl::OkStatus();
  };
  switch (kind_) {
    case Kind::kTable:
      if (table_.empty()) {
        return absl::InvalidArgumentError("reference table is empty");
      }
      for (const Matrix& row : table_) RETURN_IF_ERROR(check(row, "table row"));
      return absl::OkStatus();
    case Kind::kRamp:
      RETURN_IF_ERROR(check(slope_, "slope"));
      break;
    case Kind::kSinusoid:
      RETURN_IF_ERROR(check(amplitude_, "amplitude"));
      RETURN_IF_ERROR(check(phase_, "phase"));
      if (!std::isfinite(frequency_)) {
        return absl::InvalidArgumentError("reference frequency not finite");
      }
      break;
    case Kind::kConstant:
      break;
  }
  return check(offset_, "offset");
}

// ---------------------------------------------------------------------------
// ConvexSet

absl::StatusOr<ConvexSet> ConvexSet::Box(int dim, double lo, double hi) {
  if (dim <= 0 || !(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("box needs dim >= 1 and finite lo <= hi, got dim=", dim,
                     " [", lo, ", ", hi, "]"));
  }
  ConvexSet s;
  s.kind_ = Kind::kBox;
  s.lo_ = lo;
  s.hi_ = hi;
  s.center_.assign(dim, 0.0);
  return s;
}

absl::StatusOr<ConvexSet> ConvexSet::Ball(std::vector<double> center,
                                          double radius) {
  if (center.empty() || !(radius >= 0.0) || !std::isfinite(radius)) {
    return absl::InvalidArgumentError(
        "ball needs a nonempty center and a finite radius >= 0");
  }
  ConvexSet s;
  s.kind_ = Kind::kBall;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

absl::StatusOr<ConvexSet> ConvexSet::Halfspace(std::vector<double> normal,
                                               double offset) {
  double sq = 0.0;
  for (double v : normal) sq += v * v;
  if (normal.empty() || !(sq > 0.0) || !std::isfinite(sq) ||
      !std::isfinite(offset)) {
    return absl::InvalidArgumentError(
        "halfspace needs a finite nonzero normal and finite offset");
  }
  ConvexSet s;
  s.kind_ = Kind::kHalfspace;
  s.center_.assign(normal.size(), 0.0);
  s.normal_ = std::move(normal);
  s.offset_ = offset;
  s.normal_sq_ = sq;
  return s;
}

bool ConvexSet::Contains(std::span<const double> y) const {
  switch (kind_) {
    case Kind::kBox:
      for (double v : y) {
        if (!(v >= lo_ && v <= hi_)) return false;
      }
      return true;
    case Kind::kBall:
      return Distance(y, center_) <= radius_;
    case Kind::kHalfspace:
      return Dot(normal_, y) <= offset_;
  }
  return false;
}

std::vector<double> ConvexSet::Project(std::span<const double> y) const {
  std::vector<double> p(y.begin(), y.end());
  if (Contains(y)) return p;
  switch (kind_) {
    case Kind::kBox:
      for (double& v : p) v = std::clamp(v, lo_, hi_);
      return p;
    case Kind::kBall: {
      const double norm = Distance(y, center_);
      double scale = radius_ / norm;
      // Rounding can leave the scaled point a hair outside; shrink until the
      // exact membership test passes.
      for (int attempt = 0; attempt < 64; ++attempt) {
        for (size_t c = 0; c < p.size(); ++c) {
          p[c] = center_[c] + (y[c] - center_[c]) * scale;
        }
        if (Contains(p)) return p;
        scale *= 1.0 - std::ldexp(1.0, -52 + attempt);
      }
      return center_;
    }
    case Kind::kHalfspace: {
      double t = (Dot(normal_, y) - offset_) / normal_sq_;
      for (int attempt = 0; attempt < 64; ++attempt) {
        for (size_t c = 0; c < p.size(); ++c) p[c] = y[c] - t * normal_[c];
        if (Contains(p)) return p;
        t += std::fabs(t) * std::ldexp(1.0, -52 + attempt) +
             std::numeric_limits<double>::denorm_min();
      }
      return p;
    }
  }
  return p;
}

std::vector<double> ConvexSet::Sample(Rng& rng) const {
  const int d = dim();
  std::vector<double> p(d);
  switch (kind_) {
    case Kind::kBox:
      for (double& v : p) v = rng.Uniform(lo_, hi_);
      return p;
    case Kind::kBall: {
      double norm = 0.0;
      for (double& v : p) {
        v = rng.Gaussian(1.0);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      const double r = std::min(radius_, 1.0) *
                       std::pow(rng.Uniform01(), 1.0 / d);
      for (int c = 0; c < d; ++c) {
        p[c] = center_[c] + (norm > 0.0 ? p[c] / norm * r : 0.0);
      }
      return Project(p);
    }
    case Kind::kHalfspace:
      for (double& v : p) v = rng.Uniform(-1.0, 1.0);
      return Project(p);
  }
  return p;
}

std::string ConvexSet::ToString() const {
  switch (kind_) {
    case Kind::kBox:
      return absl::StrCat("box[", lo_, ", ", hi_, "]^", dim());
    case Kind::kBall:
      return absl::StrCat("ball(dim=", dim(), ", radius=", radius_, ")");
    case Kind::kHalfspace:
      return absl::StrCat("halfspace(dim=", dim(), ", offset=", offset_, ")");
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Algorithms

absl::StatusOr<DynamicRun> RunAlg1(const WeightedGraph& g,
                                   const ReferenceSignal& reference,
                                   const Schedule& weakening,
                                   const Schedule& forgetting,
                                   const Schedule& noise_scale,
                                   const NoiseConfig& noise, int64_t steps,
                                   uint64_t seed, bool record_log) {
  RETURN_IF_ERROR(CheckReference(g, reference));
  RETURN_IF_ERROR(CheckSymmetricUndirected(g, steps));
  const int m = g.node_count();
  const int d = reference.dim();

  DynamicRun run;
  AgentStates x(m, d);
  for (int i = 0; i < m; ++i) {
    const std::vector<double> r0 = reference.Eval(i, 0);
    std::copy(r0.begin(), r0.end(), x.row(i).begin());
  }
  run.trajectory.push_back(x);
  run.tracking_error.push_back(TrackingError(x, reference.Average(0)));

  std::vector<Rng> rngs = AgentNoiseStreams(seed, m);
  std::vector<double> received;
  for (int64_t k = 0; k < steps; ++k) {
    const double chi = weakening.Eval(k);
    const double alpha = forgetting.Eval(k);
    RETURN_IF_ERROR(CheckPositive("weakening factor", chi, k));
    RETURN_IF_ERROR(CheckPositive("forgetting stepsize", alpha, k));
    ExchangeNoisyStates(g, x, k, noise_scale.Eval(k), noise, rngs,
                        "noisy_state", record_log ? &run.log : nullptr,
                        received);
    AgentStates next(m, d);
    for (int i = 0; i < m; ++i) {
      const std::vector<double> r_now = reference.Eval(i, k);
      const std::vector<double> r_next = reference.Eval(i, k + 1);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j : g.InNeighbors(i)) {
          const double xj = received[(static_cast<size_t>(i) * m + j) * d + c];
          acc += g.Weight(i, j, k) * (xj - x.at(i, c));
        }
        // Grouped so that x = r with no coupling reproduces r exactly.
        next.at(i, c) =
            r_next[c] + ((1.0 - alpha) * (x.at(i, c) - r_now[c]) + chi * acc);
      }
    }
    x = std::move(next);
    run.trajectory.push_back(x);
    run.tracking_error.push_back(TrackingError(x, reference.Average(k + 1)));
  }
  return run;
}

absl::StatusOr<DynamicRun> RunAlg2(const WeightedGraph& g,
                                   const ReferenceSignal& reference,
                                   const Schedule& weakening,
                                   const Schedule& input_gain,
                                   const Schedule& noise_scale,
                                   const ConvexSet& set,
                                   const NoiseConfig& noise, int64_t steps,
                                   uint64_t seed, bool record_log,
                                   std::optional<AgentStates> init) {
  RETURN_IF_ERROR(CheckReference(g, reference));
  RETURN_IF_ERROR(CheckSymmetricUndirected(g, steps));
  const int m = g.node_count();
  const int d = reference.dim();
  if (set.dim() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("constraint set has dimension ", set.dim(),
                     " but the reference has ", d));
  }

  DynamicRun run;
  AgentStates x(m, d);
  if (init.has_value()) {
    if (init->agents() != m || init->dim() != d) {
      return absl::InvalidArgumentError("initial states have the wrong shape");
    }
    for (int i = 0; i < m; ++i) {
      if (!set.Contains(init->row(i))) {
        return absl::InvalidArgumentError(absl::StrCat(
            "initial state of agent ", i, " lies outside ", set.ToString()));
      }
    }
    x = *init;
  } else {
    for (int i = 0; i < m; ++i) {
      Rng init_rng(seed, "init", i);
      const std::vector<double> p = set.Sample(init_rng);
      std::copy(p.begin(), p.end(), x.row(i).begin());
    }
  }
  run.trajectory.push_back(x);
  run.tracking_error.push_back(TrackingError(x, reference.Average(0)));

  std::vector<Rng> rngs = AgentNoiseStreams(seed, m);
  std::vector<double> received;
  std::vector<double> y(d);
  for (int64_t k = 0; k < steps; ++k) {
    const double chi = weakening.Eval(k);
    const double gamma = input_gain.Eval(k);
    RETURN_IF_ERROR(CheckPositive("weakening factor", chi, k));
    RETURN_IF_ERROR(CheckPositive("input stepsize", gamma, k));
    ExchangeNoisyStates(g, x, k, noise_scale.Eval(k), noise, rngs,
                        "noisy_state", record_log ? &run.log : nullptr,
                        received);
    AgentStates next(m, d);
    for (int i = 0; i < m; ++i) {
      const std::vector<double> r = reference.Eval(i, k);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j : g.InNeighbors(i)) {
          const double xj = received[(static_cast<size_t>(i) * m + j) * d + c];
          acc += g.Weight(i, j, k) * (xj - x.at(i, c));
        }
        y[c] = x.at(i, c) + chi * acc + gamma * r[c];
      }
      const std::vector<double> p = set.Project(y);
      std::copy(p.begin(), p.end(), next.row(i).begin());
    }
    x = std::move(next);
    run.trajectory.push_back(x);
    run.tracking_error.push_back(TrackingError(x, reference.Average(k + 1)));
  }
  return run;
}

void WriteTrackingCsv(const DynamicRun& run, const ReferenceSignal& reference,
                      std::ostream& out) {
  out << "k,agent,dim,x,r_bar,abs_err\n";
  char buf[160];
  for (size_t k = 0; k < run.trajectory.size(); ++k) {
    const std::vector<double> rbar = reference.Average(k);
    const AgentStates& x = run.trajectory[k];
    for (int i = 0; i < x.agents(); ++i) {
      for (int c = 0; c < x.dim(); ++c) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.17g,%.17g,%.17g\n", k, i,
                      c, x.at(i, c), rbar[c], std::fabs(x.at(i, c) - rbar[c]));
        out << buf;
      }
    }
  }
}

}  // namespace privconsensus
