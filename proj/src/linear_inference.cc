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

#include "privconsensus/linear_inference.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "Eigen/Dense"

namespace privconsensus {
namespace {

int NumericalRank(const Eigen::VectorXd& singular, double tolerance) {
  if (singular.size() == 0) return 0;
  const double cutoff = tolerance * singular(0);
  int r = 0;
  while (r < singular.size() && singular(r) > cutoff && singular(r) > 0.0) ++r;
  return r;
}

}  // namespace

LinearSystem::Solution LinearSystem::Solve(const std::vector<Expr>& targets,
                                           double tolerance) const {
  std::unordered_map<std::string, int> column;
  auto col = [&](const std::string& label) {
    auto [it, inserted] = column.emplace(label, static_cast<int>(column.size()));
    return it->second;
  };

  // Substitute knowns; drop rows without unknowns.
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  for (const Equation& eq : equations_) {
    std::vector<std::pair<int, double>> row;
    double b = eq.rhs;
    for (const Term& t : eq.terms) {
      auto known = known_.find(t.label);
      if (known != known_.end()) {
        b -= t.coeff * known->second;
      } else if (t.coeff != 0.0) {
        row.emplace_back(col(t.label), t.coeff);
      }
    }
    if (row.empty()) continue;
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  std::vector<std::vector<std::pair<int, double>>> target_rows;
  std::vector<double> target_offset;
  for (const Expr& e : targets) {
    std::vector<std::pair<int, double>> row;
    double offset = 0.0;
    for (const Term& t : e) {
      auto known = known_.find(t.label);
      if (known != known_.end()) {
        offset += t.coeff * known->second;
      } else {
        row.emplace_back(col(t.label), t.coeff);
      }
    }
    target_rows.push_back(std::move(row));
    target_offset.push_back(offset);
  }

  const int n = static_cast<int>(column.size());
  const int e = static_cast<int>(rows.size());
  Solution s;
  s.unknowns = n;
  s.equations = e;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(e, n);
  Eigen::VectorXd b(e);
  for (int r = 0; r < e; ++r) {
    for (const auto& [c, v] : rows[r]) a(r, c) += v;
    b(r) = rhs[r];
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(targets.size(), n);
  for (size_t t = 0; t < targets.size(); ++t) {
    for (const auto& [j, v] : target_rows[t]) c(t, j) += v;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd null_basis = Eigen::MatrixXd::Identity(n, n);
  if (e > 0 && n > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                              Eigen::ComputeFullV);
    s.rank = NumericalRank(svd.singularValues(), tolerance);
    null_basis = svd.matrixV().rightCols(n - s.rank);
    // Minimum-norm solution restricted to the numerical rank.
    const Eigen::VectorXd utb =
        svd.matrixU().leftCols(s.rank).transpose() * b;
    const Eigen::VectorXd scaled =
        utb.cwiseQuotient(svd.singularValues().head(s.rank));
    u = svd.matrixV().leftCols(s.rank) * scaled;
    s.residual = (a * u - b).cwiseAbs().maxCoeff();
  }
  s.nullity = n - s.rank;

  const Eigen::MatrixXd projected = c * null_basis;
  for (size_t t = 0; t < targets.size(); ++t) {
    const double scale = std::max(1.0, c.row(t).norm());
    const bool pinned = s.nullity == 0 ||
                        projected.row(t).norm() <= 1e-7 * scale;
    s.determined.push_back(pinned);
    s.values.push_back(c.row(t).dot(u) + target_offset[t]);
  }
  if (projected.size() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(projected);
    const double largest = svd.singularValues().size() > 0
                               ? svd.singularValues()(0)
                               : 0.0;
    s.target_dimension =
        largest <= 1e-7 ? 0 : NumericalRank(svd.singularValues(), 1e-7);
  }
  return s;
}

}  // namespace privconsensus
