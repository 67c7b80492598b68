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

#ifndef PRIVCONSENSUS_LINEAR_INFERENCE_H_
#define PRIVCONSENSUS_LINEAR_INFERENCE_H_

#include <map>
#include <string>
#include <vector>

namespace privconsensus {

// A linear system over named quantities. Quantities the adversary knows are
// substituted at solve time; everything else is an unknown.
class LinearSystem {
 public:
  struct Term {
    std::string label;
    double coeff;
  };
  using Expr = std::vector<Term>;

  void SetKnown(const std::string& label, double value) {
    known_[label] = value;
  }
  bool IsKnown(const std::string& label) const {
    return known_.count(label) > 0;
  }
  // sum(coeff * quantity) = rhs.
  void AddEquation(Expr terms, double rhs = 0.0) {
    equations_.push_back({std::move(terms), rhs});
  }
  size_t equation_count() const { return equations_.size(); }

  struct Solution {
    int unknowns = 0;
    int equations = 0;   // rows that mention at least one unknown
    int rank = 0;
    int nullity = 0;
    // Rank of the targets restricted to the null space: 0 means every
    // target is pinned down.
    int target_dimension = 0;
    std::vector<bool> determined;   // per target
    std::vector<double> values;     // per target; meaningful if determined
    double residual = 0.0;          // max |A u - b| at the returned solution
  };

  // `tolerance` is relative to the largest singular value.
  Solution Solve(const std::vector<Expr>& targets,
                 double tolerance = 1e-9) const;

 private:
  struct Equation {
    Expr terms;
    double rhs;
  };
  std::map<std::string, double> known_;
  std::vector<Equation> equations_;
};

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_LINEAR_INFERENCE_H_
