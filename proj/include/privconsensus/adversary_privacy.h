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

#ifndef PRIVCONSENSUS_ADVERSARY_PRIVACY_H_
#define PRIVCONSENSUS_ADVERSARY_PRIVACY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "gmpxx.h"
#include "privconsensus/graph.h"
#include "privconsensus/noise.h"
#include "privconsensus/observation_log.h"
#include "privconsensus/optimization_protocols.h"
#include "privconsensus/paillier.h"
#include "privconsensus/rng.h"
#include "privconsensus/schedule.h"
#include "privconsensus/static_protocols.h"

namespace privconsensus {

// ---------------------------------------------------------------------------
// Adversaries.

// Which messages an adversary gets to read. An honest-but-curious agent sees
// what it sends and receives; an eavesdropper sees traffic on tapped links
// (all links when none are listed). Neither ever reads internal substates or
// secret keys from the view; insider knowledge is passed separately.
class AdversaryView {
 public:
  enum class Kind { kHonestButCurious, kEavesdropper };

  static AdversaryView HonestButCurious(int agent);
  static AdversaryView Eavesdropper(
      std::vector<std::pair<int, int>> tapped_links = {});

  Kind kind() const { return kind_; }
  int agent() const { return agent_; }
  bool taps_all_links() const { return links_.empty(); }

  bool Sees(const Message& m) const;
  ObservationLog Visible(const ObservationLog& log) const;
  std::string ToString() const;

 private:
  Kind kind_ = Kind::kEavesdropper;
  int agent_ = -1;
  std::vector<std::pair<int, int>> links_;  // normalized (min, max)
};

enum class AttackOutcome { kExactRecovery, kAmbiguous, kFailed };
enum class AttackTarget { kInitialValue, kGradientParameter, kReference };

std::string OutcomeName(AttackOutcome outcome);
std::string TargetName(AttackTarget target);

struct AttackReport {
  std::string attack;
  std::string adversary;
  AttackTarget target = AttackTarget::kInitialValue;
  AttackOutcome outcome = AttackOutcome::kFailed;
  std::vector<int> target_agents;
  // One entry per target agent; set only where the value is pinned down.
  std::vector<std::optional<double>> recovered;
  // Dimension of the set of target vectors consistent with the view.
  int ambiguity_dimension = 0;
  int unknowns = 0;
  int equations = 0;
  int nullity = 0;
  double residual = 0.0;
  std::string diagnostic;

  std::string ToJson() const;  // one line
};

void WriteReportsNdjson(const std::vector<AttackReport>& reports,
                        std::ostream& out);

// Checks every recovered value against ground truth. A mismatch beyond
// `tolerance` clears that value and turns an exact recovery into a failure.
AttackReport ReconcileWithTruth(AttackReport report,
                                const std::vector<double>& truth,
                                double tolerance = 1e-6);

struct AttackOptions {
  // Rounds of the log used to build the system.
  int64_t horizon = 30;
  int coordinate = 0;
  // Agents to attack; empty means every agent other than the attacker.
  std::vector<int> targets;
  double rank_tolerance = 1e-9;
};

// Plain consensus with public weights and stepsize.
absl::StatusOr<AttackReport> AttackPlainConsensus(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon, const AttackOptions& options = {});

// What an honest-but-curious agent holds in a state-decomposition run.
struct DecomposedInsider {
  std::vector<double> alpha;             // own x^alpha[k]
  std::vector<double> beta;              // own x^beta[k]
  std::vector<double> internal_weights;  // own a[k]
};
DecomposedInsider InsiderOf(const DecomposedRun& run, int agent);

absl::StatusOr<AttackReport> AttackDecomposed(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon,
    const std::optional<DecomposedInsider>& insider = std::nullopt,
    std::optional<double> public_internal_weight = std::nullopt,
    const AttackOptions& options = {});

// What an honest-but-curious agent holds in a secure-edge run.
struct SecureInsider {
  const PaillierKeyPair* key = nullptr;
  const SecureAgentView* view = nullptr;
  int frac_bits = FixedPointCodec::kDefaultFracBits;
  // Negative control: leaked[k][j] = a_{j->i}[k], the neighbors' factors.
  std::optional<std::vector<std::map<int, double>>> leaked_factors;
};
SecureInsider InsiderOf(const SecureEdgeRun& run, int agent);

absl::StatusOr<AttackReport> AttackSecureEdge(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, double epsilon,
    const std::optional<SecureInsider>& insider = std::nullopt,
    const AttackOptions& options = {});

// Recovers the anchors p_j of quadratic objectives weight/2 |x - p_j|^2 from
// Algorithm 3 or DGD traffic. Schedules and weights are public; a message
// counts as noise-free exactly when nu^k == 0.
struct OptimizationInsider {
  int agent = -1;
  std::vector<double> states;  // own x_i^k
  double anchor = 0.0;         // own p_i
};

absl::StatusOr<AttackReport> AttackAnchors(
    const AdversaryView& view, const ObservationLog& log,
    const WeightedGraph& g, Optimizer optimizer,
    const SchedulePreset& schedules, const NoiseConfig& noise,
    double anchor_weight,
    const std::optional<OptimizationInsider>& insider = std::nullopt,
    const AttackOptions& options = {});

// ---------------------------------------------------------------------------
// Budget accounting: eps_hat(K) = sum_{k<K} s_k / nu_k (Laplace mechanism,
// basic sequential composition). An upper bound, not a tight analysis.

class PrivacyLedger {
 public:
  struct Entry {
    int64_t k;
    double sensitivity;
    double noise_scale;
    double summand;     // s_k / nu_k, +inf when nu_k = 0 < s_k
    double cumulative;  // eps_hat(k + 1), rounded toward zero
  };

  // Requires s >= 0 and nu >= 0.
  absl::Status Append(double sensitivity, double noise_scale);

  const std::vector<Entry>& entries() const { return entries_; }
  int64_t size() const { return static_cast<int64_t>(entries_.size()); }
  bool infinite() const { return infinite_; }
  // First k with nu_k = 0 < s_k, or -1.
  int64_t infinite_from() const { return infinite_from_; }
  double Total() const;
  // The exact sum of the (rounded) summands.
  mpq_class ExactTotal() const;

 private:
  std::vector<Entry> entries_;
  // Sum of summands scaled by 2^kFixedShift; every finite double is an
  // integer multiple of 2^-1074, so this is exact.
  mpz_class fixed_sum_ = 0;
  bool infinite_ = false;
  int64_t infinite_from_ = -1;
};

using SensitivityFn = std::function<double(int64_t k)>;

// s_k = delta_adj.
SensitivityFn ConstantSensitivity(double delta_adj = 1.0);
// s_k = delta_adj * gamma^k.
SensitivityFn AttenuatedSensitivity(const Schedule& weakening,
                                    double delta_adj = 1.0);

absl::StatusOr<PrivacyLedger> DpBudget(const Schedule& noise,
                                       const SensitivityFn& sensitivity,
                                       int64_t horizon);
// Appends rounds k = ledger.size() .. ledger.size() + steps - 1.
absl::Status ExtendBudget(PrivacyLedger& ledger, const Schedule& noise,
                          const SensitivityFn& sensitivity, int64_t steps);

// ---------------------------------------------------------------------------
// Empirical differential-privacy check.

// Produces one observation per trial from the given initial states.
using ObservationRunner = std::function<absl::StatusOr<std::vector<double>>(
    const std::vector<double>& init, Rng& rng)>;

struct ObservationPredicate {
  std::string id;
  std::function<bool(const std::vector<double>&)> holds;
};

// Bins of `width` on [lo, hi) over observation[coordinate], plus the two
// tails.
std::vector<ObservationPredicate> BinPredicates(int coordinate, double lo,
                                                double hi, double width);

struct PredicateEstimate {
  std::string id;
  int64_t count_p = 0;
  int64_t count_p_prime = 0;
  double p_hat = 0.0;
  double p_prime_hat = 0.0;
  double log_ratio = 0.0;  // ln(p_hat / p_prime_hat); +-inf on a zero side
  double ci_lo = 0.0;      // simultaneous Wilson bounds on the log-ratio
  double ci_hi = 0.0;
  bool skipped = false;    // both counts zero
};

struct DpCheckReport {
  int64_t trials = 0;
  double claimed_epsilon = 0.0;
  double confidence = 0.0;
  std::vector<PredicateEstimate> predicates;
  // Predicate with the largest |log-ratio| and that estimate's interval.
  std::string max_predicate;
  double max_abs_log_ratio = 0.0;
  double max_ci_lo = 0.0;
  double max_ci_hi = 0.0;
  // Largest lower confidence bound on |log-ratio| over all predicates.
  double max_abs_lower_bound = 0.0;
  bool violation = false;
  std::vector<std::string> diagnostics;

  void WriteCsv(std::ostream& out) const;
};

// Wilson score interval for a binomial proportion.
std::pair<double, double> WilsonInterval(int64_t successes, int64_t trials,
                                         double z);

absl::StatusOr<DpCheckReport> EmpiricalDpCheck(
    const ObservationRunner& runner, const std::vector<double>& p,
    const std::vector<double>& p_prime,
    const std::vector<ObservationPredicate>& predicates, int64_t trials,
    double claimed_epsilon, uint64_t seed, double confidence = 0.99);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_ADVERSARY_PRIVACY_H_
