/*
 * Copyright 2026 The prefshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PREFSHAP_ALIGNMENT_H_
#define PREFSHAP_ALIGNMENT_H_

#include <vector>

#include "prefshap/grid.h"
#include "prefshap/optimize.h"
#include "prefshap/policy.h"
#include "prefshap/reward.h"

namespace prefshap {

struct AlignmentConfig {
  double beta = 0.1;  // KL regularization strength
  double step_size = 0.5;
  int max_iters = 50000;
  double tol = 1e-8;
  // Ridge on the gauge-fixed implicit reward; same convention as FitBtReward.
  double l2 = kDefaultL2;
  OptimizerMethod method = OptimizerMethod::kNewton;

  // Throws InvalidInputError unless beta > 0, tol > 0, max_iters >= 1,
  // step_size > 0 and l2 >= 0.
  void Validate() const;

  OptimizerSettings optimizer() const {
    return {method, step_size, max_iters, tol};
  }

  friend bool operator==(const AlignmentConfig&,
                         const AlignmentConfig&) = default;
};

// Maximizer of E[r] - beta * KL(pi || reference): log pi = r / beta +
// log reference, renormalized per prompt.
Policy ExactAlignedPolicy(const Policy& reference, const RewardTable& reward,
                          double beta);

// Same with the summed reward of a coalition. The sum is taken in a canonical
// order (tables sorted by content), so any permutation of `rewards` gives a
// bitwise-identical policy. An empty list returns the reference.
Policy ExactCoalitionPolicy(const Policy& reference,
                            const std::vector<RewardTable>& rewards,
                            double beta);

// sum_i log sigmoid(beta * (log pi/pi_ref (y+) - log pi/pi_ref (y-))).
// DomainError when either policy has zero mass on a referenced response.
double DpoObjective(const Policy& policy, const Policy& reference,
                    const PreferenceDataset& data, double beta);

// DpoObjective of softmax(logits) minus (l2 / 2) * ||implicit reward||^2,
// where the implicit reward is beta * (log pi - log pi_ref) gauge-fixed.
// Writes the analytic gradient with respect to the logits into `grad` when it
// is non-null. The reference must have full support.
double DpoObjectiveFromLogits(const Grid& logits, const Policy& reference,
                              const PreferenceDataset& data, double beta,
                              double l2, Grid* grad = nullptr);

struct DpoFitResult {
  Policy policy;
  int iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;
};

// Maximizes DpoObjectiveFromLogits over per-(prompt, response) logits,
// starting at the reference. Throws InvalidInputError for empty data,
// DomainError when the reference lacks full support and ConvergenceError when
// the gradient norm stays above config.tol.
DpoFitResult DpoFitWithDiagnostics(const Policy& reference,
                                   const PreferenceDataset& data,
                                   const AlignmentConfig& config);

Policy DpoFit(const Policy& reference, const PreferenceDataset& data,
              const AlignmentConfig& config);

// Chains DpoFit over `datasets` in order, each step using the previous
// output as its reference, and returns the policy after the last dataset.
// Convergence errors are rethrown with the failing step index.
Policy SequentialDpo(const Policy& reference,
                     const std::vector<PreferenceDataset>& datasets,
                     const AlignmentConfig& config);

}  // namespace prefshap

#endif  // PREFSHAP_ALIGNMENT_H_
