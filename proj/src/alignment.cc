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

#include "prefshap/alignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefshap/errors.h"

namespace prefshap {
namespace {

void CheckBeta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidInputError("beta must be finite and > 0");
  }
}

void CheckSameWorld(const WorldPtr& a, const WorldPtr& b) {
  if (!SameWorld(a, b)) {
    throw InvalidInputError("arguments belong to different worlds");
  }
}

// Row-wise log-softmax of finite logits.
Grid LogSoftmax(const Grid& logits) {
  Grid out = logits;
  for (std::size_t x = 0; x < out.rows(); ++x) {
    auto row = out.Row(x);
    const double lse = LogSumExp(row);
    for (double& v : row) v -= lse;
  }
  return out;
}

}  // namespace

void AlignmentConfig::Validate() const {
  CheckBeta(beta);
  if (!(tol > 0.0)) throw InvalidInputError("tol must be > 0");
  if (max_iters < 1) throw InvalidInputError("max_iters must be >= 1");
  if (!(step_size > 0.0)) throw InvalidInputError("step_size must be > 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw InvalidInputError("l2 must be finite and >= 0");
  }
}

Policy ExactAlignedPolicy(const Policy& reference, const RewardTable& reward,
                          double beta) {
  CheckBeta(beta);
  CheckSameWorld(reference.world_ptr(), reward.world_ptr());
  Grid scores = reference.log_probs();
  auto flat = scores.Flat();
  const auto r = reward.values().Flat();
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += r[i] / beta;
  return Policy::FromScores(reference.world_ptr(), std::move(scores));
}

Policy ExactCoalitionPolicy(const Policy& reference,
                            const std::vector<RewardTable>& rewards,
                            double beta) {
  CheckBeta(beta);
  if (rewards.empty()) return reference;
  std::vector<const RewardTable*> order;
  for (const auto& r : rewards) {
    CheckSameWorld(reference.world_ptr(), r.world_ptr());
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(),
            [](const RewardTable* a, const RewardTable* b) {
              const auto fa = a->values().Flat();
              const auto fb = b->values().Flat();
              return std::lexicographical_compare(fa.begin(), fa.end(),
                                                  fb.begin(), fb.end());
            });
  Grid total(reference.log_probs().rows(), reference.log_probs().cols(), 0.0);
  auto ft = total.Flat();
  for (const RewardTable* r : order) {
    const auto fr = r->values().Flat();
    for (std::size_t i = 0; i < ft.size(); ++i) ft[i] += fr[i];
  }
  Grid scores = reference.log_probs();
  auto fs = scores.Flat();
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] += ft[i] / beta;
  return Policy::FromScores(reference.world_ptr(), std::move(scores));
}

double DpoObjective(const Policy& policy, const Policy& reference,
                    const PreferenceDataset& data, double beta) {
  CheckBeta(beta);
  CheckSameWorld(policy.world_ptr(), reference.world_ptr());
  CheckSameWorld(policy.world_ptr(), data.world_ptr());
  double total = 0.0;
  for (const auto& t : data.triples()) {
    const double lp_plus = policy.LogProb(t.prompt, t.chosen);
    const double lp_minus = policy.LogProb(t.prompt, t.rejected);
    const double lr_plus = reference.LogProb(t.prompt, t.chosen);
    const double lr_minus = reference.LogProb(t.prompt, t.rejected);
    if (!std::isfinite(lp_plus) || !std::isfinite(lp_minus) ||
        !std::isfinite(lr_plus) || !std::isfinite(lr_minus)) {
      throw DomainError("DPO objective needs full support on every "
                        "preference pair");
    }
    total += LogSigmoid(beta * ((lp_plus - lr_plus) - (lp_minus - lr_minus)));
  }
  return total;
}

namespace {

// Objective of DpoObjectiveFromLogits over pre-aggregated pairs; optionally
// fills the gradient and the negated Hessian blocks.
double DpoLogitObjective(const Grid& logits, const Grid& ref_log_probs,
                         const std::vector<WeightedPair>& pairs, double beta,
                         double l2, Grid* grad,
                         std::vector<std::vector<double>>* curvature) {
  const std::size_t cols = logits.cols();
  const Grid log_probs = LogSoftmax(logits);

  // Gauge-fixed implicit reward.
  Grid reward(logits.rows(), cols);
  for (std::size_t x = 0; x < logits.rows(); ++x) {
    double mean = 0.0;
    for (std::size_t y = 0; y < cols; ++y) {
      reward(x, y) = beta * (log_probs(x, y) - ref_log_probs(x, y));
      mean += reward(x, y);
    }
    mean /= static_cast<double>(cols);
    for (std::size_t y = 0; y < cols; ++y) reward(x, y) -= mean;
  }

  double value = 0.0;
  for (double r : reward.Flat()) value -= 0.5 * l2 * r * r;
  if (grad) {
    // d/dtheta of (l2/2)||G beta (theta - theta_ref)||^2 = l2 * beta * reward.
    *grad = reward;
    for (double& g : grad->Flat()) g *= -l2 * beta;
  }
  if (curvature) {
    const double diag = l2 * beta * beta;
    const double off = diag / static_cast<double>(cols);
    for (auto& block : *curvature) {
      block.assign(cols * cols, -off);
      for (std::size_t i = 0; i < cols; ++i) block[i * cols + i] += diag;
    }
  }
  for (const auto& p : pairs) {
    const double margin =
        beta * ((log_probs(p.prompt, p.chosen) - ref_log_probs(p.prompt, p.chosen)) -
                (log_probs(p.prompt, p.rejected) -
                 ref_log_probs(p.prompt, p.rejected)));
    value += p.count * LogSigmoid(margin);
    // The log-partition terms of chosen and rejected cancel in the margin, so
    // the gradient only touches the two logits of the pair.
    if (grad) {
      const double g = p.count * beta * Sigmoid(-margin);
      (*grad)(p.prompt, p.chosen) += g;
      (*grad)(p.prompt, p.rejected) -= g;
    }
    if (curvature) {
      const double s = Sigmoid(margin);
      const double h = p.count * beta * beta * s * (1.0 - s);
      auto& block = (*curvature)[p.prompt];
      block[p.chosen * cols + p.chosen] += h;
      block[p.rejected * cols + p.rejected] += h;
      block[p.chosen * cols + p.rejected] -= h;
      block[p.rejected * cols + p.chosen] -= h;
    }
  }
  return value;
}

void CheckDpoInputs(const Policy& reference, const PreferenceDataset& data,
                    double beta) {
  CheckBeta(beta);
  CheckSameWorld(reference.world_ptr(), data.world_ptr());
  if (!reference.HasFullSupport()) {
    throw DomainError("DPO needs a reference policy with full support");
  }
}

}  // namespace

double DpoObjectiveFromLogits(const Grid& logits, const Policy& reference,
                              const PreferenceDataset& data, double beta,
                              double l2, Grid* grad) {
  CheckDpoInputs(reference, data, beta);
  if (!logits.SameShape(reference.log_probs())) {
    throw InvalidInputError("logit table shape does not match the world");
  }
  return DpoLogitObjective(logits, reference.log_probs(), AggregatePairs(data),
                           beta, l2, grad, nullptr);
}

DpoFitResult DpoFitWithDiagnostics(const Policy& reference,
                                   const PreferenceDataset& data,
                                   const AlignmentConfig& config) {
  config.Validate();
  if (data.empty()) {
    throw InvalidInputError("DPO needs a non-empty dataset");
  }
  CheckDpoInputs(reference, data, config.beta);
  const std::vector<WeightedPair> pairs = AggregatePairs(data);
  const Grid& ref_log_probs = reference.log_probs();

  RowBlockObjective objective =
      [&](const Grid& logits, Grid* grad,
          std::vector<std::vector<double>>* curvature) {
        return DpoLogitObjective(logits, ref_log_probs, pairs, config.beta,
                                 config.l2, grad, curvature);
      };
  OptimizeResult result =
      MaximizeRowBlocks(objective, ref_log_probs, config.optimizer());
  if (!result.converged) {
    throw ConvergenceError(
        "DPO for source '" + data.source_id() +
            "' did not converge: gradient norm " +
            std::to_string(result.grad_norm) + " after " +
            std::to_string(result.iterations) + " iterations",
        result.grad_norm, result.iterations);
  }
  return {Policy::FromScores(reference.world_ptr(), std::move(result.params)),
          result.iterations, result.grad_norm, result.value};
}

Policy DpoFit(const Policy& reference, const PreferenceDataset& data,
              const AlignmentConfig& config) {
  return DpoFitWithDiagnostics(reference, data, config).policy;
}

Policy SequentialDpo(const Policy& reference,
                     const std::vector<PreferenceDataset>& datasets,
                     const AlignmentConfig& config) {
  Policy current = reference;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    try {
      current = DpoFit(current, datasets[k], config);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("sequential DPO step " + std::to_string(k) + ": " +
                                 e.what(),
                             e.grad_norm(), e.iterations());
    }
  }
  return current;
}

}  // namespace prefshap
