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

#include "prefshap/reward.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "prefshap/errors.h"

namespace prefshap {
namespace {

constexpr double kGaugeTolerance = 1e-9;

double RowMean(std::span<const double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  return sum / static_cast<double>(row.size());
}

}  // namespace

std::string ToString(Gauge gauge) {
  return gauge == Gauge::kZeroMeanPerPrompt ? "zero_mean_per_prompt" : "raw";
}

Gauge ParseGauge(const std::string& name) {
  if (name == "zero_mean_per_prompt") return Gauge::kZeroMeanPerPrompt;
  if (name == "raw") return Gauge::kRaw;
  throw InvalidInputError("unknown gauge '" + name + "'");
}

RewardTable::RewardTable(WorldPtr world, Grid values, Gauge gauge)
    : world_(std::move(world)), values_(std::move(values)), gauge_(gauge) {
  if (!world_) throw InvalidInputError("reward table needs a world");
  if (values_.rows() != world_->num_prompts() ||
      values_.cols() != world_->num_responses()) {
    throw InvalidInputError("reward table shape does not match the world");
  }
  for (double v : values_.Flat()) {
    if (!std::isfinite(v)) throw InvalidInputError("rewards must be finite");
  }
  if (gauge_ == Gauge::kZeroMeanPerPrompt) {
    for (std::size_t x = 0; x < values_.rows(); ++x) {
      if (std::abs(RowMean(values_.Row(x))) > kGaugeTolerance) {
        throw InvalidInputError("reward row for prompt '" +
                                world_->prompts()[x] +
                                "' is not zero-mean");
      }
    }
  }
}

RewardTable RewardTable::Zero(WorldPtr world) {
  Grid values(world->num_prompts(), world->num_responses(), 0.0);
  return RewardTable(std::move(world), std::move(values),
                     Gauge::kZeroMeanPerPrompt);
}

RewardTable RewardTable::GaugeFixed() const {
  Grid out = values_;
  for (std::size_t x = 0; x < out.rows(); ++x) {
    auto row = out.Row(x);
    const double mean = RowMean(row);
    for (double& v : row) v -= mean;
  }
  return RewardTable(world_, std::move(out), Gauge::kZeroMeanPerPrompt);
}

PreferenceDataset::PreferenceDataset(WorldPtr world, std::string source_id,
                                     std::vector<PreferenceTriple> triples)
    : world_(std::move(world)),
      source_id_(std::move(source_id)),
      triples_(std::move(triples)) {
  if (!world_) throw InvalidInputError("dataset needs a world");
  for (const auto& t : triples_) {
    if (t.prompt >= world_->num_prompts() ||
        t.chosen >= world_->num_responses() ||
        t.rejected >= world_->num_responses()) {
      throw LookupError("preference triple references an index outside the "
                        "world");
    }
    if (t.chosen == t.rejected) {
      throw InvalidInputError("preference triple compares response '" +
                              world_->responses()[t.chosen] +
                              "' with itself");
    }
  }
}

PreferenceDataset PreferenceDataset::FromNames(
    WorldPtr world, std::string source_id,
    const std::vector<NamedTriple>& triples) {
  std::vector<PreferenceTriple> indexed;
  indexed.reserve(triples.size());
  for (const auto& t : triples) {
    indexed.push_back({world->PromptIndex(t.prompt),
                       world->ResponseIndex(t.chosen),
                       world->ResponseIndex(t.rejected)});
  }
  return PreferenceDataset(std::move(world), std::move(source_id),
                           std::move(indexed));
}

std::vector<WeightedPair> AggregatePairs(const PreferenceDataset& data) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> counts;
  for (const auto& t : data.triples()) {
    counts[{t.prompt, t.chosen, t.rejected}] += 1.0;
  }
  std::vector<WeightedPair> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
  }
  return out;
}

double BtLogLikelihood(const RewardTable& reward,
                       const PreferenceDataset& data) {
  if (!SameWorld(reward.world_ptr(), data.world_ptr())) {
    throw InvalidInputError("reward and dataset belong to different worlds");
  }
  double ll = 0.0;
  for (const auto& t : data.triples()) {
    ll += LogSigmoid(reward(t.prompt, t.chosen) - reward(t.prompt, t.rejected));
  }
  return ll;
}

double PrefProb(const RewardTable& reward, std::size_t x, std::size_t y_plus,
                std::size_t y_minus) {
  const double diff = reward(x, y_plus) - reward(x, y_minus);
  // For diff < 0 return 1 - p(diff >= 0 side); 1 - q is exact for q in
  // [0.5, 1], so the complementary pair sums to exactly 1.
  if (diff < 0) return 1.0 - Sigmoid(-diff);
  return Sigmoid(diff);
}

double PrefProb(const RewardTable& reward, const std::string& x,
                const std::string& y_plus, const std::string& y_minus) {
  const World& w = reward.world();
  return PrefProb(reward, w.PromptIndex(x), w.ResponseIndex(y_plus),
                  w.ResponseIndex(y_minus));
}

RewardTable FitBtReward(const PreferenceDataset& data, double l2,
                        const OptimizerSettings& opts) {
  if (data.empty()) {
    throw InvalidInputError("cannot fit a reward on an empty dataset");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw InvalidInputError("l2 must be finite and >= 0");
  }
  const std::size_t rows = data.world().num_prompts();
  const std::size_t cols = data.world().num_responses();
  const std::vector<WeightedPair> pairs = AggregatePairs(data);

  RowBlockObjective objective =
      [&](const Grid& r, Grid* grad,
          std::vector<std::vector<double>>* curvature) {
        double value = 0.0;
        for (double v : r.Flat()) value -= 0.5 * l2 * v * v;
        if (grad) {
          *grad = r;
          for (double& g : grad->Flat()) g *= -l2;
        }
        if (curvature) {
          for (auto& block : *curvature) {
            block.assign(cols * cols, 0.0);
            for (std::size_t i = 0; i < cols; ++i) block[i * cols + i] = l2;
          }
        }
        for (const auto& p : pairs) {
          const double d = r(p.prompt, p.chosen) - r(p.prompt, p.rejected);
          value += p.count * LogSigmoid(d);
          if (grad) {
            const double g = p.count * Sigmoid(-d);
            (*grad)(p.prompt, p.chosen) += g;
            (*grad)(p.prompt, p.rejected) -= g;
          }
          if (curvature) {
            const double s = Sigmoid(d);
            const double h = p.count * s * (1.0 - s);
            auto& block = (*curvature)[p.prompt];
            block[p.chosen * cols + p.chosen] += h;
            block[p.rejected * cols + p.rejected] += h;
            block[p.chosen * cols + p.rejected] -= h;
            block[p.rejected * cols + p.chosen] -= h;
          }
        }
        return value;
      };

  OptimizeResult result =
      MaximizeRowBlocks(objective, Grid(rows, cols, 0.0), opts);
  if (!result.converged) {
    throw ConvergenceError(
        "reward fit for source '" + data.source_id() +
            "' did not converge: gradient norm " +
            std::to_string(result.grad_norm) + " after " +
            std::to_string(result.iterations) + " iterations",
        result.grad_norm, result.iterations);
  }
  return RewardTable(data.world_ptr(), std::move(result.params), Gauge::kRaw)
      .GaugeFixed();
}

RewardTable ImplicitReward(const Policy& policy, const Policy& reference,
                           double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidInputError("beta must be finite and > 0");
  }
  if (!SameWorld(policy.world_ptr(), reference.world_ptr())) {
    throw InvalidInputError("policies belong to different worlds");
  }
  const World& world = policy.world();
  Grid values(world.num_prompts(), world.num_responses());
  for (std::size_t x = 0; x < values.rows(); ++x) {
    for (std::size_t y = 0; y < values.cols(); ++y) {
      const double lp = policy.LogProb(x, y);
      const double lr = reference.LogProb(x, y);
      if (std::isinf(lp) && std::isinf(lr)) {
        values(x, y) = 0.0;
      } else if (std::isinf(lr)) {
        throw DomainError("policy puts mass on response '" +
                          world.responses()[y] + "' for prompt '" +
                          world.prompts()[x] +
                          "' where the reference has none");
      } else if (std::isinf(lp)) {
        throw DomainError("implicit reward is unbounded: policy has zero "
                          "probability on response '" +
                          world.responses()[y] + "' for prompt '" +
                          world.prompts()[x] + "'");
      } else {
        values(x, y) = beta * (lp - lr);
      }
    }
  }
  return RewardTable(policy.world_ptr(), std::move(values), Gauge::kRaw)
      .GaugeFixed();
}

}  // namespace prefshap
