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

#include "prefshap/world.h"

#include <cmath>

#include "prefshap/errors.h"

namespace prefshap {
namespace {

std::unordered_map<std::string, std::size_t> IndexIds(
    const std::vector<std::string>& ids, const char* kind) {
  if (ids.empty()) {
    throw InvalidInputError(std::string("world has no ") + kind);
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw InvalidInputError(std::string("duplicate ") + kind +
                              " identifier '" + ids[i] + "'");
    }
  }
  return index;
}

}  // namespace

World::World(std::vector<std::string> prompts,
             std::vector<std::string> responses, std::vector<double> eval_dist)
    : prompts_(std::move(prompts)),
      responses_(std::move(responses)),
      eval_dist_(std::move(eval_dist)),
      prompt_index_(IndexIds(prompts_, "prompts")),
      response_index_(IndexIds(responses_, "responses")) {
  if (eval_dist_.size() != prompts_.size()) {
    throw InvalidInputError("eval_dist has " +
                            std::to_string(eval_dist_.size()) +
                            " entries for " + std::to_string(prompts_.size()) +
                            " prompts");
  }
  double total = 0.0;
  for (double p : eval_dist_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidInputError("eval_dist entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInputError("eval_dist sums to " + std::to_string(total) +
                            ", expected 1");
  }
}

std::shared_ptr<const World> World::Uniform(std::vector<std::string> prompts,
                                            std::vector<std::string> responses) {
  std::vector<double> dist(prompts.size(),
                           prompts.empty() ? 0.0 : 1.0 / prompts.size());
  // Push rounding residue into the last entry so the sum is exactly 1.
  if (!dist.empty()) {
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) head += dist[i];
    dist.back() = 1.0 - head;
  }
  return std::make_shared<const World>(std::move(prompts), std::move(responses),
                                       std::move(dist));
}

std::size_t World::PromptIndex(const std::string& id) const {
  auto it = prompt_index_.find(id);
  if (it == prompt_index_.end()) {
    throw LookupError("unknown prompt '" + id + "'");
  }
  return it->second;
}

std::size_t World::ResponseIndex(const std::string& id) const {
  auto it = response_index_.find(id);
  if (it == response_index_.end()) {
    throw LookupError("unknown response '" + id + "'");
  }
  return it->second;
}

bool SameWorld(const WorldPtr& a, const WorldPtr& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

}  // namespace prefshap
