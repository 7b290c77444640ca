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

#ifndef PREFSHAP_WORLD_H_
#define PREFSHAP_WORLD_H_

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace prefshap {

// Finite prompt and response spaces plus the evaluation prompt distribution.
// Identifiers are opaque strings mapped to dense indices at construction.
// Immutable once built.
class World {
 public:
  // Throws InvalidInputError on empty or duplicate identifiers, or when
  // eval_dist is not a probability vector over the prompts (tolerance 1e-12).
  World(std::vector<std::string> prompts, std::vector<std::string> responses,
        std::vector<double> eval_dist);

  // Convenience: the uniform evaluation distribution.
  static std::shared_ptr<const World> Uniform(std::vector<std::string> prompts,
                                              std::vector<std::string> responses);

  std::size_t num_prompts() const { return prompts_.size(); }
  std::size_t num_responses() const { return responses_.size(); }

  const std::vector<std::string>& prompts() const { return prompts_; }
  const std::vector<std::string>& responses() const { return responses_; }
  const std::vector<double>& eval_dist() const { return eval_dist_; }

  // Index lookups; throw LookupError for unknown identifiers.
  std::size_t PromptIndex(const std::string& id) const;
  std::size_t ResponseIndex(const std::string& id) const;

  friend bool operator==(const World& a, const World& b) {
    return a.prompts_ == b.prompts_ && a.responses_ == b.responses_ &&
           a.eval_dist_ == b.eval_dist_;
  }

 private:
  std::vector<std::string> prompts_;
  std::vector<std::string> responses_;
  std::vector<double> eval_dist_;
  std::unordered_map<std::string, std::size_t> prompt_index_;
  std::unordered_map<std::string, std::size_t> response_index_;
};

using WorldPtr = std::shared_ptr<const World>;

// True when both pointers refer to the same world, or to equal worlds.
bool SameWorld(const WorldPtr& a, const WorldPtr& b);

}  // namespace prefshap

#endif  // PREFSHAP_WORLD_H_
