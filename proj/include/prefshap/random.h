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

#ifndef PREFSHAP_RANDOM_H_
#define PREFSHAP_RANDOM_H_

#include <cstdint>
#include <random>

namespace prefshap {

using Rng = std::mt19937_64;

// Deterministic generator for (seed, stream). Distinct streams give
// statistically independent sequences from one user-facing seed.
inline Rng MakeRng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// A child seed for (seed, stream), e.g. one per data source.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return MakeRng(seed, stream)();
}

}  // namespace prefshap

#endif  // PREFSHAP_RANDOM_H_
