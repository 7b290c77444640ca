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

#ifndef PREFSHAP_PARALLEL_H_
#define PREFSHAP_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace prefshap {

// Number of workers to use for a requested job count; jobs <= 0 means one
// per hardware thread.
int ResolveJobs(int jobs);

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception thrown by any call is rethrown after all workers have joined;
// remaining indices are skipped once a failure is seen.
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& body);

}  // namespace prefshap

#endif  // PREFSHAP_PARALLEL_H_
