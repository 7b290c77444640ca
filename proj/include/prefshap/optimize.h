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

#ifndef PREFSHAP_OPTIMIZE_H_
#define PREFSHAP_OPTIMIZE_H_

#include <functional>
#include <string>
#include <vector>

#include "prefshap/grid.h"

namespace prefshap {

enum class OptimizerMethod {
  // Damped Newton with Armijo backtracking. Each prompt row is an independent
  // block, so the Hessian solve is one small dense system per prompt.
  kNewton,
  // Full-batch ascent x += step_size * grad.
  kGradientAscent,
};

std::string ToString(OptimizerMethod method);
// Throws InvalidInputError for unknown names.
OptimizerMethod ParseOptimizerMethod(const std::string& name);

struct OptimizerSettings {
  OptimizerMethod method = OptimizerMethod::kNewton;
  double step_size = 0.5;
  int max_iters = 50000;
  double tol = 1e-8;  // on the Euclidean norm of the full gradient
};

struct OptimizeResult {
  Grid params;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Concave objective over a (prompt, response) grid whose Hessian is block
// diagonal by row. Returns the objective value. When `grad` is non-null it
// receives the gradient; when `curvature` is non-null it receives one
// row-major cols x cols block per row holding the negated Hessian (positive
// semi-definite).
using RowBlockObjective = std::function<double(
    const Grid& params, Grid* grad, std::vector<std::vector<double>>* curvature)>;

// Maximizes `objective` starting from `init`. Never throws on
// non-convergence; callers inspect `converged`.
OptimizeResult MaximizeRowBlocks(const RowBlockObjective& objective, Grid init,
                                 const OptimizerSettings& settings);

}  // namespace prefshap

#endif  // PREFSHAP_OPTIMIZE_H_
