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

#include "prefshap/optimize.h"

#include <cmath>

#include <Eigen/Dense>

#include "prefshap/errors.h"

namespace prefshap {
namespace {

double Norm(const Grid& g) {
  double sq = 0.0;
  for (double v : g.Flat()) sq += v * v;
  return std::sqrt(sq);
}

double Dot(const Grid& a, const Grid& b) {
  double s = 0.0;
  const auto fa = a.Flat();
  const auto fb = b.Flat();
  for (std::size_t i = 0; i < fa.size(); ++i) s += fa[i] * fb[i];
  return s;
}

Grid Axpy(const Grid& x, double t, const Grid& d) {
  Grid out = x;
  auto fo = out.Flat();
  const auto fd = d.Flat();
  for (std::size_t i = 0; i < fo.size(); ++i) fo[i] += t * fd[i];
  return out;
}

// Minimum-norm solution of curvature * step = grad for every row, so a
// singular block (gauge direction, responses without data) contributes no
// movement along its null space.
Grid NewtonDirection(const Grid& grad,
                     const std::vector<std::vector<double>>& curvature) {
  const Eigen::Index n = static_cast<Eigen::Index>(grad.cols());
  Grid step(grad.rows(), grad.cols());
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        block(curvature[r].data(), n, n);
    Eigen::Map<const Eigen::VectorXd> g(grad.Row(r).data(), n);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(block);
    cod.setThreshold(1e-13);
    Eigen::Map<Eigen::VectorXd>(step.Row(r).data(), n) = cod.solve(g);
  }
  return step;
}

}  // namespace

std::string ToString(OptimizerMethod method) {
  switch (method) {
    case OptimizerMethod::kNewton:
      return "newton";
    case OptimizerMethod::kGradientAscent:
      return "gradient";
  }
  return "unknown";
}

OptimizerMethod ParseOptimizerMethod(const std::string& name) {
  if (name == "newton") return OptimizerMethod::kNewton;
  if (name == "gradient") return OptimizerMethod::kGradientAscent;
  throw InvalidInputError("unknown optimizer method '" + name +
                          "' (expected newton or gradient)");
}

OptimizeResult MaximizeRowBlocks(const RowBlockObjective& objective, Grid init,
                                 const OptimizerSettings& settings) {
  OptimizeResult result;
  result.params = std::move(init);
  Grid grad(result.params.rows(), result.params.cols());
  std::vector<std::vector<double>> curvature(result.params.rows());
  const bool newton = settings.method == OptimizerMethod::kNewton;

  for (int iter = 0;; ++iter) {
    result.value =
        objective(result.params, &grad, newton ? &curvature : nullptr);
    result.grad_norm = Norm(grad);
    result.iterations = iter;
    if (!std::isfinite(result.grad_norm)) return result;
    if (result.grad_norm <= settings.tol) {
      result.converged = true;
      return result;
    }
    if (iter >= settings.max_iters) return result;

    if (!newton) {
      result.params = Axpy(result.params, settings.step_size, grad);
      continue;
    }

    Grid dir = NewtonDirection(grad, curvature);
    double slope = Dot(grad, dir);
    if (!(slope > 0.0) || !std::isfinite(slope)) {
      dir = grad;
      slope = result.grad_norm * result.grad_norm;
    }
    // In the quadratic regime the predicted gain is below the resolution of
    // the objective value and Armijo cannot discriminate; take the full step.
    if (slope <= 1e-12 * std::max(1.0, std::abs(result.value))) {
      result.params = Axpy(result.params, 1.0, dir);
      continue;
    }
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      Grid trial = Axpy(result.params, t, dir);
      const double value = objective(trial, nullptr, nullptr);
      if (std::isfinite(value) && value >= result.value + 1e-4 * t * slope) {
        result.params = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) return result;  // stalled
  }
}

}  // namespace prefshap
