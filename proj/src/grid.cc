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

#include "prefshap/grid.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefshap/errors.h"

namespace prefshap {

Grid Grid::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Grid grid(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw InvalidInputError("ragged matrix: row " + std::to_string(r) +
                              " has " + std::to_string(rows[r].size()) +
                              " entries, expected " + std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), grid.Row(r).begin());
  }
  return grid;
}

std::vector<std::vector<double>> Grid::ToRows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto row = Row(r);
    out[r].assign(row.begin(), row.end());
  }
  return out;
}

double MaxAbsDiff(const Grid& a, const Grid& b) {
  if (!a.SameShape(b)) {
    throw InvalidInputError("MaxAbsDiff: shape mismatch");
  }
  double worst = 0.0;
  const auto fa = a.Flat();
  const auto fb = b.Flat();
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i] == fb[i]) continue;  // covers -inf == -inf
    worst = std::max(worst, std::abs(fa[i] - fb[i]));
  }
  return worst;
}

double LogSumExp(std::span<const double> v) {
  const double kNegInf = -std::numeric_limits<double>::infinity();
  double max = kNegInf;
  for (double x : v) max = std::max(max, x);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max);
  return max + std::log(sum);
}

double LogSigmoid(double z) {
  if (z >= 0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace prefshap
