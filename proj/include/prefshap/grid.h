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

#ifndef PREFSHAP_GRID_H_
#define PREFSHAP_GRID_H_

#include <cstddef>
#include <span>
#include <vector>

namespace prefshap {

// Dense row-major matrix indexed (prompt, response).
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Builds a grid from nested rows; throws InvalidInputError when ragged.
  static Grid FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> Flat() { return data_; }
  std::span<const double> Flat() const { return data_; }

  std::vector<std::vector<double>> ToRows() const;

  bool SameShape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Largest absolute entrywise difference. Entries that are both -inf count as
// equal; a -inf facing a finite value gives +inf.
double MaxAbsDiff(const Grid& a, const Grid& b);

// Numerically stable log(sum(exp(v))). Returns -inf for an all -inf input.
double LogSumExp(std::span<const double> v);

// log(sigmoid(z)) without overflow for large |z|.
double LogSigmoid(double z);

double Sigmoid(double z);

}  // namespace prefshap

#endif  // PREFSHAP_GRID_H_
