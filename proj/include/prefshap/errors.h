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

#ifndef PREFSHAP_ERRORS_H_
#define PREFSHAP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace prefshap {

// Base class of every error raised by the library. The CLI maps each
// subclass to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: non-finite logits, bad shapes, invalid configs.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Unknown prompt, response or source identifier.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A quantity is undefined for the given arguments (e.g. KL divergence with
// q(y|x) = 0 where p(y|x) > 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Every response of some prompt has zero probability after composition.
class DegenerateSupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The regression design matrix does not identify all Shapley values.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double grad_norm, int iterations)
      : Error(what), grad_norm_(grad_norm), iterations_(iterations) {}

  double grad_norm() const { return grad_norm_; }
  int iterations() const { return iterations_; }

 private:
  double grad_norm_;
  int iterations_;
};

// A utility oracle failed; carries the canonical key of the coalition.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, std::string coalition)
      : Error(what), coalition_(std::move(coalition)) {}

  const std::string& coalition() const { return coalition_; }

 private:
  std::string coalition_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace prefshap

#endif  // PREFSHAP_ERRORS_H_
