// Copyright 2026 The qndsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qnd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& where, std::size_t a, std::size_t b)
      : Error(where + ": dimension mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")") {}
};

/// Iterative routine ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Requested measurement outcome has probability at or below the floor.
class OutcomeImpossible : public Error {
 public:
  OutcomeImpossible(std::size_t mu, double p)
      : Error("outcome " + std::to_string(mu) + " has probability " +
              std::to_string(p) + " at or below the floor"),
        mu_(mu),
        probability_(p) {}
  std::size_t outcome() const noexcept { return mu_; }
  double probability() const noexcept { return probability_; }

 private:
  std::size_t mu_;
  double probability_;
};

class FilterBreakdown : public Error {
 public:
  using Error::Error;
};

}  // namespace qnd
