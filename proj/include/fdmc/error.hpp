// Copyright 2026 The fdmc-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FDMC_ERROR_HPP
#define FDMC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fdmc {

// Base class for every error raised by the library. The C API maps each
// subclass onto one fdmc_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument: out-of-range parameter, dimension mismatch, bad geometry.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The inner solver was handed a start point with a non-positive slack.
class InfeasibleStartError : public Error {
 public:
  using Error::Error;
};

// Newton iteration cap hit, or a factorization broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// unlift() saw a relaxed indicator too far from {0, 1}.
class RoundingError : public Error {
 public:
  RoundingError(const std::string& what, double max_deviation)
      : Error(what), max_deviation_(max_deviation) {}
  double max_deviation() const noexcept { return max_deviation_; }

 private:
  double max_deviation_;
};

// Exhaustive enumeration would exceed the configured budget.
class SizeCapError : public Error {
 public:
  SizeCapError(const std::string& what, double required_budget)
      : Error(what), required_budget_(required_budget) {}
  double required_budget() const noexcept { return required_budget_; }

 private:
  double required_budget_;
};

}  // namespace fdmc

#endif  // FDMC_ERROR_HPP
