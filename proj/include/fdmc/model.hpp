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

#ifndef FDMC_MODEL_HPP
#define FDMC_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "fdmc/channel.hpp"

namespace fdmc {

// Immutable optimization input. Powers are linear watts; rates are bits/s/Hz.
struct ProblemInstance {
  ChannelGains gains;
  std::vector<double> w;           // DL weights, one per DL user
  std::vector<double> mu;          // UL weights, one per UL user
  double p_max_dl = 0.0;           // BS power budget
  std::vector<double> p_max_ul;    // per-UL-user budget
  double rho = 0.0;                // residual SI fraction

  std::size_t n_subcarriers() const { return gains.n_subcarriers(); }
  std::size_t n_dl() const { return gains.n_dl(); }
  std::size_t n_ul() const { return gains.n_ul(); }

  void validate() const;

  // Equal weights and a common UL budget.
  static ProblemInstance with_unit_weights(ChannelGains gains, double p_max_dl,
                                           double p_max_ul, double rho);
};

// Physical decision variables. s is held as double so that a caller-supplied
// non-binary value can be diagnosed by check_feasibility.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul);

  std::size_t n_subcarriers() const { return n_subcarriers_; }
  std::size_t n_dl() const { return n_dl_; }
  std::size_t n_ul() const { return n_ul_; }

  double& p(std::size_t i, std::size_t m) { return p_[i * n_dl_ + m]; }
  double p(std::size_t i, std::size_t m) const { return p_[i * n_dl_ + m]; }
  double& q(std::size_t i, std::size_t r) { return q_[i * n_ul_ + r]; }
  double q(std::size_t i, std::size_t r) const { return q_[i * n_ul_ + r]; }
  double& s(std::size_t i, std::size_t m, std::size_t r) { return s_[(i * n_dl_ + m) * n_ul_ + r]; }
  double s(std::size_t i, std::size_t m, std::size_t r) const {
    return s_[(i * n_dl_ + m) * n_ul_ + r];
  }

  std::vector<double>& p_data() { return p_; }
  const std::vector<double>& p_data() const { return p_; }
  std::vector<double>& q_data() { return q_; }
  const std::vector<double>& q_data() const { return q_; }
  std::vector<double>& s_data() { return s_; }
  const std::vector<double>& s_data() const { return s_; }

  bool operator==(const Allocation&) const = default;

 private:
  std::size_t n_subcarriers_ = 0;
  std::size_t n_dl_ = 0;
  std::size_t n_ul_ = 0;
  std::vector<double> p_;
  std::vector<double> q_;
  std::vector<double> s_;
};

// Weighted DL + UL rate of pairing DL user m with UL user r on subcarrier i,
// without the indicator factor.
double subcarrier_utility(const ProblemInstance& inst, std::size_t i, std::size_t m,
                          std::size_t r, double p, double q);

double system_objective(const ProblemInstance& inst, const Allocation& alloc);

struct Violation {
  std::string constraint;  // "C1" .. "C6"
  std::size_t index = 0;   // flattened index within the constraint family
  double residual = 0.0;   // amount by which the constraint is exceeded
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(const std::string& constraint) const;
};

// Every violated constraint among C1-C6 with its residual. Never throws on an
// infeasible allocation; a dimension mismatch is reported as a C0 violation.
FeasibilityReport check_feasibility(const ProblemInstance& inst, const Allocation& alloc,
                                    double tol);

}  // namespace fdmc

#endif  // FDMC_MODEL_HPP
