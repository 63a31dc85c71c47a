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

#include "fdmc/model.hpp"

#include <algorithm>
#include <cmath>

#include "fdmc/error.hpp"

namespace fdmc {

void ProblemInstance::validate() const {
  gains.validate();
  if (w.size() != n_dl() || mu.size() != n_ul() || p_max_ul.size() != n_ul()) {
    throw ParameterError("weight or UL budget vector does not match the user counts");
  }
  for (double x : w) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("DL weights must lie in [0, 1]");
  }
  for (double x : mu) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("UL weights must lie in [0, 1]");
  }
  if (!(p_max_dl > 0.0) || !std::isfinite(p_max_dl)) {
    throw ParameterError("DL power budget must be positive and finite");
  }
  for (double x : p_max_ul) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ParameterError("UL power budgets must be positive and finite");
    }
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in [0, 1]");
}

ProblemInstance ProblemInstance::with_unit_weights(ChannelGains gains, double p_max_dl,
                                                   double p_max_ul, double rho) {
  ProblemInstance inst;
  const std::size_t k = gains.n_dl();
  const std::size_t j = gains.n_ul();
  inst.gains = std::move(gains);
  inst.w.assign(k, 1.0);
  inst.mu.assign(j, 1.0);
  inst.p_max_dl = p_max_dl;
  inst.p_max_ul.assign(j, p_max_ul);
  inst.rho = rho;
  return inst;
}

Allocation::Allocation(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul)
    : n_subcarriers_(n_subcarriers),
      n_dl_(n_dl),
      n_ul_(n_ul),
      p_(n_subcarriers * n_dl, 0.0),
      q_(n_subcarriers * n_ul, 0.0),
      s_(n_subcarriers * n_dl * n_ul, 0.0) {}

double subcarrier_utility(const ProblemInstance& inst, std::size_t i, std::size_t m,
                          std::size_t r, double p, double q) {
  if (p < 0.0 || q < 0.0) throw ParameterError("transmit powers must be non-negative");
  if (i >= inst.n_subcarriers() || m >= inst.n_dl() || r >= inst.n_ul()) {
    throw ParameterError("subcarrier or user index out of range");
  }
  const ChannelGains& g = inst.gains;
  const double dl_sinr = g.H(i, m) * p / (g.F(i, r, m) * q + 1.0);
  const double ul_sinr = g.G(i, r) * q / (inst.rho * g.L_SI(i) * p + 1.0);
  return inst.w[m] * std::log2(1.0 + dl_sinr) + inst.mu[r] * std::log2(1.0 + ul_sinr);
}

double system_objective(const ProblemInstance& inst, const Allocation& alloc) {
  if (alloc.n_subcarriers() != inst.n_subcarriers() || alloc.n_dl() != inst.n_dl() ||
      alloc.n_ul() != inst.n_ul()) {
    throw ParameterError("allocation dimensions do not match the instance");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n_subcarriers(); ++i) {
    for (std::size_t m = 0; m < inst.n_dl(); ++m) {
      for (std::size_t r = 0; r < inst.n_ul(); ++r) {
        const double s = alloc.s(i, m, r);
        if (s == 0.0) continue;
        total += s * subcarrier_utility(inst, i, m, r, alloc.p(i, m), alloc.q(i, r));
      }
    }
  }
  return total;
}

std::size_t FeasibilityReport::count(const std::string& constraint) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [&](const Violation& v) { return v.constraint == constraint; }));
}

FeasibilityReport check_feasibility(const ProblemInstance& inst, const Allocation& alloc,
                                    double tol) {
  FeasibilityReport report;
  if (alloc.n_subcarriers() != inst.n_subcarriers() || alloc.n_dl() != inst.n_dl() ||
      alloc.n_ul() != inst.n_ul()) {
    report.violations.push_back({"C0", 0, 1.0});
    return report;
  }
  const std::size_t n = inst.n_subcarriers(), k = inst.n_dl(), j = inst.n_ul();
  auto flag = [&](const char* name, std::size_t index, double residual) {
    if (residual > tol || std::isnan(residual)) report.violations.push_back({name, index, residual});
  };

  double dl_power = 0.0;
  std::vector<double> ul_power(j, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t r = 0; r < j; ++r) {
        dl_power += alloc.s(i, m, r) * alloc.p(i, m);
        ul_power[r] += alloc.s(i, m, r) * alloc.q(i, r);
      }
    }
  }
  flag("C1", 0, dl_power - inst.p_max_dl);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < k; ++m) flag("C2", i * k + m, -alloc.p(i, m));
  }
  for (std::size_t r = 0; r < j; ++r) flag("C3", r, ul_power[r] - inst.p_max_ul[r]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < j; ++r) flag("C4", i * j + r, -alloc.q(i, r));
  }
  for (std::size_t idx = 0; idx < alloc.s_data().size(); ++idx) {
    const double s = alloc.s_data()[idx];
    flag("C5", idx, std::min(std::abs(s), std::abs(s - 1.0)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t r = 0; r < j; ++r) sum += alloc.s(i, m, r);
    }
    flag("C6", i, sum - 1.0);
  }
  return report;
}

}  // namespace fdmc
