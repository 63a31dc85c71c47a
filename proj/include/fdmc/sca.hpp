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

#ifndef FDMC_SCA_HPP
#define FDMC_SCA_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdmc/convex.hpp"
#include "fdmc/model.hpp"
#include "fdmc/reform.hpp"

namespace fdmc {

enum class InitStrategy {
  Greedy,   // best slot per subcarrier gets most of the assignment mass
  Uniform,  // equal mass on every slot
  Random,   // seeded random mass and powers
};

struct SolverConfig {
  // Penalty weight. When unset, 10 log2(1 + P_max^DL / sigma^2) with the
  // default -125 dBm receiver noise.
  std::optional<double> eta;
  int max_outer_iterations = 30;
  double outer_tol = 1e-6;  // relative change of the penalized objective
  BarrierOptions inner;
  double binary_tol = 1e-3;
  InitStrategy init = InitStrategy::Greedy;
  std::uint64_t init_seed = 0;

  void validate() const;
  double eta_for(const ProblemInstance& inst) const;

  // "converged" (30 outer iterations) or "paper-faithful" (5).
  static SolverConfig preset(const std::string& name);
};

struct TraceRow {
  int iteration = 0;
  double penalized_objective = 0.0;
  double max_binary_deviation = 0.0;
  int inner_iterations = 0;  // Newton steps spent on this surrogate
};

struct SolveReport {
  Allocation final_allocation;
  LiftedPoint relaxed_point;                  // last accepted iterate, before rounding
  std::vector<double> lifted_trajectory_objectives;  // penalized objective, start point first
  std::vector<TraceRow> trace;
  int iterations_used = 0;
  bool converged = false;
  bool stalled = false;  // a surrogate step failed to decrease the true objective and was rejected
  double eta = 0.0;
  double max_binary_deviation = 0.0;  // of relaxed_point
  bool binary_ok = false;             // max_binary_deviation <= binary_tol
  double weighted_throughput = 0.0;   // system objective of final_allocation
  FeasibilityReport feasibility;
};

// Strictly feasible starting point for the model's constraint system.
LiftedPoint initial_point(const LiftedModel& model, const SolverConfig& config);

// Outer SCA loop from `start` on an arbitrary layout, without rounding.
// Appends to report.trace and report.lifted_trajectory_objectives and fills
// iterations_used, converged and stalled.
LiftedPoint run_sca(const LiftedModel& model, const ConstraintSystem& constraints,
                    const LiftedPoint& start, double eta, const SolverConfig& config,
                    SolveReport& report);

// Per subcarrier, activate the slot with the largest relaxed s if it is at
// least 0.5, then re-optimize powers with the assignment frozen. Returns the
// better of the refined and the directly rounded allocation.
Allocation round_and_refine(const LiftedModel& model, const LiftedPoint& relaxed,
                            const SolverConfig& config);

// Allocation obtained by rounding without power re-optimization.
Allocation naive_rounding(const LiftedModel& model, const LiftedPoint& relaxed);

SolveReport solve(const LiftedModel& model, const SolverConfig& config);
SolveReport solve(const ProblemInstance& inst, const SolverConfig& config);

// Tab-separated: iteration, penalized objective, max binary deviation, inner iterations.
void write_trace(std::ostream& out, const SolveReport& report);

}  // namespace fdmc

#endif  // FDMC_SCA_HPP
