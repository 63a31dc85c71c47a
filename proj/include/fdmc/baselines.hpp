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

#ifndef FDMC_BASELINES_HPP
#define FDMC_BASELINES_HPP

#include <cstddef>
#include <vector>

#include "fdmc/model.hpp"
#include "fdmc/sca.hpp"

namespace fdmc {

// Discrete power levels for the exhaustive oracle. Logarithmic grids span
// dynamic_range_db below the budget; refined() keeps every existing level.
struct PowerGrid {
  enum class Spacing { Linear, Logarithmic };

  int levels_per_variable = 32;
  Spacing spacing = Spacing::Logarithmic;
  bool includes_zero = true;
  double dynamic_range_db = 60.0;

  void validate() const;
  // Ascending levels in [0, budget].
  std::vector<double> values(double budget) const;
  // 2L - 1 levels on the same span, a superset of the current grid.
  PowerGrid refined() const;
};

struct OracleResult {
  Allocation allocation;
  double objective = 0.0;
  double enumeration_budget = 0.0;  // size of the grid-restricted search space
  std::size_t nodes = 0;            // search nodes actually visited
};

inline constexpr double kDefaultEnumerationCap = 1e16;

// Size of the grid-restricted search space: per subcarrier, every pair with
// every power tuple plus the idle option.
double oracle_enumeration_budget(const ProblemInstance& inst, const PowerGrid& grid);

// Best allocation whose powers lie on the grid, found by depth-first search
// over subcarriers with Lagrangian bounds on the shared budgets. The result is
// exact on the grid. Throws SizeCapError when the search space exceeds
// enumeration_cap.
OracleResult brute_force_oracle(const ProblemInstance& inst, const PowerGrid& grid,
                                double enumeration_cap = kDefaultEnumerationCap);

struct BaselineResult {
  Allocation allocation;
  double weighted_throughput = 0.0;
  int iterations = 0;  // outer SCA iterations over all stages
  FeasibilityReport feasibility;
};

// Half duplex: each subcarrier carries one DL user or one UL user, chosen and
// powered by the same SCA machinery on the direction-exclusive model.
BaselineResult hd_baseline(const ProblemInstance& inst, const SolverConfig& config);

// Decoupled: DL users and powers first as if there were no uplink, then UL
// users and powers with the resulting self-interference held fixed.
BaselineResult decoupled_baseline(const ProblemInstance& inst, const SolverConfig& config);

}  // namespace fdmc

#endif  // FDMC_BASELINES_HPP
