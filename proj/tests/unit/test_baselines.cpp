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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fdmc/baselines.hpp"
#include "fdmc/channel.hpp"
#include "fdmc/error.hpp"

namespace fdmc {
namespace {

ProblemInstance sampled_instance(std::uint64_t seed, std::size_t nf, std::size_t users, double p_dbm) {
  RandomStream rng = RandomStream::substream(seed, 0);
  const LargeScaleParams params;
  ChannelGains g = sample_channel_realization(CellGeometry{}, params, nf, users, users, rng);
  return ProblemInstance::with_unit_weights(std::move(g), dbm_to_watt(p_dbm), dbm_to_watt(18.0), params.rho());
}

ProblemInstance random_small(RandomStream& rng, std::size_t nf, std::size_t k, std::size_t j) {
  ChannelGains g(nf, k, j);
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t m = 0; m < k; ++m) g.H(i, m) = rng.uniform(0.5, 30.0);
    for (std::size_t r = 0; r < j; ++r) {
      g.G(i, r) = rng.uniform(0.5, 30.0);
      for (std::size_t m = 0; m < k; ++m) g.F(i, r, m) = rng.uniform(0.0, 3.0);
    }
    g.L_SI(i) = rng.uniform(0.1, 2.0);
  }
  return ProblemInstance::with_unit_weights(g, 1.0, 0.5, 1.0);
}

// Plain enumeration of every assignment and grid power for N_F subcarriers,
// independent of the pruned search inside brute_force_oracle.
double exhaustive(const ProblemInstance& inst, const PowerGrid& grid) {
  const std::vector<double> pl = grid.values(inst.p_max_dl);
  std::vector<std::vector<double>> ql;
  for (double b : inst.p_max_ul) ql.push_back(grid.values(b));
  const std::size_t nf = inst.n_subcarriers(), k = inst.n_dl(), j = inst.n_ul();
  double best = 0.0;
  std::vector<double> ul_used(j, 0.0);
  auto rec = [&](auto&& self, std::size_t i, double dl_used, double value) -> void {
    if (i == nf) {
      best = std::max(best, value);
      return;
    }
    self(self, i + 1, dl_used, value);  // idle
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t r = 0; r < j; ++r) {
        for (double p : pl) {
          if (dl_used + p > inst.p_max_dl * (1.0 + 1e-12)) continue;
          for (double q : ql[r]) {
            if (ul_used[r] + q > inst.p_max_ul[r] * (1.0 + 1e-12)) continue;
            ul_used[r] += q;
            self(self, i + 1, dl_used + p, value + subcarrier_utility(inst, i, m, r, p, q));
            ul_used[r] -= q;
          }
        }
      }
    }
  };
  rec(rec, 0, 0.0, 0.0);
  return best;
}

TEST(PowerGrid, LogLevelsEndAtBudget) {
  const PowerGrid grid;
  const std::vector<double> v = grid.values(2.0);
  ASSERT_EQ(v.size(), 33u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_NEAR(v[1], 2.0 * 1e-6, 1e-18);
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
}

TEST(PowerGrid, RefinementNests) {
  const PowerGrid grid;
  const std::vector<double> coarse = grid.values(1.0), fine = grid.refined().values(1.0);
  for (double c : coarse) {
    EXPECT_TRUE(std::any_of(fine.begin(), fine.end(), [&](double f) { return std::abs(f - c) <= 1e-12 * std::max(c, 1e-30); }))
        << c;
  }
}

TEST(Oracle, InterferenceFreeUsesFullPower) {
  ChannelGains g(1, 1, 1);
  g.H(0, 0) = 5.0;
  g.G(0, 0) = 2.0;
  const ProblemInstance inst = ProblemInstance::with_unit_weights(g, 1.5, 0.7, 0.0);
  const OracleResult res = brute_force_oracle(inst, PowerGrid{});
  EXPECT_EQ(res.allocation.s(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(res.allocation.p(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(res.allocation.q(0, 0), 0.7);
}

TEST(Oracle, MatchesPlainEnumeration) {
  RandomStream rng(31);
  PowerGrid grid;
  grid.levels_per_variable = 4;
  grid.dynamic_range_db = 20.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemInstance inst = random_small(rng, 2 + trial % 2, 2, 1 + trial % 2);
    const OracleResult res = brute_force_oracle(inst, grid);
    EXPECT_NEAR(res.objective, exhaustive(inst, grid), 1e-9) << "trial " << trial;
    EXPECT_NEAR(res.objective, system_objective(inst, res.allocation), 1e-9);
    EXPECT_TRUE(check_feasibility(inst, res.allocation, 1e-9).feasible());
  }
}

TEST(Oracle, RefinedGridNeverWorse) {
  RandomStream rng(32);
  PowerGrid grid;
  grid.levels_per_variable = 8;
  for (int trial = 0; trial < 5; ++trial) {
    const ProblemInstance inst = random_small(rng, 2, 1, 1);
    EXPECT_GE(brute_force_oracle(inst, grid.refined()).objective, brute_force_oracle(inst, grid).objective - 1e-12);
  }
}

TEST(Oracle, DownlinkSplitFollowsWaterFilling) {
  ChannelGains g(2, 1, 1);
  g.H(0, 0) = 4.0;
  g.H(1, 0) = 1.0;
  ProblemInstance inst = ProblemInstance::with_unit_weights(g, 2.0, 1.0, 0.0);
  inst.mu[0] = 0.0;
  PowerGrid grid;
  grid.spacing = PowerGrid::Spacing::Linear;
  grid.levels_per_variable = 40;
  const OracleResult res = brute_force_oracle(inst, grid);
  // Water level nu: (nu - 1/4) + (nu - 1) = 2.
  const double nu = (2.0 + 0.25 + 1.0) / 2.0;
  const double step = 2.0 / 40.0;
  const double p0 = res.allocation.s(0, 0, 0) == 1.0 ? res.allocation.p(0, 0) : 0.0;
  const double p1 = res.allocation.s(1, 0, 0) == 1.0 ? res.allocation.p(1, 0) : 0.0;
  EXPECT_NEAR(p0, nu - 0.25, step);
  EXPECT_NEAR(p1, nu - 1.0, step);
}

TEST(Oracle, SizeCapStopsBeforeWork) {
  const ProblemInstance inst = sampled_instance(1, 16, 4, 46.0);
  const double budget = oracle_enumeration_budget(inst, PowerGrid{});
  EXPECT_NEAR(std::log(budget), 16.0 * std::log(1.0 + 16.0 * 33.0 * 33.0), 1e-9);
  try {
    brute_force_oracle(inst, PowerGrid{});
    FAIL() << "expected a size cap error";
  } catch (const SizeCapError& e) {
    EXPECT_DOUBLE_EQ(e.required_budget(), budget);
  }
}

TEST(HalfDuplex, SinglePairPicksStrongerDirection) {
  ChannelGains g(1, 1, 1);
  g.H(0, 0) = 10.0;
  g.G(0, 0) = 3.0;
  g.F(0, 0, 0) = 1.0;
  g.L_SI(0) = 1.0;
  ProblemInstance inst = ProblemInstance::with_unit_weights(g, 1.0, 1.0, 1.0);
  BaselineResult hd = hd_baseline(inst, SolverConfig{});
  EXPECT_NEAR(hd.weighted_throughput, std::log2(11.0), 1e-6);
  EXPECT_NEAR(hd.allocation.p(0, 0), 1.0, 1e-6);
  EXPECT_EQ(hd.allocation.q(0, 0), 0.0);

  inst.w[0] = 0.25;  // log2(4) beats 0.25 log2(11)
  hd = hd_baseline(inst, SolverConfig{});
  EXPECT_NEAR(hd.weighted_throughput, std::log2(4.0), 1e-6);
  EXPECT_EQ(hd.allocation.p(0, 0), 0.0);
}

TEST(HalfDuplex, SymmetricSplitUsesOneDirectionPerSubcarrier) {
  ChannelGains g(2, 1, 1);
  for (std::size_t i = 0; i < 2; ++i) {
    g.H(i, 0) = 10.0;
    g.G(i, 0) = 20.0;
  }
  const ProblemInstance inst = ProblemInstance::with_unit_weights(g, 1.0, 0.5, 0.0);
  const BaselineResult hd = hd_baseline(inst, SolverConfig{});
  EXPECT_NEAR(hd.weighted_throughput, 2.0 * std::log2(11.0), 1e-5);
  EXPECT_TRUE(hd.feasibility.feasible());
}

TEST(HalfDuplex, ContainedInFullDuplexGrid) {
  const PowerGrid grid;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ProblemInstance inst = sampled_instance(40 + seed, 2, 1, 10.0 + 10.0 * (seed % 4));
    const BaselineResult hd = hd_baseline(inst, SolverConfig{});
    const OracleResult oracle = brute_force_oracle(inst, grid);
    // HD powers rounded down onto the grid form a feasible grid FD policy.
    Allocation down = hd.allocation;
    auto floor_to = [](const std::vector<double>& levels, double v) {
      double best = 0.0;
      for (double l : levels) if (l <= v) best = std::max(best, l);
      return best;
    };
    for (double& p : down.p_data()) p = floor_to(grid.values(inst.p_max_dl), p);
    for (double& q : down.q_data()) q = floor_to(grid.values(inst.p_max_ul[0]), q);
    EXPECT_LE(system_objective(inst, down), oracle.objective + 1e-9);
    EXPECT_LE(hd.weighted_throughput, 1.05 * oracle.objective + 1e-9);
  }
}

TEST(Decoupled, LosslessWithoutInterference) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ProblemInstance inst = sampled_instance(60 + seed, 4, 2, 30.0);
    inst.rho = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t m = 0; m < 2; ++m) inst.gains.F(i, r, m) = 0.0;
      }
    }
    const BaselineResult dec = decoupled_baseline(inst, SolverConfig{});
    const SolveReport joint = solve(inst, SolverConfig{});
    EXPECT_NEAR(dec.weighted_throughput / joint.weighted_throughput, 1.0, 0.02) << "seed " << seed;
    EXPECT_TRUE(dec.feasibility.feasible());
  }
}

TEST(Decoupled, StrongCoChannelFavoursJoint) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ProblemInstance inst = sampled_instance(70 + seed, 4, 2, 30.0);
    inst.rho = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t m = 0; m < 2; ++m) inst.gains.F(i, r, m) = 100.0 * inst.gains.G(i, r);
      }
    }
    const BaselineResult dec = decoupled_baseline(inst, SolverConfig{});
    const SolveReport joint = solve(inst, SolverConfig{});
    EXPECT_LE(dec.weighted_throughput, joint.weighted_throughput * (1.0 + 1e-6)) << "seed " << seed;
  }
}

TEST(Decoupled, Deterministic) {
  const ProblemInstance inst = sampled_instance(80, 1, 1, 30.0);
  const BaselineResult a = decoupled_baseline(inst, SolverConfig{});
  const BaselineResult b = decoupled_baseline(inst, SolverConfig{});
  EXPECT_EQ(a.allocation, b.allocation);
  EXPECT_EQ(a.iterations, b.iterations);
}

}  // namespace
}  // namespace fdmc
