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

#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fdmc/bench.hpp"
#include "fdmc/error.hpp"

namespace fdmc {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string results_csv(const SweepResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.rows);
  return out.str();
}

TEST(Config, DefaultsFollowSimulationTable) {
  const ExperimentConfig c = parse("");
  EXPECT_DOUBLE_EQ(c.carrier_hz, 2.5e9);
  EXPECT_DOUBLE_EQ(c.system_bandwidth_hz, 5e6);
  EXPECT_EQ(c.n_subcarriers, 64u);
  EXPECT_DOUBLE_EQ(c.subcarrier_bandwidth_hz, 78e3);
  EXPECT_DOUBLE_EQ(c.pathloss_exponent, 3.6);
  EXPECT_DOUBLE_EQ(c.si_cancellation_db, -90.0);
  EXPECT_DOUBLE_EQ(c.noise_dl_dbm, -125.0);
  EXPECT_DOUBLE_EQ(c.noise_bs_dbm, -125.0);
  EXPECT_DOUBLE_EQ(c.p_max_ul_dbm, 18.0);
  EXPECT_DOUBLE_EQ(c.bs_antenna_gain_db, 10.0);
  EXPECT_DOUBLE_EQ(c.user_sweep_p_max_dl_dbm, 31.0);
}

TEST(Config, UnitsConvertAtParseTime) {
  const ExperimentConfig c = parse(
      "# comment line\n"
      "carrier = 2.4 GHz\n"
      "subcarrier_bandwidth = 15 kHz   # trailing comment\n"
      "p_max_dl = 1 W\n"
      "p_max_ul = 100mW\n"
      "si_cancellation = -100 dB\n"
      "outer_radius = 0.5 km\n"
      "users = 3\n"
      "sweep = power\n"
      "sweep_values = 10 dBm, 0.1 W, 1W\n");
  EXPECT_DOUBLE_EQ(c.carrier_hz, 2.4e9);
  EXPECT_DOUBLE_EQ(c.subcarrier_bandwidth_hz, 15e3);
  EXPECT_NEAR(c.p_max_dl_dbm, 30.0, 1e-12);
  EXPECT_NEAR(c.p_max_ul_dbm, 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.si_cancellation_db, -100.0);
  EXPECT_DOUBLE_EQ(c.outer_radius_m, 500.0);
  EXPECT_EQ(c.n_dl, 3u);
  EXPECT_EQ(c.n_ul, 3u);
  ASSERT_EQ(c.sweep_values.size(), 3u);
  EXPECT_NEAR(c.sweep_values[1], 20.0, 1e-12);
  EXPECT_NEAR(c.sweep_values[2], 30.0, 1e-12);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("p_max_dl = 46 GHz\n"), ConfigError);
  EXPECT_THROW(parse("trials = 0\n"), ConfigError);
  EXPECT_THROW(parse("trials = 2.5\n"), ConfigError);
  EXPECT_THROW(parse("sweep = power\nsweep_values = 20, 10\n"), ConfigError);
  EXPECT_THROW(parse("sweep = users\nsweep_values = 1, 1.5\n"), ConfigError);
  EXPECT_THROW(parse("schemes = proposed, magic\n"), ConfigError);
  EXPECT_THROW(parse("preset = fastest\n"), ConfigError);
  EXPECT_THROW(parse("just a line\n"), ConfigError);
  EXPECT_THROW(parse("outer_radius = 10\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/fdmc.cfg"), ConfigError);
}

const char* kTinySweep =
    "n_subcarriers = 2\n"
    "users = 1\n"
    "trials = 3\n"
    "sweep = power\n"
    "sweep_values = 20 dBm, 40 dBm\n";

TEST(Sweep, RowsAndHeader) {
  const ExperimentConfig c = parse(kTinySweep);
  const SweepResult r = run_power_sweep(c);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.runs, 18u);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_FALSE(r.failure_threshold_exceeded());
  for (const ResultRow& row : r.rows) {
    EXPECT_EQ(row.trials, 3u);
    EXPECT_EQ(row.feasibility_failures, 0u);
    EXPECT_GT(row.mean_throughput, 0.0);
  }
  const std::string csv = results_csv(r);
  EXPECT_EQ(csv.rfind("# fdmc-alloc results v1\n"
                      "sweep_value,scheme,mean_throughput_bps_hz,std_error,trials,mean_iterations,"
                      "feasibility_failures\n",
                      0),
            0u);
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
  ExperimentConfig c = parse(kTinySweep);
  const std::string a = results_csv(run_power_sweep(c));
  const std::string b = results_csv(run_power_sweep(c));
  c.threads = 3;
  const std::string d = results_csv(run_power_sweep(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  c.master_seed = 2;
  EXPECT_NE(a, results_csv(run_power_sweep(c)));
}

TEST(Sweep, MeanAndStandardErrorFromTrials) {
  const ExperimentConfig c = parse(
      "n_subcarriers = 2\nusers = 1\ntrials = 4\nsweep = users\nsweep_values = 1\nschemes = proposed\n");
  const SweepResult r = run_user_sweep(c);
  ASSERT_EQ(r.rows.size(), 1u);
  // Single point user sweep equals direct solves on the same seeds.
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    const ProblemInstance inst = make_instance(c, t, 1, c.user_sweep_p_max_dl_dbm);
    const double v = solve(inst, c.solver_config(c.user_sweep_p_max_dl_dbm)).weighted_throughput;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / 4.0;
  const double se = std::sqrt((sum_sq - 4.0 * mean * mean) / 3.0 / 4.0);
  EXPECT_NEAR(r.rows[0].mean_throughput, mean, 1e-12 * mean);
  EXPECT_NEAR(r.rows[0].std_error, se, 1e-6 * std::max(se, 1e-9));
}

TEST(Scheme, ThroughputAuditsAgainstAllocation) {
  const ExperimentConfig c = parse("n_subcarriers = 3\nusers = 2\n");
  for (std::size_t t = 0; t < 10; ++t) {
    const ProblemInstance inst = make_instance(c, t, 0, 20.0 + 2.0 * t);
    for (const char* scheme : {"proposed", "baseline1", "baseline2"}) {
      const SchemeOutcome o = run_scheme(scheme, inst, c.solver_config(20.0 + 2.0 * t));
      ASSERT_TRUE(o.ok) << scheme << ": " << o.error;
      EXPECT_NEAR(o.throughput, system_objective(inst, o.allocation), 1e-12);
    }
  }
}

TEST(Scheme, InterferenceFreeInstancesZeroCoupling) {
  const ExperimentConfig c = parse("n_subcarriers = 2\nusers = 2\ninterference_free = true\n");
  const ProblemInstance inst = make_instance(c, 0, 0, 30.0);
  EXPECT_EQ(inst.rho, 0.0);
  for (double f : inst.gains.f_data()) EXPECT_EQ(f, 0.0);
}

TEST(OracleCheck, RatioBoundedBySlack) {
  const ExperimentConfig c = parse("n_subcarriers = 2\nusers = 1\ntrials = 5\n");
  const OracleCheck check = run_oracle_check(c);
  ASSERT_EQ(check.rows.size(), 5u);
  for (const OracleRow& row : check.rows) {
    EXPECT_LE(row.ratio, 1.0 + row.grid_slack + 1e-9);
    EXPECT_GE(row.grid_slack, 0.0);
  }
  std::ostringstream out;
  write_oracle_csv(out, check);
  EXPECT_NE(out.str().find("summary,fraction_ratio_ge_0.95,"), std::string::npos);
}

TEST(OracleCheck, InterferenceFreeIsNearlyExact) {
  const ExperimentConfig c = parse("n_subcarriers = 2\nusers = 1\ntrials = 5\ninterference_free = true\n");
  for (const OracleRow& row : run_oracle_check(c).rows) EXPECT_GE(row.ratio, 0.99);
}

TEST(OracleCheck, CapFailsBeforeWork) {
  const ExperimentConfig c = parse("n_subcarriers = 64\nusers = 10\ntrials = 50\n");
  EXPECT_THROW(run_oracle_check(c), SizeCapError);
}

TEST(AllocationCsv, ListsActivePairs) {
  ChannelGains g(2, 1, 1);
  g.H(0, 0) = g.H(1, 0) = 1.0;
  const ProblemInstance inst = ProblemInstance::with_unit_weights(g, 1.0, 1.0, 0.0);
  Allocation a(2, 1, 1);
  a.s(1, 0, 0) = 1.0;
  a.p(1, 0) = 0.5;
  std::ostringstream out;
  write_allocation_csv(out, inst, a);
  EXPECT_EQ(out.str(),
            "# fdmc-alloc allocation v1\n"
            "# weighted_throughput_bps_hz=0.5849625007\n"
            "i,m,r,p_watt,q_watt\n"
            "1,0,0,0.5,0\n");
}

}  // namespace
}  // namespace fdmc
