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

#ifndef FDMC_BENCH_HPP
#define FDMC_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdmc/baselines.hpp"
#include "fdmc/channel.hpp"
#include "fdmc/model.hpp"
#include "fdmc/sca.hpp"

namespace fdmc {

enum class SweepAxis { None, Power, Users };

// Experiment description. Powers are kept in dBm and converted when an
// instance is built; every other quantity is in SI units.
struct ExperimentConfig {
  double carrier_hz = 2.5e9;
  double system_bandwidth_hz = 5e6;
  std::size_t n_subcarriers = 64;
  double subcarrier_bandwidth_hz = 78e3;
  double pathloss_exponent = 3.6;
  double si_cancellation_db = -90.0;
  double noise_dl_dbm = -125.0;
  double noise_bs_dbm = -125.0;
  double p_max_ul_dbm = 18.0;
  double p_max_dl_dbm = 46.0;  // solve, oracle check and fixed power of other sweeps
  // DL budget of the user sweep. Two values are quoted for this setting,
  // 31 and 45 dBm; 31 dBm is the default.
  double user_sweep_p_max_dl_dbm = 31.0;
  double bs_antenna_gain_db = 10.0;
  double rician_k_db = 5.0;
  double inner_radius_m = 30.0;
  double outer_radius_m = 600.0;
  std::size_t n_dl = 10;
  std::size_t n_ul = 10;

  SweepAxis sweep = SweepAxis::None;
  std::vector<double> sweep_values;  // dBm for a power sweep, K = J for a user sweep
  std::vector<std::string> schemes{"proposed", "baseline1", "baseline2"};
  std::size_t trials = 50;
  std::uint64_t master_seed = 1;
  std::string preset = "converged";
  std::optional<double> eta;  // overrides the default penalty weight
  std::string output = "results.csv";
  unsigned threads = 1;

  // Oracle check.
  int oracle_levels = 32;
  double oracle_range_db = 60.0;
  double oracle_cap = kDefaultEnumerationCap;
  bool interference_free = false;  // zero rho and co-channel gains

  void validate() const;
  LargeScaleParams large_scale() const;
  CellGeometry geometry() const;
  PowerGrid oracle_grid() const;
  // Solver settings for one instance, including the penalty weight computed
  // from this config's DL budget and noise.
  SolverConfig solver_config(double p_max_dl_dbm) const;
};

// "key = value" lines, '#' comments. Quantities accept unit suffixes (dBm, dB,
// W, mW, GHz, MHz, kHz, Hz, m, km) and are converted when parsed. Unknown keys
// and malformed values raise ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  double sweep_value = 0.0;
  std::string scheme;
  double mean_throughput = 0.0;  // bits/s/Hz
  double std_error = 0.0;
  std::size_t trials = 0;  // successful runs that enter the mean
  double mean_iterations = 0.0;
  std::size_t feasibility_failures = 0;
};

// One seeded drop turned into a problem instance.
ProblemInstance make_instance(const ExperimentConfig& config, std::size_t trial, std::size_t users,
                              double p_max_dl_dbm);

struct SchemeOutcome {
  bool ok = false;
  double throughput = 0.0;
  int iterations = 0;
  Allocation allocation;
  std::string error;
};

SchemeOutcome run_scheme(const std::string& scheme, const ProblemInstance& inst,
                         const SolverConfig& config);

struct SweepResult {
  std::vector<ResultRow> rows;
  std::size_t runs = 0;
  std::size_t failures = 0;
  bool failure_threshold_exceeded() const { return runs > 0 && failures * 20 > runs; }
};

using ProgressFn = std::function<void(const std::string&)>;

SweepResult run_power_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});
SweepResult run_user_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

struct OracleRow {
  std::size_t instance = 0;
  double oracle_objective = 0.0;
  double sca_objective = 0.0;
  double ratio = 0.0;
  // Upper bound on how far the continuous solution may exceed the grid
  // optimum: sca / (sca with powers rounded down onto the grid) - 1.
  double grid_slack = 0.0;
};

struct OracleCheck {
  std::vector<OracleRow> rows;
  double fraction_at_95 = 0.0;
};

// Throws SizeCapError before doing any work if one instance is too large.
OracleCheck run_oracle_check(const ExperimentConfig& config, const ProgressFn& progress = {});

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_oracle_csv(std::ostream& out, const OracleCheck& check);
void write_allocation_csv(std::ostream& out, const ProblemInstance& inst, const Allocation& alloc);

}  // namespace fdmc

#endif  // FDMC_BENCH_HPP
