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

// fdmc: command-line front end over the fdmc C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fdmc/fdmc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitSizeCap = 4;

struct Options {
  std::string config_path;
  long long seed = -1;
  std::string out;
  std::string preset;
  std::size_t trial = 0;
  std::string trace;
  bool verbose = false;
};

int report_error(fdmc_status st) {
  std::fprintf(stderr, "fdmc: %s: %s\n", fdmc_status_string(st), fdmc_last_error());
  switch (st) {
    case FDMC_ERR_CONFIG: return kExitConfig;
    case FDMC_ERR_SIZE_CAP: return kExitSizeCap;
    default: return kExitFailure;
  }
}

void print_progress(const char* message, void*) { std::fprintf(stderr, "%s\n", message); }

// Loads the config and applies command-line overrides. Returns 0 on success.
int load(const Options& opt, fdmc_config** cfg) {
  fdmc_status st = opt.config_path.empty() ? fdmc_config_default(cfg)
                                           : fdmc_config_load(opt.config_path.c_str(), cfg);
  if (st != FDMC_OK) return report_error(st);
  if (opt.seed >= 0 && (st = fdmc_config_set(*cfg, "master_seed", std::to_string(opt.seed).c_str())) != FDMC_OK) {
    return report_error(st);
  }
  if (!opt.preset.empty() && (st = fdmc_config_set(*cfg, "preset", opt.preset.c_str())) != FDMC_OK) {
    return report_error(st);
  }
  if (!opt.out.empty() && (st = fdmc_config_set(*cfg, "output", opt.out.c_str())) != FDMC_OK) {
    return report_error(st);
  }
  return kExitOk;
}

const char* output_path(const fdmc_config* cfg) {
  const char* path = nullptr;
  fdmc_config_output(cfg, &path);
  return path;
}

int run_solve(fdmc_config* cfg, const Options& opt) {
  fdmc_instance* inst = nullptr;
  fdmc_report* rep = nullptr;
  fdmc_status st = fdmc_instance_sample(cfg, opt.trial, &inst);
  if (st == FDMC_OK) st = fdmc_solve(inst, cfg, &rep);
  if (st == FDMC_OK) st = fdmc_report_write_allocation(rep, output_path(cfg));
  if (st == FDMC_OK && !opt.trace.empty()) st = fdmc_report_write_trace(rep, opt.trace.c_str());
  int code = kExitOk;
  if (st != FDMC_OK) {
    code = report_error(st);
  } else {
    std::size_t nf = 0;
    fdmc_instance_dims(inst, &nf, nullptr, nullptr);
    std::printf("weighted_throughput_bps_hz %.10g\n", fdmc_report_throughput(rep));
    std::printf("outer_iterations %d\n", fdmc_report_iterations(rep));
    std::printf("converged %d\n", fdmc_report_converged(rep));
    std::printf("feasible %d\n", fdmc_report_feasible(rep));
    std::printf("eta %.10g\n", fdmc_report_eta(rep));
    std::printf("max_binary_deviation %.3g\n", fdmc_report_max_binary_deviation(rep));
    for (std::size_t i = 0; i < nf; ++i) {
      int m = -1, r = -1;
      double p = 0.0, q = 0.0;
      fdmc_report_pair(rep, i, &m, &r);
      fdmc_report_powers(rep, i, &p, &q);
      std::printf("subcarrier %zu dl %d ul %d p_watt %.6g q_watt %.6g\n", i, m, r, p, q);
    }
    if (!fdmc_report_feasible(rep)) code = kExitThreshold;
  }
  fdmc_report_free(rep);
  fdmc_instance_free(inst);
  return code;
}

int run_sweep(fdmc_config* cfg, const Options& opt, fdmc_sweep_axis axis) {
  fdmc_sweep_axis configured = FDMC_SWEEP_NONE;
  fdmc_config_sweep_axis(cfg, &configured);
  if (configured == FDMC_SWEEP_NONE) {
    const fdmc_status st = fdmc_config_set(cfg, "sweep", axis == FDMC_SWEEP_POWER ? "power" : "users");
    if (st != FDMC_OK) return report_error(st);
  } else if (configured != axis) {
    std::fprintf(stderr, "fdmc: configuration error: config sweep axis does not match the subcommand\n");
    return kExitConfig;
  }
  fdmc_sweep* sweep = nullptr;
  fdmc_status st = fdmc_sweep_run(cfg, axis, opt.verbose ? print_progress : nullptr, nullptr, &sweep);
  if (st == FDMC_OK) st = fdmc_sweep_write_csv(sweep, output_path(cfg));
  int code = kExitOk;
  if (st != FDMC_OK) {
    code = report_error(st);
  } else if (fdmc_sweep_failure_threshold_exceeded(sweep)) {
    std::fprintf(stderr, "fdmc: %zu solver failures exceed 5%% of runs\n", fdmc_sweep_failures(sweep));
    code = kExitThreshold;
  }
  fdmc_sweep_free(sweep);
  return code;
}

int run_oracle(fdmc_config* cfg, const Options& opt) {
  fdmc_oracle* oracle = nullptr;
  fdmc_status st = fdmc_oracle_run(cfg, opt.verbose ? print_progress : nullptr, nullptr, &oracle);
  if (st == FDMC_OK) st = fdmc_oracle_write_csv(oracle, output_path(cfg));
  int code = kExitOk;
  if (st != FDMC_OK) {
    code = report_error(st);
  } else {
    std::printf("fraction_ratio_ge_0.95 %.6g\n", fdmc_oracle_fraction_at_95(oracle));
  }
  fdmc_oracle_free(oracle);
  return code;
}

int run_dump(fdmc_config* cfg, const Options& opt) {
  fdmc_instance* inst = nullptr;
  fdmc_status st = fdmc_instance_sample(cfg, opt.trial, &inst);
  if (st == FDMC_OK) st = fdmc_instance_write_channels(inst, output_path(cfg));
  fdmc_instance_free(inst);
  return st == FDMC_OK ? kExitOk : report_error(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex multicarrier resource allocation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Options opt;
  app.add_option("--config", opt.config_path, "Experiment config file (key = value lines)");
  app.add_option("--seed", opt.seed, "Master seed, overrides master_seed")->check(CLI::NonNegativeNumber);
  app.add_option("--out", opt.out, "Output CSV path, overrides output");
  app.add_option("--preset", opt.preset, "Solver preset")
      ->check(CLI::IsMember({"converged", "paper-faithful"}));
  app.add_option("--trial", opt.trial, "Trial index for solve and dump-channels");
  app.add_flag("-v,--verbose", opt.verbose, "Report progress on stderr");

  auto* solve = app.add_subcommand("solve", "Solve one sampled instance and write its allocation");
  solve->add_option("--trace", opt.trace, "Write the per-iteration trace here");
  auto* sweep_power = app.add_subcommand("sweep-power", "Monte Carlo sweep over the DL power budget");
  auto* sweep_users = app.add_subcommand("sweep-users", "Monte Carlo sweep over K = J");
  auto* oracle = app.add_subcommand("oracle-check", "Compare SCA against the grid oracle");
  auto* dump = app.add_subcommand("dump-channels", "Write the gains of one sampled instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  fdmc_config* cfg = nullptr;
  int code = load(opt, &cfg);
  if (code == kExitOk) {
    if (*solve) code = run_solve(cfg, opt);
    else if (*sweep_power) code = run_sweep(cfg, opt, FDMC_SWEEP_POWER);
    else if (*sweep_users) code = run_sweep(cfg, opt, FDMC_SWEEP_USERS);
    else if (*oracle) code = run_oracle(cfg, opt);
    else if (*dump) code = run_dump(cfg, opt);
  }
  fdmc_config_free(cfg);
  return code;
}
