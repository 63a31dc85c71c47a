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

#include "fdmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fdmc/error.hpp"
#include "fdmc/rng.hpp"

namespace fdmc {

void ExperimentConfig::validate() const {
  try {
    large_scale().validate();
    geometry().validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (n_subcarriers < 1 || n_dl < 1 || n_ul < 1) throw ConfigError("subcarrier and user counts must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(system_bandwidth_hz > 0.0) || !(subcarrier_bandwidth_hz > 0.0)) {
    throw ConfigError("bandwidths must be positive");
  }
  for (std::size_t k = 1; k < sweep_values.size(); ++k) {
    if (!(sweep_values[k] > sweep_values[k - 1])) throw ConfigError("sweep values must be strictly increasing");
  }
  if (sweep == SweepAxis::Users) {
    for (double v : sweep_values) {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("user sweep values must be positive integers");
    }
  }
  if (sweep != SweepAxis::None && sweep_values.empty()) throw ConfigError("sweep needs sweep_values");
  for (const std::string& s : schemes) {
    if (s != "proposed" && s != "baseline1" && s != "baseline2" && s != "oracle") {
      throw ConfigError("unknown scheme '" + s + "'");
    }
  }
  if (schemes.empty()) throw ConfigError("no schemes selected");
  if (eta && !(*eta > 0.0)) throw ConfigError("eta must be positive");
  SolverConfig::preset(preset);
  try {
    oracle_grid().validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

LargeScaleParams ExperimentConfig::large_scale() const {
  LargeScaleParams p;
  p.carrier_hz = carrier_hz;
  p.pathloss_exponent = pathloss_exponent;
  p.bs_antenna_gain_db = bs_antenna_gain_db;
  p.noise_dl_dbm = noise_dl_dbm;
  p.noise_bs_dbm = noise_bs_dbm;
  p.rician_k_db = rician_k_db;
  p.si_cancellation_db = si_cancellation_db;
  return p;
}

CellGeometry ExperimentConfig::geometry() const {
  return CellGeometry{inner_radius_m, outer_radius_m};
}

PowerGrid ExperimentConfig::oracle_grid() const {
  PowerGrid g;
  g.levels_per_variable = oracle_levels;
  g.dynamic_range_db = oracle_range_db;
  return g;
}

SolverConfig ExperimentConfig::solver_config(double p_max_dl_dbm_value) const {
  SolverConfig c = SolverConfig::preset(preset);
  c.eta = eta ? *eta : default_penalty_weight(dbm_to_watt(p_max_dl_dbm_value), dbm_to_watt(noise_dl_dbm));
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Splits "46 dBm" or "46dBm" into number and unit.
std::pair<double, std::string> number_and_unit(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(v)) throw ConfigError("'" + key + "': expected a number, got '" + t + "'");
  return {v, trim(std::string(end))};
}

enum class Quantity { Plain, Count, Frequency, PowerDbm, Decibel, Length };

double convert(const std::string& key, const std::string& text, Quantity kind) {
  const auto [v, unit_raw] = number_and_unit(key, text);
  const std::string unit = lower(unit_raw);
  const auto bad = [&]() -> double {
    throw ConfigError("'" + key + "': unit '" + unit_raw + "' not accepted here");
  };
  switch (kind) {
    case Quantity::Plain:
      return unit.empty() ? v : bad();
    case Quantity::Count:
      if (!unit.empty()) return bad();
      if (v < 0.0 || v != std::floor(v)) throw ConfigError("'" + key + "': expected a non-negative integer");
      return v;
    case Quantity::Frequency:
      if (unit.empty() || unit == "hz") return v;
      if (unit == "khz") return v * 1e3;
      if (unit == "mhz") return v * 1e6;
      if (unit == "ghz") return v * 1e9;
      return bad();
    case Quantity::PowerDbm:
      if (unit.empty() || unit == "dbm") return v;
      if (unit == "w" || unit == "mw") {
        const double watt = unit == "w" ? v : v * 1e-3;
        if (!(watt > 0.0)) throw ConfigError("'" + key + "': power must be positive");
        return linear_to_db(watt) + 30.0;
      }
      return bad();
    case Quantity::Decibel:
      if (unit.empty() || unit == "db" || unit == "dbi") return v;
      return bad();
    case Quantity::Length:
      if (unit.empty() || unit == "m") return v;
      if (unit == "km") return v * 1e3;
      return bad();
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError("'" + key + "': expected true or false");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::string sweep_values_text;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    const auto count = [&] { return static_cast<std::size_t>(convert(key, value, Quantity::Count)); };

    if (key == "carrier") c.carrier_hz = convert(key, value, Quantity::Frequency);
    else if (key == "system_bandwidth") c.system_bandwidth_hz = convert(key, value, Quantity::Frequency);
    else if (key == "subcarrier_bandwidth") c.subcarrier_bandwidth_hz = convert(key, value, Quantity::Frequency);
    else if (key == "n_subcarriers") c.n_subcarriers = count();
    else if (key == "pathloss_exponent") c.pathloss_exponent = convert(key, value, Quantity::Plain);
    else if (key == "si_cancellation") c.si_cancellation_db = convert(key, value, Quantity::Decibel);
    else if (key == "noise_dl") c.noise_dl_dbm = convert(key, value, Quantity::PowerDbm);
    else if (key == "noise_bs") c.noise_bs_dbm = convert(key, value, Quantity::PowerDbm);
    else if (key == "p_max_ul") c.p_max_ul_dbm = convert(key, value, Quantity::PowerDbm);
    else if (key == "p_max_dl") c.p_max_dl_dbm = convert(key, value, Quantity::PowerDbm);
    else if (key == "user_sweep_p_max_dl") c.user_sweep_p_max_dl_dbm = convert(key, value, Quantity::PowerDbm);
    else if (key == "bs_antenna_gain") c.bs_antenna_gain_db = convert(key, value, Quantity::Decibel);
    else if (key == "rician_k") c.rician_k_db = convert(key, value, Quantity::Decibel);
    else if (key == "inner_radius") c.inner_radius_m = convert(key, value, Quantity::Length);
    else if (key == "outer_radius") c.outer_radius_m = convert(key, value, Quantity::Length);
    else if (key == "n_dl") c.n_dl = count();
    else if (key == "n_ul") c.n_ul = count();
    else if (key == "users") c.n_dl = c.n_ul = count();
    else if (key == "sweep") {
      const std::string v = lower(value);
      if (v == "none") c.sweep = SweepAxis::None;
      else if (v == "power") c.sweep = SweepAxis::Power;
      else if (v == "users") c.sweep = SweepAxis::Users;
      else throw ConfigError("'sweep': expected none, power or users");
    } else if (key == "sweep_values") sweep_values_text = value;
    else if (key == "schemes") c.schemes = split_list(lower(value));
    else if (key == "trials") c.trials = count();
    else if (key == "threads") c.threads = static_cast<unsigned>(count());
    else if (key == "master_seed") c.master_seed = static_cast<std::uint64_t>(count());
    else if (key == "preset") c.preset = lower(value);
    else if (key == "eta") c.eta = convert(key, value, Quantity::Plain);
    else if (key == "output") c.output = value;
    else if (key == "oracle_levels") c.oracle_levels = static_cast<int>(count());
    else if (key == "oracle_range") c.oracle_range_db = convert(key, value, Quantity::Decibel);
    else if (key == "oracle_cap") c.oracle_cap = convert(key, value, Quantity::Plain);
    else if (key == "interference_free") c.interference_free = parse_bool(key, value);
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  // Sweep values are read last so that their units follow the final axis.
  if (!sweep_values_text.empty()) {
    const Quantity kind = c.sweep == SweepAxis::Users ? Quantity::Count : Quantity::PowerDbm;
    for (const std::string& item : split_list(sweep_values_text)) {
      c.sweep_values.push_back(convert("sweep_values", item, kind));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

ProblemInstance make_instance(const ExperimentConfig& config, std::size_t trial, std::size_t users,
                              double p_max_dl_dbm) {
  RandomStream rng = RandomStream::substream(config.master_seed, trial);
  const std::size_t k = users == 0 ? config.n_dl : users;
  const std::size_t j = users == 0 ? config.n_ul : users;
  const LargeScaleParams params = config.large_scale();
  ChannelGains gains = sample_channel_realization(config.geometry(), params, config.n_subcarriers, k, j, rng);
  double rho = params.rho();
  if (config.interference_free) {
    rho = 0.0;
    for (std::size_t i = 0; i < gains.n_subcarriers(); ++i) {
      for (std::size_t r = 0; r < j; ++r) {
        for (std::size_t m = 0; m < k; ++m) gains.F(i, r, m) = 0.0;
      }
    }
  }
  return ProblemInstance::with_unit_weights(std::move(gains), dbm_to_watt(p_max_dl_dbm),
                                            dbm_to_watt(config.p_max_ul_dbm), rho);
}

SchemeOutcome run_scheme(const std::string& scheme, const ProblemInstance& inst,
                         const SolverConfig& config) {
  SchemeOutcome out;
  try {
    FeasibilityReport feas;
    if (scheme == "proposed") {
      SolveReport rep = solve(inst, config);
      out.allocation = std::move(rep.final_allocation);
      out.iterations = rep.iterations_used;
      feas = std::move(rep.feasibility);
    } else if (scheme == "baseline1" || scheme == "baseline2") {
      BaselineResult res = scheme == "baseline1" ? decoupled_baseline(inst, config) : hd_baseline(inst, config);
      out.allocation = std::move(res.allocation);
      out.iterations = res.iterations;
      feas = std::move(res.feasibility);
    } else if (scheme == "oracle") {
      OracleResult res = brute_force_oracle(inst, PowerGrid{});
      out.allocation = std::move(res.allocation);
      feas = check_feasibility(inst, out.allocation, 1e-6);
    } else {
      throw ConfigError("unknown scheme '" + scheme + "'");
    }
    out.throughput = system_objective(inst, out.allocation);
    out.ok = feas.feasible();
    if (!out.ok) out.error = "allocation violates " + feas.violations.front().constraint;
  } catch (const SizeCapError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

namespace {

// Runs fn(task) for task in [0, n) on `threads` workers. Results are written
// by task index, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < n; t = next++) {
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

SweepResult run_sweep(const ExperimentConfig& config, SweepAxis axis, const ProgressFn& progress) {
  config.validate();
  if (config.sweep_values.empty()) throw ConfigError("sweep needs sweep_values");
  const std::size_t nv = config.sweep_values.size();
  const std::size_t ns = config.schemes.size();
  const std::size_t nt = config.trials;
  std::vector<SchemeOutcome> outcomes(nv * nt * ns);
  std::mutex progress_mutex;

  parallel_for(nv * nt, config.threads, [&](std::size_t task) {
    const std::size_t v = task / nt, t = task % nt;
    const double value = config.sweep_values[v];
    const std::size_t users = axis == SweepAxis::Users ? static_cast<std::size_t>(value) : 0;
    const double p_dbm = axis == SweepAxis::Power ? value : config.user_sweep_p_max_dl_dbm;
    const ProblemInstance inst = make_instance(config, t, users, p_dbm);
    const SolverConfig solver = config.solver_config(p_dbm);
    for (std::size_t s = 0; s < ns; ++s) {
      SchemeOutcome o = run_scheme(config.schemes[s], inst, solver);
      o.allocation = Allocation();  // keep memory flat over long sweeps
      outcomes[(v * nt + t) * ns + s] = std::move(o);
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      std::ostringstream msg;
      msg << "sweep value " << value << " trial " << t + 1 << "/" << nt;
      progress(msg.str());
    }
  });

  SweepResult result;
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t s = 0; s < ns; ++s) {
      ResultRow row;
      row.sweep_value = config.sweep_values[v];
      row.scheme = config.schemes[s];
      double sum = 0.0, sum_sq = 0.0, iters = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        const SchemeOutcome& o = outcomes[(v * nt + t) * ns + s];
        ++result.runs;
        if (!o.ok) {
          ++row.feasibility_failures;
          ++result.failures;
          continue;
        }
        ++row.trials;
        sum += o.throughput;
        sum_sq += o.throughput * o.throughput;
        iters += o.iterations;
      }
      if (row.trials > 0) {
        const double n = static_cast<double>(row.trials);
        row.mean_throughput = sum / n;
        row.mean_iterations = iters / n;
        if (row.trials > 1) {
          const double var = std::max(0.0, (sum_sq - n * row.mean_throughput * row.mean_throughput) / (n - 1.0));
          row.std_error = std::sqrt(var / n);
        }
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace

SweepResult run_power_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_sweep(config, SweepAxis::Power, progress);
}

SweepResult run_user_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_sweep(config, SweepAxis::Users, progress);
}

namespace {

double round_down(const std::vector<double>& levels, double v) {
  double best = 0.0;
  for (double l : levels) {
    if (l <= v * (1.0 + 1e-12)) best = std::max(best, l);
  }
  return best;
}

}  // namespace

OracleCheck run_oracle_check(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const PowerGrid grid = config.oracle_grid();
  {
    ProblemInstance probe = ProblemInstance::with_unit_weights(
        ChannelGains(config.n_subcarriers, config.n_dl, config.n_ul), 1.0, 1.0, 0.0);
    const double budget = oracle_enumeration_budget(probe, grid);
    if (budget > config.oracle_cap) {
      std::ostringstream msg;
      msg << "oracle search space " << budget << " exceeds the cap " << config.oracle_cap;
      throw SizeCapError(msg.str(), budget);
    }
  }
  OracleCheck check;
  check.rows.resize(config.trials);
  std::mutex progress_mutex;
  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    const ProblemInstance inst = make_instance(config, t, 0, config.p_max_dl_dbm);
    const OracleResult oracle = brute_force_oracle(inst, grid, config.oracle_cap);
    const SolveReport rep = solve(inst, config.solver_config(config.p_max_dl_dbm));
    OracleRow row;
    row.instance = t;
    row.oracle_objective = oracle.objective;
    row.sca_objective = rep.weighted_throughput;
    row.ratio = oracle.objective > 0.0 ? rep.weighted_throughput / oracle.objective
                                       : (rep.weighted_throughput > 0.0 ? INFINITY : 1.0);
    Allocation down = rep.final_allocation;
    const std::vector<double> p_levels = grid.values(inst.p_max_dl);
    for (double& p : down.p_data()) p = round_down(p_levels, p);
    for (std::size_t i = 0; i < inst.n_subcarriers(); ++i) {
      for (std::size_t r = 0; r < inst.n_ul(); ++r) {
        down.q(i, r) = round_down(grid.values(inst.p_max_ul[r]), down.q(i, r));
      }
    }
    const double down_value = system_objective(inst, down);
    row.grid_slack = down_value > 0.0 ? rep.weighted_throughput / down_value - 1.0
                                      : (rep.weighted_throughput > 0.0 ? INFINITY : 0.0);
    check.rows[t] = row;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress("oracle instance " + std::to_string(t + 1) + "/" + std::to_string(config.trials));
    }
  });
  std::size_t good = 0;
  for (const OracleRow& r : check.rows) good += r.ratio >= 0.95 ? 1 : 0;
  check.fraction_at_95 = static_cast<double>(good) / static_cast<double>(check.rows.size());
  return check;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "# fdmc-alloc results v1\n";
  out << "sweep_value,scheme,mean_throughput_bps_hz,std_error,trials,mean_iterations,feasibility_failures\n";
  for (const ResultRow& r : rows) {
    out << num(r.sweep_value) << ',' << r.scheme << ',' << num(r.mean_throughput) << ','
        << num(r.std_error) << ',' << r.trials << ',' << num(r.mean_iterations) << ','
        << r.feasibility_failures << '\n';
  }
}

void write_oracle_csv(std::ostream& out, const OracleCheck& check) {
  out << "# fdmc-alloc oracle check v1\n";
  out << "instance,oracle_objective,sca_objective,ratio,grid_slack\n";
  for (const OracleRow& r : check.rows) {
    out << r.instance << ',' << num(r.oracle_objective) << ',' << num(r.sca_objective) << ','
        << num(r.ratio) << ',' << num(r.grid_slack) << '\n';
  }
  out << "summary,fraction_ratio_ge_0.95," << num(check.fraction_at_95) << ",,\n";
}

void write_allocation_csv(std::ostream& out, const ProblemInstance& inst, const Allocation& alloc) {
  out << "# fdmc-alloc allocation v1\n";
  out << "# weighted_throughput_bps_hz=" << num(system_objective(inst, alloc)) << '\n';
  out << "i,m,r,p_watt,q_watt\n";
  for (std::size_t i = 0; i < alloc.n_subcarriers(); ++i) {
    for (std::size_t m = 0; m < alloc.n_dl(); ++m) {
      for (std::size_t r = 0; r < alloc.n_ul(); ++r) {
        if (alloc.s(i, m, r) < 0.5) continue;
        out << i << ',' << m << ',' << r << ',' << num(alloc.p(i, m)) << ',' << num(alloc.q(i, r)) << '\n';
      }
    }
  }
}

}  // namespace fdmc
