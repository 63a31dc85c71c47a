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

#include "fdmc/fdmc.h"

#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "fdmc/bench.hpp"
#include "fdmc/error.hpp"

struct fdmc_config {
  std::string text;
  fdmc::ExperimentConfig config;
};

struct fdmc_instance {
  fdmc::ProblemInstance inst;
};

struct fdmc_report {
  fdmc::ProblemInstance inst;
  fdmc::SolveReport report;
};

struct fdmc_sweep {
  fdmc::SweepResult result;
};

struct fdmc_oracle {
  fdmc::OracleCheck check;
};

namespace {

thread_local std::string g_last_error;

fdmc_status fail(fdmc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the exception in flight onto a status code.
fdmc_status translate() {
  try {
    throw;
  } catch (const fdmc::ConfigError& e) {
    return fail(FDMC_ERR_CONFIG, e.what());
  } catch (const fdmc::SizeCapError& e) {
    return fail(FDMC_ERR_SIZE_CAP, e.what());
  } catch (const fdmc::ParameterError& e) {
    return fail(FDMC_ERR_PARAMETER, e.what());
  } catch (const fdmc::InfeasibleStartError& e) {
    return fail(FDMC_ERR_INFEASIBLE_START, e.what());
  } catch (const fdmc::NumericalError& e) {
    return fail(FDMC_ERR_NUMERICAL, e.what());
  } catch (const fdmc::RoundingError& e) {
    return fail(FDMC_ERR_ROUNDING, e.what());
  } catch (const fdmc::Error& e) {
    return fail(FDMC_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDMC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDMC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FDMC_ERR_INTERNAL, "unknown error");
  }
}

template <class Fn>
fdmc_status guarded(Fn fn) {
  try {
    fn();
    return FDMC_OK;
  } catch (...) {
    return translate();
  }
}

fdmc_status null_argument() { return fail(FDMC_ERR_ARGUMENT, "null argument"); }

template <class Writer>
fdmc_status write_file(const char* path, Writer writer) {
  if (!path) return null_argument();
  std::ostringstream buffer;
  const fdmc_status st = guarded([&] { writer(buffer); });
  if (st != FDMC_OK) return st;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return fail(FDMC_ERR_IO, std::string("cannot open '") + path + "' for writing");
  out << buffer.str();
  out.flush();
  if (!out) return fail(FDMC_ERR_IO, std::string("write to '") + path + "' failed");
  return FDMC_OK;
}

fdmc::ProgressFn wrap(fdmc_progress_fn progress, void* user) {
  if (!progress) return {};
  return [progress, user](const std::string& message) { progress(message.c_str(), user); };
}

}  // namespace

extern "C" {

const char* fdmc_version(void) { return "1.0.0"; }

const char* fdmc_status_string(fdmc_status status) {
  switch (status) {
    case FDMC_OK: return "ok";
    case FDMC_ERR_ARGUMENT: return "invalid argument";
    case FDMC_ERR_CONFIG: return "configuration error";
    case FDMC_ERR_PARAMETER: return "parameter error";
    case FDMC_ERR_INFEASIBLE_START: return "infeasible start";
    case FDMC_ERR_NUMERICAL: return "numerical error";
    case FDMC_ERR_ROUNDING: return "rounding error";
    case FDMC_ERR_SIZE_CAP: return "size cap exceeded";
    case FDMC_ERR_IO: return "i/o error";
    case FDMC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fdmc_last_error(void) { return g_last_error.c_str(); }

fdmc_status fdmc_config_default(fdmc_config** out) {
  if (!out) return null_argument();
  *out = nullptr;
  return guarded([&] { *out = new fdmc_config(); });
}

fdmc_status fdmc_config_parse(const char* text, fdmc_config** out) {
  if (!text || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<fdmc_config>();
    c->text = text;
    if (!c->text.empty() && c->text.back() != '\n') c->text += '\n';
    std::istringstream in(c->text);
    c->config = fdmc::parse_config(in);
    *out = c.release();
  });
}

fdmc_status fdmc_config_load(const char* path, fdmc_config** out) {
  if (!path || !out) return null_argument();
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(FDMC_ERR_CONFIG, std::string("cannot open config file '") + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return fdmc_config_parse(text.str().c_str(), out);
}

fdmc_status fdmc_config_set(fdmc_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_argument();
  return guarded([&] {
    const std::string line = std::string(key) + " = " + value + "\n";
    if (line.find('\n') != line.size() - 1 || line.find('#') != std::string::npos) {
      throw fdmc::ConfigError(std::string("invalid characters in setting '") + key + "'");
    }
    std::string text = config->text + line;
    std::istringstream in(text);
    fdmc::ExperimentConfig parsed = fdmc::parse_config(in);
    config->text = std::move(text);
    config->config = std::move(parsed);
  });
}

fdmc_status fdmc_config_output(const fdmc_config* config, const char** path) {
  if (!config || !path) return null_argument();
  *path = config->config.output.c_str();
  return FDMC_OK;
}

fdmc_status fdmc_config_sweep_axis(const fdmc_config* config, fdmc_sweep_axis* axis) {
  if (!config || !axis) return null_argument();
  switch (config->config.sweep) {
    case fdmc::SweepAxis::None: *axis = FDMC_SWEEP_NONE; break;
    case fdmc::SweepAxis::Power: *axis = FDMC_SWEEP_POWER; break;
    case fdmc::SweepAxis::Users: *axis = FDMC_SWEEP_USERS; break;
  }
  return FDMC_OK;
}

void fdmc_config_free(fdmc_config* config) { delete config; }

fdmc_status fdmc_instance_sample(const fdmc_config* config, size_t trial, fdmc_instance** out) {
  if (!config || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    const auto& c = config->config;
    *out = new fdmc_instance{fdmc::make_instance(c, trial, 0, c.p_max_dl_dbm)};
  });
}

fdmc_status fdmc_instance_create(size_t n_subcarriers, size_t n_dl, size_t n_ul, const double* h,
                                 const double* g, const double* f, const double* l_si,
                                 double p_max_dl, double p_max_ul, double rho,
                                 fdmc_instance** out) {
  if (!h || !g || !f || !l_si || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    if (n_subcarriers == 0 || n_dl == 0 || n_ul == 0) throw fdmc::ParameterError("dimensions must be >= 1");
    fdmc::ChannelGains gains(n_subcarriers, n_dl, n_ul);
    for (size_t i = 0; i < n_subcarriers; ++i) {
      for (size_t m = 0; m < n_dl; ++m) gains.H(i, m) = h[i * n_dl + m];
      for (size_t r = 0; r < n_ul; ++r) {
        gains.G(i, r) = g[i * n_ul + r];
        for (size_t m = 0; m < n_dl; ++m) gains.F(i, r, m) = f[(i * n_ul + r) * n_dl + m];
      }
      gains.L_SI(i) = l_si[i];
    }
    auto inst = fdmc::ProblemInstance::with_unit_weights(std::move(gains), p_max_dl, p_max_ul, rho);
    inst.validate();
    *out = new fdmc_instance{std::move(inst)};
  });
}

fdmc_status fdmc_instance_dims(const fdmc_instance* inst, size_t* n_subcarriers, size_t* n_dl,
                               size_t* n_ul) {
  if (!inst) return null_argument();
  if (n_subcarriers) *n_subcarriers = inst->inst.n_subcarriers();
  if (n_dl) *n_dl = inst->inst.n_dl();
  if (n_ul) *n_ul = inst->inst.n_ul();
  return FDMC_OK;
}

fdmc_status fdmc_instance_write_channels(const fdmc_instance* inst, const char* path) {
  if (!inst) return null_argument();
  return write_file(path, [&](std::ostream& out) { fdmc::write_channels_csv(out, inst->inst.gains); });
}

void fdmc_instance_free(fdmc_instance* inst) { delete inst; }

fdmc_status fdmc_solve(const fdmc_instance* inst, const fdmc_config* config, fdmc_report** out) {
  if (!inst || !config || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    const auto& c = config->config;
    fdmc::SolveReport rep = fdmc::solve(inst->inst, c.solver_config(c.p_max_dl_dbm));
    *out = new fdmc_report{inst->inst, std::move(rep)};
  });
}

double fdmc_report_throughput(const fdmc_report* report) {
  return report ? report->report.weighted_throughput : 0.0;
}

int fdmc_report_iterations(const fdmc_report* report) {
  return report ? report->report.iterations_used : 0;
}

int fdmc_report_converged(const fdmc_report* report) {
  return report && report->report.converged ? 1 : 0;
}

int fdmc_report_feasible(const fdmc_report* report) {
  return report && report->report.feasibility.feasible() ? 1 : 0;
}

double fdmc_report_max_binary_deviation(const fdmc_report* report) {
  return report ? report->report.max_binary_deviation : 0.0;
}

double fdmc_report_eta(const fdmc_report* report) { return report ? report->report.eta : 0.0; }

fdmc_status fdmc_report_pair(const fdmc_report* report, size_t i, int* m, int* r) {
  if (!report || !m || !r) return null_argument();
  const fdmc::Allocation& a = report->report.final_allocation;
  if (i >= a.n_subcarriers()) return fail(FDMC_ERR_ARGUMENT, "subcarrier index out of range");
  *m = -1;
  *r = -1;
  for (size_t mm = 0; mm < a.n_dl(); ++mm) {
    for (size_t rr = 0; rr < a.n_ul(); ++rr) {
      if (a.s(i, mm, rr) >= 0.5) {
        *m = static_cast<int>(mm);
        *r = static_cast<int>(rr);
      }
    }
  }
  return FDMC_OK;
}

fdmc_status fdmc_report_powers(const fdmc_report* report, size_t i, double* p_dl, double* q_ul) {
  int m = -1, r = -1;
  const fdmc_status st = fdmc_report_pair(report, i, &m, &r);
  if (st != FDMC_OK) return st;
  if (!p_dl || !q_ul) return null_argument();
  const fdmc::Allocation& a = report->report.final_allocation;
  *p_dl = m < 0 ? 0.0 : a.p(i, static_cast<size_t>(m));
  *q_ul = r < 0 ? 0.0 : a.q(i, static_cast<size_t>(r));
  return FDMC_OK;
}

fdmc_status fdmc_report_write_allocation(const fdmc_report* report, const char* path) {
  if (!report) return null_argument();
  return write_file(path, [&](std::ostream& out) {
    fdmc::write_allocation_csv(out, report->inst, report->report.final_allocation);
  });
}

fdmc_status fdmc_report_write_trace(const fdmc_report* report, const char* path) {
  if (!report) return null_argument();
  return write_file(path, [&](std::ostream& out) { fdmc::write_trace(out, report->report); });
}

void fdmc_report_free(fdmc_report* report) { delete report; }

fdmc_status fdmc_sweep_run(const fdmc_config* config, fdmc_sweep_axis axis,
                           fdmc_progress_fn progress, void* user, fdmc_sweep** out) {
  if (!config || !out) return null_argument();
  *out = nullptr;
  if (axis != FDMC_SWEEP_POWER && axis != FDMC_SWEEP_USERS) {
    return fail(FDMC_ERR_ARGUMENT, "unknown sweep axis");
  }
  return guarded([&] {
    const fdmc::ProgressFn fn = wrap(progress, user);
    fdmc::SweepResult result = axis == FDMC_SWEEP_POWER ? fdmc::run_power_sweep(config->config, fn)
                                                        : fdmc::run_user_sweep(config->config, fn);
    *out = new fdmc_sweep{std::move(result)};
  });
}

size_t fdmc_sweep_rows(const fdmc_sweep* sweep) { return sweep ? sweep->result.rows.size() : 0; }

fdmc_status fdmc_sweep_row(const fdmc_sweep* sweep, size_t row, double* sweep_value,
                           const char** scheme, double* mean_throughput, double* std_error,
                           size_t* trials) {
  if (!sweep) return null_argument();
  if (row >= sweep->result.rows.size()) return fail(FDMC_ERR_ARGUMENT, "row index out of range");
  const fdmc::ResultRow& r = sweep->result.rows[row];
  if (sweep_value) *sweep_value = r.sweep_value;
  if (scheme) *scheme = r.scheme.c_str();
  if (mean_throughput) *mean_throughput = r.mean_throughput;
  if (std_error) *std_error = r.std_error;
  if (trials) *trials = r.trials;
  return FDMC_OK;
}

size_t fdmc_sweep_failures(const fdmc_sweep* sweep) { return sweep ? sweep->result.failures : 0; }

int fdmc_sweep_failure_threshold_exceeded(const fdmc_sweep* sweep) {
  return sweep && sweep->result.failure_threshold_exceeded() ? 1 : 0;
}

fdmc_status fdmc_sweep_write_csv(const fdmc_sweep* sweep, const char* path) {
  if (!sweep) return null_argument();
  return write_file(path, [&](std::ostream& out) { fdmc::write_results_csv(out, sweep->result.rows); });
}

void fdmc_sweep_free(fdmc_sweep* sweep) { delete sweep; }

fdmc_status fdmc_oracle_run(const fdmc_config* config, fdmc_progress_fn progress, void* user,
                            fdmc_oracle** out) {
  if (!config || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    *out = new fdmc_oracle{fdmc::run_oracle_check(config->config, wrap(progress, user))};
  });
}

double fdmc_oracle_fraction_at_95(const fdmc_oracle* oracle) {
  return oracle ? oracle->check.fraction_at_95 : 0.0;
}

fdmc_status fdmc_oracle_write_csv(const fdmc_oracle* oracle, const char* path) {
  if (!oracle) return null_argument();
  return write_file(path, [&](std::ostream& out) { fdmc::write_oracle_csv(out, oracle->check); });
}

void fdmc_oracle_free(fdmc_oracle* oracle) { delete oracle; }

}  // extern "C"
