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

/* C interface to the fdmc-alloc solver and experiment harness. All objects
 * are opaque handles released with their matching _free function. Every
 * call that can fail returns an fdmc_status; the message of the most recent
 * failure on the calling thread is available from fdmc_last_error(). */
#ifndef FDMC_FDMC_H
#define FDMC_FDMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FDMC_API __declspec(dllexport)
#else
#define FDMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdmc_status {
  FDMC_OK = 0,
  FDMC_ERR_ARGUMENT = 1,         /* null handle or index out of range */
  FDMC_ERR_CONFIG = 2,           /* malformed or invalid configuration */
  FDMC_ERR_PARAMETER = 3,        /* invalid problem data */
  FDMC_ERR_INFEASIBLE_START = 4, /* no strictly feasible start point */
  FDMC_ERR_NUMERICAL = 5,        /* Newton or factorization failure */
  FDMC_ERR_ROUNDING = 6,         /* relaxed assignment is not binary */
  FDMC_ERR_SIZE_CAP = 7,         /* oracle search space over the cap */
  FDMC_ERR_IO = 8,               /* file could not be written */
  FDMC_ERR_INTERNAL = 9
} fdmc_status;

typedef enum fdmc_sweep_axis {
  FDMC_SWEEP_NONE = 0,
  FDMC_SWEEP_POWER = 1,
  FDMC_SWEEP_USERS = 2
} fdmc_sweep_axis;

typedef struct fdmc_config fdmc_config;
typedef struct fdmc_instance fdmc_instance;
typedef struct fdmc_report fdmc_report;
typedef struct fdmc_sweep fdmc_sweep;
typedef struct fdmc_oracle fdmc_oracle;

/* Called once per finished trial with a short progress message. */
typedef void (*fdmc_progress_fn)(const char* message, void* user);

FDMC_API const char* fdmc_version(void);
FDMC_API const char* fdmc_status_string(fdmc_status status);
FDMC_API const char* fdmc_last_error(void);

/* Configuration: flat "key = value" text with '#' comments. */
FDMC_API fdmc_status fdmc_config_default(fdmc_config** out);
FDMC_API fdmc_status fdmc_config_load(const char* path, fdmc_config** out);
FDMC_API fdmc_status fdmc_config_parse(const char* text, fdmc_config** out);
/* Applies one "key = value" setting on top of the current contents. */
FDMC_API fdmc_status fdmc_config_set(fdmc_config* config, const char* key, const char* value);
FDMC_API fdmc_status fdmc_config_output(const fdmc_config* config, const char** path);
FDMC_API fdmc_status fdmc_config_sweep_axis(const fdmc_config* config, fdmc_sweep_axis* axis);
FDMC_API void fdmc_config_free(fdmc_config* config);

/* Seeded drop plus fading for one trial at the configured sizes and DL
 * budget. */
FDMC_API fdmc_status fdmc_instance_sample(const fdmc_config* config, size_t trial,
                                          fdmc_instance** out);
/* Instance from explicit gains with unit weights. Layouts: h[i*K+m],
 * g[i*J+r], f[(i*J+r)*K+m], l_si[i]. Powers in watts. */
FDMC_API fdmc_status fdmc_instance_create(size_t n_subcarriers, size_t n_dl, size_t n_ul,
                                          const double* h, const double* g, const double* f,
                                          const double* l_si, double p_max_dl, double p_max_ul,
                                          double rho, fdmc_instance** out);
FDMC_API fdmc_status fdmc_instance_dims(const fdmc_instance* inst, size_t* n_subcarriers,
                                        size_t* n_dl, size_t* n_ul);
FDMC_API fdmc_status fdmc_instance_write_channels(const fdmc_instance* inst, const char* path);
FDMC_API void fdmc_instance_free(fdmc_instance* inst);

/* Proposed full-duplex SCA solve with the config's preset and penalty. */
FDMC_API fdmc_status fdmc_solve(const fdmc_instance* inst, const fdmc_config* config,
                                fdmc_report** out);
FDMC_API double fdmc_report_throughput(const fdmc_report* report);
FDMC_API int fdmc_report_iterations(const fdmc_report* report);
FDMC_API int fdmc_report_converged(const fdmc_report* report);
FDMC_API int fdmc_report_feasible(const fdmc_report* report);
FDMC_API double fdmc_report_max_binary_deviation(const fdmc_report* report);
FDMC_API double fdmc_report_eta(const fdmc_report* report);
/* Pair served on subcarrier i, or -1 when the subcarrier is idle. */
FDMC_API fdmc_status fdmc_report_pair(const fdmc_report* report, size_t i, int* m, int* r);
FDMC_API fdmc_status fdmc_report_powers(const fdmc_report* report, size_t i, double* p_dl,
                                        double* q_ul);
FDMC_API fdmc_status fdmc_report_write_allocation(const fdmc_report* report, const char* path);
FDMC_API fdmc_status fdmc_report_write_trace(const fdmc_report* report, const char* path);
FDMC_API void fdmc_report_free(fdmc_report* report);

/* Monte Carlo sweeps over the configured values. */
FDMC_API fdmc_status fdmc_sweep_run(const fdmc_config* config, fdmc_sweep_axis axis,
                                    fdmc_progress_fn progress, void* user, fdmc_sweep** out);
FDMC_API size_t fdmc_sweep_rows(const fdmc_sweep* sweep);
FDMC_API fdmc_status fdmc_sweep_row(const fdmc_sweep* sweep, size_t row, double* sweep_value,
                                    const char** scheme, double* mean_throughput,
                                    double* std_error, size_t* trials);
FDMC_API size_t fdmc_sweep_failures(const fdmc_sweep* sweep);
FDMC_API int fdmc_sweep_failure_threshold_exceeded(const fdmc_sweep* sweep);
FDMC_API fdmc_status fdmc_sweep_write_csv(const fdmc_sweep* sweep, const char* path);
FDMC_API void fdmc_sweep_free(fdmc_sweep* sweep);

/* Brute-force grid oracle against the SCA solve on seeded instances. */
FDMC_API fdmc_status fdmc_oracle_run(const fdmc_config* config, fdmc_progress_fn progress,
                                     void* user, fdmc_oracle** out);
FDMC_API double fdmc_oracle_fraction_at_95(const fdmc_oracle* oracle);
FDMC_API fdmc_status fdmc_oracle_write_csv(const fdmc_oracle* oracle, const char* path);
FDMC_API void fdmc_oracle_free(fdmc_oracle* oracle);

#ifdef __cplusplus
}
#endif

#endif /* FDMC_FDMC_H */
