// Copyright 2026 The qbm Authors
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

/* C interface to the qbm simulation library. All functions are thread-safe
 * except that a single qbm_experiment handle must not be used from two
 * threads at once. On failure a function returns a non-zero qbm_status and
 * qbm_last_error() describes the problem for the calling thread. */
#ifndef QBM_QBM_H
#define QBM_QBM_H

#include <stddef.h>
#include <stdint.h>

#if defined(QBM_BUILDING_LIBRARY)
#define QBM_API __attribute__((visibility("default")))
#else
#define QBM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qbm_status {
  QBM_OK = 0,
  QBM_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum, short buffer */
  QBM_ERR_CONFIG = 2,           /* configuration failed validation */
  QBM_ERR_DOMAIN = 3,           /* input outside the model's domain (poles, degenerate roots, ...) */
  QBM_ERR_NUMERICAL = 4,        /* quadrature or solver did not converge */
  QBM_ERR_TRUNCATION = 5,       /* Fock cutoff too small */
  QBM_ERR_IO = 6,
  QBM_ERR_RUN = 7, /* run aborted: drift, too many failed trajectories */
  QBM_ERR_INTERNAL = 8
} qbm_status;

typedef enum qbm_mode {
  QBM_MODE_MASTER = 0,
  QBM_MODE_QSD = 1,
  QBM_MODE_GAUSSIAN = 2,
  QBM_MODE_COMPARE = 3,
  QBM_MODE_SWEEP = 4
} qbm_mode;

typedef enum qbm_qsd_solver { QBM_QSD_LINEAR = 0, QBM_QSD_NONLINEAR = 1 } qbm_qsd_solver;

typedef enum qbm_markovianity { QBM_MARKOVIAN = 0, QBM_NON_MARKOVIAN = 1 } qbm_markovianity;

typedef struct qbm_experiment qbm_experiment;
typedef struct qbm_coefficients qbm_coefficients;

QBM_API const char* qbm_version(void);
QBM_API const char* qbm_last_error(void);

/* Experiments. */
QBM_API qbm_status qbm_experiment_load_file(const char* path, qbm_experiment** out);
QBM_API qbm_status qbm_experiment_load_string(const char* json, qbm_experiment** out);
QBM_API void qbm_experiment_free(qbm_experiment* exp);
QBM_API qbm_status qbm_experiment_set_seed(qbm_experiment* exp, uint64_t seed);
QBM_API qbm_status qbm_experiment_set_trajectories(qbm_experiment* exp, uint64_t count);
QBM_API qbm_status qbm_experiment_set_workers(qbm_experiment* exp, unsigned workers);
QBM_API qbm_status qbm_experiment_set_qsd_solver(qbm_experiment* exp, qbm_qsd_solver solver);
/* Writes the canonical JSON echo into buf (NUL-terminated). */
QBM_API qbm_status qbm_experiment_config_json(const qbm_experiment* exp, char* buf, size_t len);
/* out_dir may be NULL for the default run directory. The directory actually
 * used is copied into run_dir (may be NULL). */
QBM_API qbm_status qbm_experiment_run(qbm_experiment* exp, qbm_mode mode, const char* out_dir, char* run_dir,
                                      size_t run_dir_len);

/* Memory coefficient F(t) for the Lorentzian bath. */
QBM_API qbm_status qbm_analytic_F(double Gamma, double gamma, double Omega, double t, double* re, double* im);
QBM_API qbm_status qbm_classify(double Gamma, double gamma, double Omega, qbm_markovianity* out);
QBM_API qbm_status qbm_coefficients_lorentzian(double Gamma, double gamma, double Omega, double t_end, double dt,
                                               qbm_coefficients** out);
QBM_API size_t qbm_coefficients_size(const qbm_coefficients* c);
QBM_API qbm_status qbm_coefficients_get(const qbm_coefficients* c, size_t index, double* t, double* re, double* im);
QBM_API void qbm_coefficients_free(qbm_coefficients* c);

/* Logarithmic negativity of a 4x4 row-major covariance matrix over
 * (x1, p1, x2, p2), vacuum = identity / 2. */
QBM_API qbm_status qbm_log_negativity_cm(const double* sigma, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QBM_QBM_H */
