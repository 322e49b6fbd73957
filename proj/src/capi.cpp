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

#include "qbm/qbm.h"

#include <cstring>
#include <new>
#include <string>

#include "qbm/coefficients.hpp"
#include "qbm/config.hpp"
#include "qbm/error.hpp"
#include "qbm/experiment.hpp"
#include "qbm/gaussian.hpp"

struct qbm_experiment {
  qbm::ExperimentConfig config;
};

struct qbm_coefficients {
  qbm::CoefficientTrajectory trajectory;
};

namespace {

thread_local std::string g_last_error;

qbm_status translate(qbm::ErrorCode code) {
  using qbm::ErrorCode;
  switch (code) {
    case ErrorCode::Config: return QBM_ERR_CONFIG;
    case ErrorCode::Domain:
    case ErrorCode::DegenerateRoots:
    case ErrorCode::SingularGenerator:
    case ErrorCode::KernelValidity: return QBM_ERR_DOMAIN;
    case ErrorCode::Numerical:
    case ErrorCode::Convergence: return QBM_ERR_NUMERICAL;
    case ErrorCode::Truncation: return QBM_ERR_TRUNCATION;
    case ErrorCode::Run: return QBM_ERR_RUN;
    case ErrorCode::Io: return QBM_ERR_IO;
  }
  return QBM_ERR_INTERNAL;
}

qbm_status fail(qbm_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` and converts any exception into a status code.
template <typename Body>
qbm_status guarded(Body&& body) {
  try {
    g_last_error.clear();
    body();
    return QBM_OK;
  } catch (const qbm::Error& e) {
    return fail(translate(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QBM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QBM_ERR_INTERNAL, e.what());
  }
}

qbm_status copy_out(const std::string& s, char* buf, size_t len) {
  if (!buf) return QBM_OK;
  if (s.size() + 1 > len) return fail(QBM_ERR_INVALID_ARGUMENT, "output buffer too small (" + std::to_string(s.size() + 1) + " bytes needed)");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return QBM_OK;
}

}  // namespace

extern "C" {

const char* qbm_version(void) { return QBM_VERSION_STRING; }

const char* qbm_last_error(void) { return g_last_error.c_str(); }

qbm_status qbm_experiment_load_file(const char* path, qbm_experiment** out) {
  if (!path || !out) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new qbm_experiment{qbm::load_config(path)}; });
}

qbm_status qbm_experiment_load_string(const char* json, qbm_experiment** out) {
  if (!json || !out) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new qbm_experiment{qbm::parse_config(json)}; });
}

void qbm_experiment_free(qbm_experiment* exp) { delete exp; }

qbm_status qbm_experiment_set_seed(qbm_experiment* exp, uint64_t seed) {
  if (!exp) return fail(QBM_ERR_INVALID_ARGUMENT, "null experiment");
  exp->config.seed = seed;
  return QBM_OK;
}

qbm_status qbm_experiment_set_trajectories(qbm_experiment* exp, uint64_t count) {
  if (!exp) return fail(QBM_ERR_INVALID_ARGUMENT, "null experiment");
  if (count == 0) return fail(QBM_ERR_CONFIG, "ensemble.trajectories: must be >= 1");
  exp->config.trajectories = static_cast<std::size_t>(count);
  return QBM_OK;
}

qbm_status qbm_experiment_set_workers(qbm_experiment* exp, unsigned workers) {
  if (!exp) return fail(QBM_ERR_INVALID_ARGUMENT, "null experiment");
  exp->config.workers = workers;
  return QBM_OK;
}

qbm_status qbm_experiment_set_qsd_solver(qbm_experiment* exp, qbm_qsd_solver solver) {
  if (!exp) return fail(QBM_ERR_INVALID_ARGUMENT, "null experiment");
  if (solver != QBM_QSD_LINEAR && solver != QBM_QSD_NONLINEAR) return fail(QBM_ERR_INVALID_ARGUMENT, "bad solver");
  exp->config.qsd_solver = solver == QBM_QSD_LINEAR ? qbm::QsdSolver::Linear : qbm::QsdSolver::Nonlinear;
  return QBM_OK;
}

qbm_status qbm_experiment_config_json(const qbm_experiment* exp, char* buf, size_t len) {
  if (!exp || !buf) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  return copy_out(qbm::config_to_json(exp->config), buf, len);
}

qbm_status qbm_experiment_run(qbm_experiment* exp, qbm_mode mode, const char* out_dir, char* run_dir,
                              size_t run_dir_len) {
  if (!exp) return fail(QBM_ERR_INVALID_ARGUMENT, "null experiment");
  qbm::RunMode m;
  switch (mode) {
    case QBM_MODE_MASTER: m = qbm::RunMode::Master; break;
    case QBM_MODE_QSD: m = qbm::RunMode::Qsd; break;
    case QBM_MODE_GAUSSIAN: m = qbm::RunMode::Gaussian; break;
    case QBM_MODE_COMPARE: m = qbm::RunMode::Compare; break;
    case QBM_MODE_SWEEP: m = qbm::RunMode::Sweep; break;
    default: return fail(QBM_ERR_INVALID_ARGUMENT, "unknown run mode");
  }
  std::string used;
  const qbm_status st = guarded([&] {
    used = qbm::run_experiment(exp->config, m, out_dir ? std::filesystem::path(out_dir) : std::filesystem::path{})
               .string();
  });
  if (st != QBM_OK) return st;
  return copy_out(used, run_dir, run_dir_len);
}

qbm_status qbm_analytic_F(double Gamma, double gamma, double Omega, double t, double* re, double* im) {
  if (!re || !im) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const qbm::cd F = qbm::analytic_F(qbm::CoefficientSpec{Gamma, gamma, Omega}, t);
    *re = F.real();
    *im = F.imag();
  });
}

qbm_status qbm_classify(double Gamma, double gamma, double Omega, qbm_markovianity* out) {
  if (!out) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const qbm::CoefficientSpec spec{Gamma, gamma, Omega};
    spec.validate();
    *out = qbm::classify_markovianity(spec) == qbm::Markovianity::Markovian ? QBM_MARKOVIAN : QBM_NON_MARKOVIAN;
  });
}

qbm_status qbm_coefficients_lorentzian(double Gamma, double gamma, double Omega, double t_end, double dt,
                                       qbm_coefficients** out) {
  if (!out) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const qbm::TimeGrid grid = qbm::TimeGrid::covering(t_end, dt);
    *out = new qbm_coefficients{qbm::lorentzian_coefficients(qbm::CoefficientSpec{Gamma, gamma, Omega}, grid)};
  });
}

size_t qbm_coefficients_size(const qbm_coefficients* c) { return c ? c->trajectory.size() : 0; }

qbm_status qbm_coefficients_get(const qbm_coefficients* c, size_t index, double* t, double* re, double* im) {
  if (!c) return fail(QBM_ERR_INVALID_ARGUMENT, "null coefficients");
  if (index >= c->trajectory.size()) return fail(QBM_ERR_INVALID_ARGUMENT, "index out of range");
  const qbm::cd F = c->trajectory.F(index);
  if (t) *t = c->trajectory.time(index);
  if (re) *re = F.real();
  if (im) *im = F.imag();
  return QBM_OK;
}

void qbm_coefficients_free(qbm_coefficients* c) { delete c; }

qbm_status qbm_log_negativity_cm(const double* sigma, double* out) {
  if (!sigma || !out) return fail(QBM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qbm::Matrix4 s;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s(i, j) = sigma[4 * i + j];
    if (!qbm::is_physical(s)) throw qbm::Error(qbm::ErrorCode::Domain, "covariance matrix is not physical");
    *out = qbm::log_negativity_cm(s);
  });
}

}  // extern "C"
