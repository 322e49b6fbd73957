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


#include <cmath>
#include <memory>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "qbm/config.hpp"
#include "qbm/error.hpp"
#include "qbm/experiment.hpp"
#include "qbm/master_equation.hpp"
#include "qbm/observables.hpp"
#include "qbm/qsd.hpp"

using namespace qbm;

namespace {

ExperimentConfig small_config(double t_end, double dt) {
  ExperimentConfig c;
  c.Omega = 1.0;
  c.trunc = TruncationSpec{2};
  c.bath.Gamma = 1.0;
  c.bath.gamma_env = 3.0;
  c.t_end = t_end;
  c.dt = dt;
  c.initial = TwoModeSqueezedState{0.1};
  return c;
}

QsdProblem problem_from(const ExperimentConfig& c, QsdKind kind, std::size_t stride) {
  const PreparedDynamics dyn = prepare_dynamics(c);
  QsdProblem p;
  p.kind = kind;
  p.psi0 = prepare_state(c.initial, c.trunc);
  p.t_end = c.t_end;
  p.dt = c.dt;
  p.coefficient = dyn.coefficient;
  p.kernel = dyn.kernel;
  p.Omega = c.Omega;
  p.stride = stride;
  return p;
}

}  // namespace

TEST_CASE("vacuum is stationary under both QSD flows") {
  const ModeOperators ops(TruncationSpec{3});
  Ket vac = Ket::Zero(ops.trunc.dim());
  vac[0] = 1.0;
  const Operator H = ops.hamiltonian(1.0, 0.0);
  CHECK(linear_qsd_rhs(vac, 0.0, cd(0.5, 0.1), H, ops.L, ops.LdagL).norm() == 0.0);
  CHECK(nonlinear_qsd_rhs(vac, 0.0, cd(0.5, 0.1), H, ops.L, ops.LdagL).norm() == 0.0);
}

TEST_CASE("shifted noise with vanishing history") {
  CorrelationKernel k;
  k.dt = 0.01;
  k.values.assign(11, cd(1.5, 0.0));
  k.exponential_rate = 0.0;
  CHECK(shifted_noise(cd(0.3, -0.2), {}, 0.01, k) == cd(0.3, -0.2));
  CHECK(shifted_noise(cd(0.3, -0.2), std::vector<cd>(5, cd{}), 0.01, k) == cd(0.3, -0.2));
}

TEST_CASE("memory integral recursion matches the generic sum") {
  BathSpec bath;
  bath.Gamma = 1.0;
  bath.gamma_env = 3.0;
  const double h = 0.01;
  const CorrelationKernel k = make_kernel(bath, TimeGrid::covering(1.0, h / 2));
  MemoryIntegral fast(k, h);
  MemoryIntegral slow(k, h, true);
  CHECK(fast.uses_recursion());
  CHECK(!slow.uses_recursion());
  for (int j = 0; j < 60; ++j) {
    const cd m(std::sin(0.1 * j), std::cos(0.07 * j));
    fast.push(m);
    slow.push(m);
    const cd trial(0.2, 0.1 * j);
    CHECK(std::abs(fast.value_at(0.0, trial) - slow.value_at(0.0, trial)) < 1e-12);
    CHECK(std::abs(fast.value_at(h / 2, trial) - slow.value_at(h / 2, trial)) < 1e-12);
  }
}

TEST_CASE("closed trajectory conserves the norm") {
  ExperimentConfig c = small_config(2.0, 1e-3);
  c.bath.Gamma = 0.0;
  QsdProblem p = problem_from(c, QsdKind::Linear, 100);
  p.zero_noise = true;
  const QsdIntegrator integrator(p, c.trunc);
  double drift = 0.0;
  integrator.run(0, 0, [&](std::size_t, double, const Ket& psi) { drift = std::max(drift, std::abs(psi.norm() - 1.0)); });
  CHECK(drift < 1e-8);
}

TEST_CASE("single deterministic trajectory reproduces the unitary projector") {
  ExperimentConfig c = small_config(1.0, 1e-3);
  c.bath.Gamma = 0.0;
  c.control = ControlSchedule(ConstantControl{0.05});
  QsdProblem p = problem_from(c, QsdKind::Linear, 1000);
  p.zero_noise = true;
  p.schedule = c.control;
  const QsdIntegrator integrator(p, c.trunc);
  EnsembleOptions opts;
  opts.count = 1;
  opts.workers = 1;
  opts.leakage_limit = 1.0;
  const EnsembleResult r = run_ensemble(integrator, opts);
  const DenseMatrix U = (DenseMatrix(cd(0.0, -1.0) * DenseMatrix(integrator.operators().hamiltonian(1.0, 0.05)))).exp();
  const Ket psi = U * p.psi0;
  CHECK((r.rho_mean.back() - psi * psi.adjoint()).norm() < 1e-9);
}

TEST_CASE("nonlinear trajectory keeps its norm") {
  ExperimentConfig c = small_config(10.0, 1e-3);
  c.trunc = TruncationSpec{3};
  c.initial = TwoModeSqueezedState{0.3};
  const QsdIntegrator integrator(problem_from(c, QsdKind::Nonlinear, 1000), c.trunc);
  const TrajectoryOutcome out = integrator.run(5, 0, nullptr);
  CHECK(out.ok);
  CHECK(out.max_norm_drift < 1e-3);
}

TEST_CASE("ensemble is deterministic for a fixed seed") {
  const ExperimentConfig c = small_config(0.5, 1e-2);
  const QsdIntegrator integrator(problem_from(c, QsdKind::Nonlinear, 10), c.trunc);
  EnsembleOptions opts;
  opts.count = 64;
  opts.seed = 17;
  opts.workers = 2;
  const EnsembleResult a = run_ensemble(integrator, opts);
  opts.workers = 3;
  const EnsembleResult b = run_ensemble(integrator, opts);
  REQUIRE(a.rho_mean.size() == b.rho_mean.size());
  for (std::size_t s = 0; s < a.rho_mean.size(); ++s) {
    CHECK(a.rho_mean[s] == b.rho_mean[s]);
    CHECK(a.standard_error[s] == b.standard_error[s]);
  }
}

TEST_CASE("standard error scales as one over root count") {
  const ExperimentConfig c = small_config(0.5, 1e-2);
  const QsdIntegrator integrator(problem_from(c, QsdKind::Linear, 50), c.trunc);
  std::vector<double> se;
  for (std::size_t count : {1000u, 2000u, 4000u}) {
    EnsembleOptions opts;
    opts.count = count;
    opts.seed = 3;
    se.push_back(run_ensemble(integrator, opts).standard_error.back());
  }
  CHECK(se[1] / se[0] == doctest::Approx(M_SQRT1_2).epsilon(0.2));
  CHECK(se[2] / se[1] == doctest::Approx(M_SQRT1_2).epsilon(0.2));
}

TEST_CASE("ensemble mean agrees with the master equation") {
  const ExperimentConfig c = small_config(0.5, 1e-2);
  const PreparedDynamics dyn = prepare_dynamics(c);
  const QsdIntegrator integrator(problem_from(c, QsdKind::Linear, 10), c.trunc);
  EnsembleOptions opts;
  opts.count = 2000;
  opts.seed = 8;
  const EnsembleResult r = run_ensemble(integrator, opts);
  MasterRun run;
  run.rho0 = integrator.problem().psi0 * integrator.problem().psi0.adjoint();
  run.t1 = c.t_end;
  run.dt = c.dt;
  run.stride = 10;
  run.coefficient = dyn.coefficient;
  run.Omega = c.Omega;
  const MasterSnapshots m = integrate_master(run, integrator.operators());
  REQUIRE(m.states.size() == r.rho_mean.size());
  for (std::size_t s = 0; s < m.states.size(); ++s) CHECK(trace_distance(m.states[s], r.rho_mean[s]) < 0.05);
}

TEST_CASE("qsd integrator validates its grids") {
  const ExperimentConfig c = small_config(0.5, 1e-2);
  QsdProblem p = problem_from(c, QsdKind::Linear, 10);
  p.dt = 2e-2;
  CHECK_THROWS_AS(QsdIntegrator(p, c.trunc), Error);
}
