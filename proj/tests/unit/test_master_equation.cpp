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
#include "qbm/coefficients.hpp"
#include "qbm/error.hpp"
#include "qbm/master_equation.hpp"

using namespace qbm;

namespace {

std::shared_ptr<const CoefficientTrajectory> constant_F(cd F, double t_end, double h) {
  const TimeGrid grid = TimeGrid::covering(t_end, h);
  std::vector<cd> values(grid.size(), F);
  std::vector<cd> amplitude(grid.size(), cd(1.0, 0.0));
  return std::make_shared<CoefficientTrajectory>(grid, values, amplitude);
}

std::shared_ptr<const CoefficientTrajectory> lorentzian(double Gamma, double gamma_env, double Omega, double t_end,
                                                        double h) {
  CoefficientSpec s;
  s.Gamma = Gamma;
  s.gamma_env = gamma_env;
  s.Omega = Omega;
  return std::make_shared<CoefficientTrajectory>(lorentzian_coefficients(s, TimeGrid::covering(t_end, h)));
}

DensityMatrix projector(const Ket& psi) { return psi * psi.adjoint(); }

}  // namespace

TEST_CASE("vacuum is stationary") {
  const ModeOperators ops(TruncationSpec{3});
  Ket vac = Ket::Zero(ops.trunc.dim());
  vac[0] = 1.0;
  CHECK(me_rhs(projector(vac), cd(0.7, -0.3), 0.0, 1.0, ops).norm() < 1e-15);
}

TEST_CASE("right-hand side is traceless") {
  const ModeOperators ops(TruncationSpec{3});
  DenseMatrix m = DenseMatrix::Random(ops.trunc.dim(), ops.trunc.dim());
  const DensityMatrix rho = m + m.adjoint();
  for (auto sign : {CommutatorSign::Standard, CommutatorSign::Flipped}) {
    CHECK(std::abs(me_rhs(rho, cd(0.4, 0.9), 0.1, 1.0, ops, sign).trace()) < 1e-12);
  }
}

TEST_CASE("symmetric single excitation decays at rate 4 Re F") {
  const ModeOperators ops(TruncationSpec{2});
  Ket sym = Ket::Zero(ops.trunc.dim());
  sym[ops.trunc.index(1, 0)] = M_SQRT1_2;
  sym[ops.trunc.index(0, 1)] = M_SQRT1_2;
  const DensityMatrix rho = projector(sym);
  const cd F(0.35, 0.2);
  const DenseMatrix LdagL = DenseMatrix(ops.LdagL);
  const double n0 = (rho * LdagL).trace().real();
  const double rate = (me_rhs(rho, F, 0.0, 1.0, ops) * LdagL).trace().real();
  CHECK(rate == doctest::Approx(-4.0 * F.real() * n0).epsilon(1e-12));

  MasterRun run;
  run.rho0 = rho;
  run.t1 = 1e-4;
  run.dt = 1e-5;
  run.coefficient = constant_F(F, 1e-4, 5e-6);
  run.schedule = ControlSchedule(ConstantControl{0.0});
  const MasterSnapshots out = integrate_master(run, ops);
  const double n1 = (out.states.back() * LdagL).trace().real();
  CHECK((n1 - n0) / 1e-4 == doctest::Approx(-4.0 * F.real() * n0).epsilon(1e-3));
}

TEST_CASE("closed evolution is unitary") {
  const ModeOperators ops(TruncationSpec{3});
  const Ket psi = prepare_state(CoherentState{cd(0.3, 0.1), cd(-0.2, 0.0)}, ops.trunc);
  MasterRun run;
  run.rho0 = projector(psi);
  run.t1 = 1.0;
  run.dt = 1e-3;
  run.Omega = 1.0;
  run.coefficient = constant_F(0.0, 1.0, 5e-4);
  const MasterSnapshots out = integrate_master(run, ops);
  const Ket expected = (DenseMatrix(cd(0.0, -1.0) * DenseMatrix(ops.hamiltonian(1.0, 0.0)))).exp() * psi;
  CHECK((out.states.back() - projector(expected)).norm() < 1e-10);
}

TEST_CASE("antisymmetric Bell state is dark") {
  const ModeOperators ops(TruncationSpec{3});
  Ket dark = Ket::Zero(ops.trunc.dim());
  dark[ops.trunc.index(1, 0)] = M_SQRT1_2;
  dark[ops.trunc.index(0, 1)] = -M_SQRT1_2;
  MasterRun run;
  run.rho0 = projector(dark);
  run.t1 = 2.0;
  run.dt = 1e-3;
  run.coefficient = lorentzian(1, 3, 1, 2.0, 5e-4);
  const MasterSnapshots out = integrate_master(run, ops);
  for (const auto& rho : out.states) CHECK((rho - run.rho0).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("snapshots and conservation") {
  const ModeOperators ops(TruncationSpec{3});
  MasterRun run;
  run.rho0 = projector(prepare_state(TwoModeSqueezedState{0.2}, ops.trunc));
  run.t1 = 1.0;
  run.dt = 1e-3;
  run.stride = 300;
  run.coefficient = lorentzian(1, 3, 1, 1.0, 5e-4);
  const MasterSnapshots out = integrate_master(run, ops);
  REQUIRE(out.times.size() == 5);
  CHECK(out.times.front() == 0.0);
  CHECK(out.times[1] == doctest::Approx(0.3));
  CHECK(out.times.back() == doctest::Approx(1.0));
  CHECK(out.diagnostics.steps == 1000);
  CHECK(out.diagnostics.max_trace_drift < 1e-10);
  for (const auto& rho : out.states) CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pole inside the window is rejected") {
  const ModeOperators ops(TruncationSpec{2});
  MasterRun run;
  run.rho0 = DensityMatrix::Zero(ops.trunc.dim(), ops.trunc.dim());
  run.rho0(0, 0) = 1.0;
  run.t1 = 4.0;
  run.dt = 1e-3;
  run.coefficient = lorentzian(1, 3, 0, 4.0, 5e-4);
  try {
    integrate_master(run, ops);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularGenerator);
  }
}

TEST_CASE("leakage limit aborts the run") {
  const ModeOperators ops(TruncationSpec{1});
  MasterRun run;
  run.rho0 = DensityMatrix::Zero(ops.trunc.dim(), ops.trunc.dim());
  run.rho0(ops.trunc.index(1, 1), ops.trunc.index(1, 1)) = 1.0;
  run.t1 = 0.5;
  run.dt = 1e-3;
  run.coefficient = constant_F(0.0, 0.5, 5e-4);
  try {
    integrate_master(run, ops);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Truncation);
  }
}

TEST_CASE("raw density matrix dump round trip") {
  const auto path = std::filesystem::temp_directory_path() / "qbm_rho_roundtrip.bin";
  std::vector<DensityMatrix> states;
  for (int i = 0; i < 3; ++i) states.push_back(DensityMatrix::Random(4, 4));
  {
    RhoDumpWriter writer(path, 4);
    for (const auto& s : states) writer.write(s);
  }
  const auto back = read_rho_dump(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == states[i]);
}
