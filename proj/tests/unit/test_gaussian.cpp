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

#include "doctest.h"
#include "qbm/coefficients.hpp"
#include "qbm/error.hpp"
#include "qbm/gaussian.hpp"

using namespace qbm;

namespace {

CoefficientTrajectory zero_coefficient(double t_end, double h) {
  const TimeGrid grid = TimeGrid::covering(t_end, h);
  return CoefficientTrajectory(grid, std::vector<cd>(grid.size(), cd{}), std::vector<cd>(grid.size(), cd(1.0, 0.0)));
}

CoefficientTrajectory lorentzian(double Gamma, double gamma_env, double Omega, double t_end, double h) {
  CoefficientSpec s;
  s.Gamma = Gamma;
  s.gamma_env = gamma_env;
  s.Omega = Omega;
  return lorentzian_coefficients(s, TimeGrid::covering(t_end, h));
}

// Moments of x- = (x1 - x2)/sqrt2 and p- in the (x1, p1, x2, p2) ordering.
ControlModeMoments minus_mode(const Matrix4& s) {
  ControlModeMoments m;
  m.xx = 0.5 * (s(0, 0) + s(2, 2) - 2.0 * s(0, 2));
  m.pp = 0.5 * (s(1, 1) + s(3, 3) - 2.0 * s(1, 3));
  m.cov = 0.5 * (s(0, 1) + s(2, 3) - s(0, 3) - s(2, 1));
  return m;
}

}  // namespace

TEST_CASE("two-mode squeezed covariance") {
  CHECK((cm_two_mode_squeezed(0.0).sigma - 0.5 * Matrix4::Identity()).norm() == 0.0);
  const double r = 0.5;
  const Matrix4 s = cm_two_mode_squeezed(r).sigma;
  const double xp = 0.5 * (s(0, 0) + s(2, 2) + 2.0 * s(0, 2));
  const double pp = 0.5 * (s(1, 1) + s(3, 3) + 2.0 * s(1, 3));
  const ControlModeMoments minus = minus_mode(s);
  CHECK(std::sqrt(xp * pp) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::sqrt(minus.xx * minus.pp) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::sqrt(minus.pp / minus.xx) == doctest::Approx(std::exp(2.0 * r)).epsilon(1e-12));
}

TEST_CASE("covariance matches the Fock-space moments") {
  const ModeOperators ops(TruncationSpec{14});
  const Ket psi = prepare_state(TwoModeSqueezedState{0.3}, ops.trunc);
  const CovarianceMatrix fock = moments_from_state(psi * psi.adjoint(), ops);
  CHECK((fock.sigma - cm_two_mode_squeezed(0.3).sigma).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(fock.mean.norm() < 1e-12);
}

TEST_CASE("symplectic eigenvalues") {
  const auto vac = symplectic_eigenvalues(0.5 * Matrix4::Identity());
  CHECK(vac.first == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(vac.second == doctest::Approx(0.5).epsilon(1e-14));
  for (double r : {0.1, 0.7, 1.3}) {
    const auto [a, b] = symplectic_eigenvalues(cm_two_mode_squeezed(r).sigma);
    CHECK(std::abs(a - 0.5) < 1e-9);
    CHECK(std::abs(b - 0.5) < 1e-9);
    const auto [c, d] = symplectic_eigenvalues_invariant(cm_two_mode_squeezed(r).sigma);
    // The invariant route takes a square root of a vanishing discriminant.
    CHECK(std::abs(c - 0.5) < 1e-7);
    CHECK(std::abs(d - 0.5) < 1e-7);
  }
  CHECK_THROWS_AS(symplectic_eigenvalues(0.2 * Matrix4::Identity()), Error);
  CHECK(!is_physical(0.2 * Matrix4::Identity()));
}

TEST_CASE("log negativity from the covariance matrix") {
  for (double r : {0.25, 0.5, 1.0}) CHECK(std::abs(log_negativity_cm(cm_two_mode_squeezed(r).sigma) - 2.0 * r) < 1e-9);
  CHECK(log_negativity_cm(0.5 * Matrix4::Identity()) == 0.0);
  CHECK(log_negativity_cm(1.3 * Matrix4::Identity()) == 0.0);
  CHECK(purity_cm(cm_two_mode_squeezed(0.4).sigma) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free propagation is a symplectic rotation") {
  const CovarianceMatrix cm0 = cm_two_mode_squeezed(0.4);
  const CmTrajectory out = propagate_cm(cm0, zero_coefficient(3.0, 5e-4), ConstantControl{0.0}, 1.0, 3.0, 1e-3, 100);
  for (const auto& cm : out.states) {
    const auto [a, b] = symplectic_eigenvalues(cm.sigma);
    CHECK(std::abs(a - 0.5) < 1e-8);
    CHECK(std::abs(b - 0.5) < 1e-8);
  }
}

TEST_CASE("Markovian damping relaxes the symmetric mode") {
  const CovarianceMatrix cm0 = cm_two_mode_squeezed(0.3);
  const CmTrajectory out = propagate_cm(cm0, lorentzian(1, 5, 0, 30.0, 5e-3), ConstantControl{0.0}, 0.0, 30.0, 1e-2, 100);
  const Matrix4& s = out.states.back().sigma;
  const double xplus = 0.5 * (s(0, 0) + s(2, 2) + 2.0 * s(0, 2));
  CHECK(xplus == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("controlled mode moments") {
  SUBCASE("vacuum is stationary without control") {
    const ControlModeMoments d = controlled_mode_moments_rhs(ControlModeMoments{}, 0.0, 1.0);
    CHECK(d.xx == 0.0);
    CHECK(d.pp == 0.0);
    CHECK(d.cov == 0.0);
  }
  SUBCASE("energy is conserved for constant control") {
    const double k = 0.2, Omega = 1.0, w2 = Omega * Omega + 4.0 * k;
    ControlModeMoments m{0.9, 0.3, 0.1};
    auto energy = [&](const ControlModeMoments& x) { return 0.5 * x.pp + 0.5 * w2 * x.xx; };
    const double e0 = energy(m);
    const double h = 1e-3;
    auto add = [](ControlModeMoments a, const ControlModeMoments& b, double s) {
      a.xx += s * b.xx;
      a.pp += s * b.pp;
      a.cov += s * b.cov;
      return a;
    };
    for (int i = 0; i < 5000; ++i) {
      const auto k1 = controlled_mode_moments_rhs(m, k, Omega);
      const auto k2 = controlled_mode_moments_rhs(add(m, k1, h / 2), k, Omega);
      const auto k3 = controlled_mode_moments_rhs(add(m, k2, h / 2), k, Omega);
      const auto k4 = controlled_mode_moments_rhs(add(m, k3, h), k, Omega);
      m = add(add(add(add(m, k1, h / 6), k2, h / 3), k3, h / 3), k4, h / 6);
    }
    CHECK(std::abs(energy(m) - e0) < 1e-8);
  }
  SUBCASE("agrees with the antisymmetric block of the full covariance") {
    // The Fock-space control term has twice the coupling of the moment equations.
    const double k = 0.05, Omega = 1.0, t_end = 2.0, h = 1e-3;
    const CovarianceMatrix cm0 = cm_two_mode_squeezed(0.3);
    const CmTrajectory full = propagate_cm(cm0, zero_coefficient(t_end, h / 2), ConstantControl{k}, Omega, t_end, h);
    ControlModeMoments m = minus_mode(cm0.sigma);
    auto add = [](ControlModeMoments a, const ControlModeMoments& b, double s) {
      a.xx += s * b.xx;
      a.pp += s * b.pp;
      a.cov += s * b.cov;
      return a;
    };
    const double kq = 2.0 * k;
    for (int i = 0; i < 2000; ++i) {
      const auto k1 = controlled_mode_moments_rhs(m, kq, Omega);
      const auto k2 = controlled_mode_moments_rhs(add(m, k1, h / 2), kq, Omega);
      const auto k3 = controlled_mode_moments_rhs(add(m, k2, h / 2), kq, Omega);
      const auto k4 = controlled_mode_moments_rhs(add(m, k3, h), kq, Omega);
      m = add(add(add(add(m, k1, h / 6), k2, h / 3), k3, h / 3), k4, h / 6);
    }
    const ControlModeMoments ref = minus_mode(full.states.back().sigma);
    CHECK(std::abs(m.xx - ref.xx) < 1e-6);
    CHECK(std::abs(m.pp - ref.pp) < 1e-6);
    CHECK(std::abs(m.cov - ref.cov) < 1e-6);
  }
}

TEST_CASE("effective frequency") {
  CHECK(effective_frequency(0.0, 1.3) == doctest::Approx(1.3));
  CHECK(effective_frequency(2.0, 1.0) == doctest::Approx(3.0));
  CHECK(effective_frequency(-0.25, 1.0) == 0.0);
  CHECK_THROWS_AS(effective_frequency(-0.3, 1.0), Error);
}
