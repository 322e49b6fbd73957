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

#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qbm/coefficients.hpp"
#include "qbm/control.hpp"
#include "qbm/hilbert.hpp"
#include "qbm/types.hpp"

namespace qbm {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

/// Second moments over xi = (x1, p1, x2, p2) with x = (a + a')/sqrt2 and
/// p = (a - a')/(i sqrt2); the vacuum is I/2.
struct CovarianceMatrix {
  Matrix4 sigma = 0.5 * Matrix4::Identity();
  Vector4 mean = Vector4::Zero();
};

Matrix4 symplectic_form();

/// Smallest eigenvalue of sigma + (i/2) Omega_s. Non-negative for physical states.
double physicality_margin(const Matrix4& sigma);
bool is_physical(const Matrix4& sigma, double tol = 1e-9);

/// Moduli of the eigenvalues of i Omega_s sigma, ascending. Throws Domain for
/// non-physical input.
std::pair<double, double> symplectic_eigenvalues(const Matrix4& sigma);

/// Same spectrum from the symplectic invariants det sigma and
/// det A + det B + 2 det C; accepts any symmetric input (e.g. a partial transpose).
std::pair<double, double> symplectic_eigenvalues_invariant(const Matrix4& sigma);

/// p2 -> -p2.
Matrix4 partial_transpose_cm(const Matrix4& sigma);

/// max(0, -ln 2 nu_min) of the partially transposed matrix.
double log_negativity_cm(const Matrix4& sigma);

double purity_cm(const Matrix4& sigma);

/// <H> for H = Omega (n1 + n2) + 2k (x1 - x2)^2, the quadrature form of the
/// Fock-space Hamiltonian.
double energy_cm(const CovarianceMatrix& cm, double Omega, double k);

CovarianceMatrix cm_two_mode_squeezed(double r);

/// Means and symmetrized second moments of a Fock-space state.
CovarianceMatrix moments_from_state(const DensityMatrix& rho, const ModeOperators& ops);

/// dsigma/dt = A sigma + sigma A^T + D, dmean/dt = A mean.
struct DriftDiffusion {
  Matrix4 A;
  Matrix4 D;
};
DriftDiffusion drift_diffusion(cd F, double k, double Omega);

struct CmTrajectory {
  std::vector<double> times;
  std::vector<CovarianceMatrix> states;
  double min_margin = 0.0;
};

/// RK4 at fixed dt with F(t) read from the coefficient trajectory (linear
/// interpolation off-grid). Emits every `stride` steps and at the end. Aborts
/// with Run when the physicality margin drops below -1e-9.
CmTrajectory propagate_cm(const CovarianceMatrix& cm0, const CoefficientTrajectory& coefficient,
                          const ControlSchedule& schedule, double Omega, double t_end, double dt,
                          std::size_t stride = 1);

/// <x-^2>, <p-^2> and the symmetrized covariance of the controlled mode.
struct ControlModeMoments {
  double xx = 0.5;
  double pp = 0.5;
  double cov = 0.0;
};

/// Unit-mass oscillator at frequency effective_frequency(k, Omega).
ControlModeMoments controlled_mode_moments_rhs(const ControlModeMoments& m, double k, double Omega);

/// sqrt(Omega^2 + 4k); throws Domain for an inverted potential.
double effective_frequency(double k, double Omega);

}  // namespace qbm
