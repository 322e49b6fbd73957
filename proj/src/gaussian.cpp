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

#include "qbm/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qbm/error.hpp"

namespace qbm {

namespace {

double block_det(const Matrix4& s, int r, int c) { return s(r, c) * s(r + 1, c + 1) - s(r, c + 1) * s(r + 1, c); }

Matrix4 plus_projector() {
  Matrix4 P = Matrix4::Zero();
  for (int i = 0; i < 2; ++i) {
    P(i, i) = P(i + 2, i + 2) = 0.5;
    P(i, i + 2) = P(i + 2, i) = 0.5;
  }
  return P;
}

}  // namespace

Matrix4 symplectic_form() {
  Matrix4 J = Matrix4::Zero();
  J(0, 1) = J(2, 3) = 1.0;
  J(1, 0) = J(3, 2) = -1.0;
  return J;
}

double physicality_margin(const Matrix4& sigma) {
  const Eigen::Matrix4cd M = sigma.cast<cd>() + cd(0.0, 0.5) * symplectic_form().cast<cd>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_physical(const Matrix4& sigma, double tol) {
  return (sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()) &&
         physicality_margin(sigma) >= -tol;
}

std::pair<double, double> symplectic_eigenvalues(const Matrix4& sigma) {
  if (!is_physical(sigma)) throw Error(ErrorCode::Domain, "covariance matrix violates the uncertainty principle");
  const Eigen::Matrix4cd M = cd(0.0, 1.0) * (symplectic_form() * sigma).cast<cd>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
  std::array<double, 4> mod{};
  for (int i = 0; i < 4; ++i) mod[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
  std::sort(mod.begin(), mod.end());
  return {0.5 * (mod[0] + mod[1]), 0.5 * (mod[2] + mod[3])};
}

std::pair<double, double> symplectic_eigenvalues_invariant(const Matrix4& sigma) {
  const double delta = block_det(sigma, 0, 0) + block_det(sigma, 2, 2) + 2.0 * block_det(sigma, 0, 2);
  const double det = sigma.determinant();
  const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * det));
  const double lo = std::sqrt(std::max(0.0, 0.5 * (delta - disc)));
  const double hi = std::sqrt(std::max(0.0, 0.5 * (delta + disc)));
  return {lo, hi};
}

Matrix4 partial_transpose_cm(const Matrix4& sigma) {
  Matrix4 T = Matrix4::Identity();
  T(3, 3) = -1.0;
  return T * sigma * T;
}

double log_negativity_cm(const Matrix4& sigma) {
  const double nu = symplectic_eigenvalues_invariant(partial_transpose_cm(sigma)).first;
  if (!(nu > 0.0)) throw Error(ErrorCode::Domain, "degenerate covariance matrix");
  return std::max(0.0, -std::log(2.0 * nu));
}

double purity_cm(const Matrix4& sigma) { return 1.0 / (4.0 * std::sqrt(sigma.determinant())); }

double energy_cm(const CovarianceMatrix& cm, double Omega, double k) {
  const Matrix4 second = cm.sigma + cm.mean * cm.mean.transpose();
  const double free = 0.5 * Omega * (second.trace() - 2.0);
  const double diff = second(0, 0) + second(2, 2) - 2.0 * second(0, 2);
  return free + 2.0 * k * diff;
}

CovarianceMatrix cm_two_mode_squeezed(double r) {
  CovarianceMatrix cm;
  const double c = 0.5 * std::cosh(2.0 * r);
  const double s = 0.5 * std::sinh(2.0 * r);
  cm.sigma = c * Matrix4::Identity();
  cm.sigma(0, 2) = cm.sigma(2, 0) = s;
  cm.sigma(1, 3) = cm.sigma(3, 1) = -s;
  return cm;
}

CovarianceMatrix moments_from_state(const DensityMatrix& rho, const ModeOperators& ops) {
  const std::array<const Operator*, 4> xi{&ops.x1, &ops.p1, &ops.x2, &ops.p2};
  const double tr = rho.trace().real();
  std::array<DenseMatrix, 4> rx;  // xi_i rho
  CovarianceMatrix cm;
  for (std::size_t i = 0; i < 4; ++i) {
    rx[i] = *xi[i] * rho;
    cm.mean(static_cast<int>(i)) = rx[i].trace().real() / tr;
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) {
      // Re Tr(xi_j xi_i rho) is the symmetrized moment for Hermitian xi.
      const double m = (*xi[j] * rx[i]).trace().real() / tr;
      const double v = m - cm.mean(static_cast<int>(i)) * cm.mean(static_cast<int>(j));
      cm.sigma(static_cast<int>(i), static_cast<int>(j)) = cm.sigma(static_cast<int>(j), static_cast<int>(i)) = v;
    }
  return cm;
}

DriftDiffusion drift_diffusion(cd F, double k, double Omega) {
  Matrix4 G = Omega * Matrix4::Identity();
  G(0, 0) += 4.0 * k;
  G(2, 2) += 4.0 * k;
  G(0, 2) -= 4.0 * k;
  G(2, 0) -= 4.0 * k;
  for (int q = 0; q < 2; ++q) {  // Im F (x1 + x2)^2 / 2 and Im F (p1 + p2)^2 / 2
    G(q, q) += F.imag();
    G(q + 2, q + 2) += F.imag();
    G(q, q + 2) += F.imag();
    G(q + 2, q) += F.imag();
  }
  const Matrix4 P = plus_projector();
  DriftDiffusion dd;
  dd.A = symplectic_form() * G - 2.0 * F.real() * P;
  dd.D = 2.0 * F.real() * P;
  return dd;
}

CmTrajectory propagate_cm(const CovarianceMatrix& cm0, const CoefficientTrajectory& coefficient,
                          const ControlSchedule& schedule, double Omega, double t_end, double dt,
                          std::size_t stride) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorCode::Config, "propagate_cm needs dt > 0 and t_end > 0");
  if (stride == 0) throw Error(ErrorCode::Config, "snapshot stride must be positive");
  if (!is_physical(cm0.sigma)) throw Error(ErrorCode::Domain, "initial covariance matrix is not physical");
  if (coefficient.grid().end() < t_end - 1e-12)
    throw Error(ErrorCode::Config, "coefficient trajectory does not cover the integration window");
  if (auto pole = coefficient.first_pole(t_end)) {
    std::ostringstream msg;
    msg << "F(t) diverges near t=" << *pole << "; moment equations are undefined there";
    throw Error(ErrorCode::SingularGenerator, msg.str());
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const double h = t_end / static_cast<double>(steps);

  struct State {
    Matrix4 s;
    Vector4 m;
  };
  auto rhs = [&](double t, const State& x) {
    const DriftDiffusion dd = drift_diffusion(coefficient.at(t), schedule.evaluate(t), Omega);
    return State{dd.A * x.s + x.s * dd.A.transpose() + dd.D, dd.A * x.m};
  };
  auto axpy = [](const State& x, double a, const State& y) { return State{x.s + a * y.s, x.m + a * y.m}; };

  CmTrajectory out;
  State x{cm0.sigma, cm0.mean};
  out.min_margin = physicality_margin(x.s);
  out.times.push_back(0.0);
  out.states.push_back(cm0);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = h * static_cast<double>(j);
    const State k1 = rhs(t, x);
    const State k2 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1));
    const State k3 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2));
    const State k4 = rhs(t + h, axpy(x, h, k3));
    x.s += (h / 6.0) * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    x.m += (h / 6.0) * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    x.s = (0.5 * (x.s + x.s.transpose())).eval();
    const double margin = physicality_margin(x.s);
    out.min_margin = std::min(out.min_margin, margin);
    if (!std::isfinite(margin) || margin < -1e-9) {
      std::ostringstream msg;
      msg << "covariance matrix became unphysical at t=" << h * static_cast<double>(j + 1) << " (margin " << margin
          << ")";
      throw Error(ErrorCode::Run, msg.str());
    }
    if ((j + 1) % stride == 0 || j + 1 == steps) {
      out.times.push_back(h * static_cast<double>(j + 1));
      out.states.push_back(CovarianceMatrix{x.s, x.m});
    }
  }
  return out;
}

ControlModeMoments controlled_mode_moments_rhs(const ControlModeMoments& m, double k, double Omega) {
  const double w2 = Omega * Omega + 4.0 * k;
  return ControlModeMoments{2.0 * m.cov, -2.0 * w2 * m.cov, m.pp - w2 * m.xx};
}

double effective_frequency(double k, double Omega) {
  const double w2 = Omega * Omega + 4.0 * k;
  if (w2 < 0.0) {
    std::ostringstream msg;
    msg << "inverted control potential: Omega^2 + 4k = " << w2 << " < 0";
    throw Error(ErrorCode::Domain, msg.str());
  }
  return std::sqrt(w2);
}

}  // namespace qbm
