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

#include "qbm/observables.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qbm {

double log_negativity_fock(const DensityMatrix& rho, const TruncationSpec& trunc) {
  const DenseMatrix pt = partial_transpose(rho, 2, trunc);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(pt, Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v < -1e-10) neg -= v;
  }
  return std::log1p(2.0 * neg);
}

double l1_coherence(const DensityMatrix& rho) {
  return rho.cwiseAbs().sum() - rho.diagonal().cwiseAbs().sum();
}

double mean_energy(const DensityMatrix& rho, double Omega, double k, const ModeOperators& ops) {
  const DenseMatrix Hrho = ops.hamiltonian(Omega, k) * rho;
  return Hrho.trace().real();
}

double purity(const DensityMatrix& rho) { return rho.cwiseAbs2().sum(); }  // Tr rho^2 for Hermitian rho

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const DenseMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qbm
