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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qbm {

using cd = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;
using Operator = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

/// Uniform lattice t_j = j * dt, j = 0..steps.
struct TimeGrid {
  double dt = 1e-3;
  std::size_t steps = 0;

  double time(std::size_t j) const { return static_cast<double>(j) * dt; }
  double end() const { return time(steps); }
  std::size_t size() const { return steps + 1; }

  /// Grid covering [0, t_end]; t_end must be an integer multiple of dt (1e-9 relative slack).
  static TimeGrid covering(double t_end, double dt);
};

}  // namespace qbm
