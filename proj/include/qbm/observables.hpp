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

#include "qbm/hilbert.hpp"
#include "qbm/types.hpp"

namespace qbm {

/// ln(1 + 2 sum |negative eigenvalues|) of the partial transpose over mode 2;
/// eigenvalues above -1e-10 are treated as zero.
double log_negativity_fock(const DensityMatrix& rho, const TruncationSpec& trunc);

/// Sum of |rho_ij| over i != j in the Fock product basis |n1, n2>.
double l1_coherence(const DensityMatrix& rho);

/// Tr(rho H) with H = Omega (n1 + n2) + k (a1 - a2 + a1' - a2')^2.
double mean_energy(const DensityMatrix& rho, double Omega, double k, const ModeOperators& ops);

double purity(const DensityMatrix& rho);

/// (1/2) |a - b|_1 for Hermitian inputs.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qbm
