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

#include <utility>
#include <variant>

#include "qbm/types.hpp"

namespace qbm {

inline constexpr double kLeakageWarn = 1e-6;
inline constexpr double kLeakageError = 1e-3;

/// Two modes, each spanning occupations 0..levels. Basis |n1, n2> is stored at
/// index n1 * (levels + 1) + n2 (n2 varies fastest) everywhere in the library.
struct TruncationSpec {
  int levels = 3;

  int per_mode() const { return levels + 1; }
  std::size_t dim() const { return static_cast<std::size_t>(per_mode()) * static_cast<std::size_t>(per_mode()); }
  std::size_t index(int n1, int n2) const {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(per_mode()) + static_cast<std::size_t>(n2);
  }
  std::pair<int, int> occupations(std::size_t idx) const {
    return {static_cast<int>(idx / static_cast<std::size_t>(per_mode())),
            static_cast<int>(idx % static_cast<std::size_t>(per_mode()))};
  }
  void validate() const;
};

/// Single-mode lowering operator: sqrt(n) at (n-1, n).
DenseMatrix annihilation(int levels);

/// Operators shared by every solver for a given truncation.
struct ModeOperators {
  TruncationSpec trunc;
  Operator a1;
  Operator a2;
  Operator number;   // a1'a1 + a2'a2
  Operator control;  // (a1 - a2 + a1' - a2')^2
  Operator L;        // a1 + a2
  Operator LdagL;
  Operator x1, p1, x2, p2;  // x = (a + a')/sqrt2, p = (a - a')/(i sqrt2)

  explicit ModeOperators(const TruncationSpec& trunc);

  /// H(t) = Omega * number + k * control.
  Operator hamiltonian(double Omega, double k) const;
};

Operator system_hamiltonian(double Omega, double k, const TruncationSpec& trunc);
Operator lindblad_operator(const TruncationSpec& trunc);

struct FockState {
  int n1 = 0;
  int n2 = 0;
};
struct CoherentState {
  cd alpha1;
  cd alpha2;
};
/// Normalized |alpha> + exp(i pi parity) |-alpha> on mode 1, vacuum on mode 2.
struct CatState {
  cd alpha;
  int parity = 0;
};
/// exp(r (a1' a2' - a1 a2)) |0,0>, amplitudes tanh^n(r) / cosh(r) on |n,n>.
struct TwoModeSqueezedState {
  double r = 0.0;
};
using StateKind = std::variant<FockState, CoherentState, CatState, TwoModeSqueezedState>;

bool is_gaussian(const StateKind& kind);

/// Normalized ket. Throws Truncation (naming the cutoff that would bring
/// leakage under kLeakageWarn) when leakage exceeds kLeakageError.
Ket prepare_state(const StateKind& kind, const TruncationSpec& trunc);

/// Population with n1 == levels or n2 == levels.
double leakage(const Ket& psi, const TruncationSpec& trunc);
double leakage(const DensityMatrix& rho, const TruncationSpec& trunc);

/// Swaps bra/ket indices of mode 1 or 2. Involution.
DenseMatrix partial_transpose(const DenseMatrix& rho, int mode, const TruncationSpec& trunc);

}  // namespace qbm
