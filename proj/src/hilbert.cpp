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

#include "qbm/hilbert.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/error.hpp"

namespace qbm {

namespace {

using Triplet = Eigen::Triplet<cd>;

Operator from_triplets(std::size_t d, const std::vector<Triplet>& entries) {
  Operator op(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  op.setFromTriplets(entries.begin(), entries.end());
  op.makeCompressed();
  return op;
}

Operator mode_lowering(const TruncationSpec& trunc, int mode) {
  std::vector<Triplet> entries;
  const int n_max = trunc.levels;
  for (int n1 = 0; n1 <= n_max; ++n1) {
    for (int n2 = 0; n2 <= n_max; ++n2) {
      const int n = mode == 1 ? n1 : n2;
      if (n == 0) continue;
      const auto row = mode == 1 ? trunc.index(n1 - 1, n2) : trunc.index(n1, n2 - 1);
      entries.emplace_back(static_cast<int>(row), static_cast<int>(trunc.index(n1, n2)), std::sqrt(double(n)));
    }
  }
  return from_triplets(trunc.dim(), entries);
}

// Truncated single-mode coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
Eigen::VectorXcd coherent_amplitudes(cd alpha, int levels) {
  Eigen::VectorXcd c(levels + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= levels; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  return c;
}

Ket product_ket(const Eigen::VectorXcd& mode1, const Eigen::VectorXcd& mode2, const TruncationSpec& trunc) {
  Ket psi(static_cast<Eigen::Index>(trunc.dim()));
  for (int n1 = 0; n1 <= trunc.levels; ++n1) {
    for (int n2 = 0; n2 <= trunc.levels; ++n2) psi[trunc.index(n1, n2)] = mode1[n1] * mode2[n2];
  }
  return psi;
}

Ket build_state(const StateKind& kind, const TruncationSpec& trunc) {
  const int N = trunc.levels;
  Ket psi = Ket::Zero(static_cast<Eigen::Index>(trunc.dim()));
  if (const auto* fock = std::get_if<FockState>(&kind)) {
    if (fock->n1 < 0 || fock->n2 < 0) throw Error(ErrorCode::Domain, "Fock occupations must be >= 0");
    if (fock->n1 > N || fock->n2 > N) {
      throw Error(ErrorCode::Truncation, "Fock state |" + std::to_string(fock->n1) + "," + std::to_string(fock->n2) +
                                             "> needs levels >= " + std::to_string(std::max(fock->n1, fock->n2) + 1));
    }
    psi[trunc.index(fock->n1, fock->n2)] = 1.0;
  } else if (const auto* coh = std::get_if<CoherentState>(&kind)) {
    psi = product_ket(coherent_amplitudes(coh->alpha1, N), coherent_amplitudes(coh->alpha2, N), trunc);
  } else if (const auto* cat = std::get_if<CatState>(&kind)) {
    const cd phase = std::exp(cd(0.0, M_PI * cat->parity));
    const Eigen::VectorXcd mode1 = coherent_amplitudes(cat->alpha, N) + phase * coherent_amplitudes(-cat->alpha, N);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(N + 1);
    vac[0] = 1.0;
    psi = product_ket(mode1, vac, trunc);
  } else if (const auto* sq = std::get_if<TwoModeSqueezedState>(&kind)) {
    // The generator r (a1'a2' - a1 a2) keeps span{|n,n>} invariant, so the
    // exponential acting on vacuum is the exponential of this tridiagonal chain.
    DenseMatrix chain = DenseMatrix::Zero(N + 1, N + 1);
    for (int n = 0; n < N; ++n) {
      chain(n + 1, n) = sq->r * double(n + 1);
      chain(n, n + 1) = -sq->r * double(n + 1);
    }
    const DenseMatrix propagator = chain.exp();
    for (int n = 0; n <= N; ++n) psi[trunc.index(n, n)] = propagator(n, 0);
  }
  const double norm = psi.norm();
  if (!(norm > 1e-300)) throw Error(ErrorCode::Domain, "requested state has zero norm in this truncation");
  return psi / norm;
}

}  // namespace

void TruncationSpec::validate() const {
  if (levels < 1 || levels > 30) throw Error(ErrorCode::Config, "system.levels must lie in [1, 30]");
}

DenseMatrix annihilation(int levels) {
  if (levels < 1) throw Error(ErrorCode::Domain, "annihilation needs levels >= 1");
  DenseMatrix a = DenseMatrix::Zero(levels + 1, levels + 1);
  for (int n = 1; n <= levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

ModeOperators::ModeOperators(const TruncationSpec& t) : trunc(t) {
  trunc.validate();
  a1 = mode_lowering(trunc, 1);
  a2 = mode_lowering(trunc, 2);
  const Operator a1d = a1.adjoint();
  const Operator a2d = a2.adjoint();
  number = a1d * a1 + a2d * a2;
  const Operator diff = a1 - a2 + a1d - a2d;
  control = diff * diff;
  L = a1 + a2;
  LdagL = Operator(L.adjoint()) * L;
  const double s = M_SQRT1_2;
  x1 = s * (a1 + a1d);
  x2 = s * (a2 + a2d);
  p1 = cd(0.0, -s) * (a1 - a1d);
  p2 = cd(0.0, -s) * (a2 - a2d);
  for (Operator* op : {&number, &control, &L, &LdagL, &x1, &x2, &p1, &p2}) op->makeCompressed();
}

Operator ModeOperators::hamiltonian(double Omega, double k) const {
  Operator h = cd(Omega) * number + cd(k) * control;
  h.makeCompressed();
  return h;
}

Operator system_hamiltonian(double Omega, double k, const TruncationSpec& trunc) {
  return ModeOperators(trunc).hamiltonian(Omega, k);
}

Operator lindblad_operator(const TruncationSpec& trunc) { return ModeOperators(trunc).L; }

bool is_gaussian(const StateKind& kind) {
  if (const auto* fock = std::get_if<FockState>(&kind)) return fock->n1 == 0 && fock->n2 == 0;
  return std::holds_alternative<CoherentState>(kind) || std::holds_alternative<TwoModeSqueezedState>(kind);
}

Ket prepare_state(const StateKind& kind, const TruncationSpec& trunc) {
  trunc.validate();
  Ket psi = build_state(kind, trunc);
  const double leak = leakage(psi, trunc);
  if (leak > kLeakageError) {
    int needed = trunc.levels + 1;
    for (; needed <= 200; ++needed) {
      if (leakage(build_state(kind, TruncationSpec{needed}), TruncationSpec{needed}) <= kLeakageWarn) break;
    }
    throw Error(ErrorCode::Truncation, "initial state leaks " + std::to_string(leak) + " at levels = " +
                                           std::to_string(trunc.levels) + "; levels >= " + std::to_string(needed) +
                                           " keeps leakage below 1e-6");
  }
  return psi;
}

double leakage(const Ket& psi, const TruncationSpec& trunc) {
  double edge = 0.0;
  const double total = psi.squaredNorm();
  for (std::size_t i = 0; i < trunc.dim(); ++i) {
    const auto [n1, n2] = trunc.occupations(i);
    if (n1 == trunc.levels || n2 == trunc.levels) edge += std::norm(psi[static_cast<Eigen::Index>(i)]);
  }
  return total > 0.0 ? edge / total : 0.0;
}

double leakage(const DensityMatrix& rho, const TruncationSpec& trunc) {
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < trunc.dim(); ++i) {
    const double p = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    total += p;
    const auto [n1, n2] = trunc.occupations(i);
    if (n1 == trunc.levels || n2 == trunc.levels) edge += p;
  }
  return total > 0.0 ? edge / total : 0.0;
}

DenseMatrix partial_transpose(const DenseMatrix& rho, int mode, const TruncationSpec& trunc) {
  if (mode != 1 && mode != 2) throw Error(ErrorCode::Domain, "partial_transpose mode must be 1 or 2");
  const auto d = static_cast<Eigen::Index>(trunc.dim());
  if (rho.rows() != d || rho.cols() != d) throw Error(ErrorCode::Domain, "matrix does not match the truncation");
  DenseMatrix out(d, d);
  const int m = trunc.per_mode();
  for (int n1 = 0; n1 < m; ++n1) {
    for (int n2 = 0; n2 < m; ++n2) {
      for (int m1 = 0; m1 < m; ++m1) {
        for (int m2 = 0; m2 < m; ++m2) {
          const auto row = static_cast<Eigen::Index>(trunc.index(n1, n2));
          const auto col = static_cast<Eigen::Index>(trunc.index(m1, m2));
          const auto src_row = static_cast<Eigen::Index>(mode == 2 ? trunc.index(n1, m2) : trunc.index(m1, n2));
          const auto src_col = static_cast<Eigen::Index>(mode == 2 ? trunc.index(m1, n2) : trunc.index(n1, m2));
          out(row, col) = rho(src_row, src_col);
        }
      }
    }
  }
  return out;
}

}  // namespace qbm
