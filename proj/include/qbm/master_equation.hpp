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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>

#include "qbm/coefficients.hpp"
#include "qbm/control.hpp"
#include "qbm/hilbert.hpp"
#include "qbm/types.hpp"

namespace qbm {

/// Sign of the Hamiltonian commutator. Only Standard (-i[H, rho]) is
/// consistent with the trajectory unraveling; Flipped exists so tests can show
/// that the other reading fails.
enum class CommutatorSign { Standard, Flipped };

/// d rho/dt = -i[H, rho] + [L, rho F* L'] + [F L rho, L'], L = a1 + a2,
/// H = Omega (n1 + n2) + k (a1 - a2 + a1' - a2')^2.
DenseMatrix me_rhs(const DensityMatrix& rho, cd F, double k, double Omega, const ModeOperators& ops,
                   CommutatorSign sign = CommutatorSign::Standard);

struct MasterRun {
  DensityMatrix rho0;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  std::shared_ptr<const CoefficientTrajectory> coefficient;
  ControlSchedule schedule;
  double Omega = 1.0;
  std::size_t stride = 1;  // snapshot every `stride` steps (the final step is always emitted)
  double leakage_limit = kLeakageError;
};

struct MasterDiagnostics {
  std::size_t steps = 0;
  std::size_t snapshots = 0;
  double max_trace_drift = 0.0;
  double max_hermiticity = 0.0;  // before the per-step symmetrization
  double max_leakage = 0.0;
};

using SnapshotObserver = std::function<void(double t, const DensityMatrix& rho)>;

/// Classical RK4 at fixed dt with F(t) from the coefficient trajectory (linear
/// interpolation off-grid) and rho <- (rho + rho')/2 after every step.
///
/// Aborts with SingularGenerator if F has a pole inside [t0, t1] or dt*|F| is
/// beyond RK4 stability, Run if |Tr rho - Tr rho0| > 1e-6, and Truncation if
/// leakage exceeds run.leakage_limit.
MasterDiagnostics integrate_master(const MasterRun& run, const ModeOperators& ops, const SnapshotObserver& observer);

struct MasterSnapshots {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  MasterDiagnostics diagnostics;
};
MasterSnapshots integrate_master(const MasterRun& run, const ModeOperators& ops);

/// Raw density-matrix dump: 16-byte header (magic "QBMR", uint32 dimension,
/// uint64 count) followed by little-endian complex doubles, row-major per
/// snapshot. The count is patched on close().
class RhoDumpWriter {
 public:
  static constexpr std::uint32_t kMagic = 0x524d4251;  // "QBMR" read as little-endian

  RhoDumpWriter(const std::filesystem::path& path, std::uint32_t dim);
  ~RhoDumpWriter();
  RhoDumpWriter(const RhoDumpWriter&) = delete;
  RhoDumpWriter& operator=(const RhoDumpWriter&) = delete;

  void write(const DensityMatrix& rho);
  void close();
  std::uint64_t count() const { return count_; }

 private:
  std::ofstream out_;
  std::uint32_t dim_;
  std::uint64_t count_ = 0;
};

/// Reads a dump back (for tests and debugging).
std::vector<DensityMatrix> read_rho_dump(const std::filesystem::path& path);

}  // namespace qbm
