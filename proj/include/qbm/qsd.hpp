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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/coefficients.hpp"
#include "qbm/control.hpp"
#include "qbm/hilbert.hpp"
#include "qbm/types.hpp"

namespace qbm {

/// (-iH + z* L - F L'L) psi.
Ket linear_qsd_rhs(const Ket& psi, cd z_star, cd F, const Operator& H, const Operator& L, const Operator& LdagL);

/// [-iH + (L - <L>) zt* - F (L' - <L'>) L + F <(L' - <L'>) L>] psi with all
/// expectations taken in psi / |psi|. zt* is the shifted noise.
Ket nonlinear_qsd_rhs(const Ket& psi, cd z_tilde_star, cd F, const Operator& H, const Operator& L,
                      const Operator& LdagL);

/// Trapezoid value of int_0^t alpha*(t - s) m(s) ds for m sampled at spacing h
/// on [0, t] (t = (history.size() - 1) h).
cd memory_integral(const std::vector<cd>& history, double h, const CorrelationKernel& kernel);

/// z* + memory_integral(history, h, kernel).
cd shifted_noise(cd z_star, const std::vector<cd>& history, double h, const CorrelationKernel& kernel);

/// Incremental form of memory_integral used inside the integrator. The history
/// lives on a grid of spacing h; value_at() extends the integral by a partial
/// interval delta in [0, h] ending at a trial value. Exponential kernels use an
/// O(1) recursion, others an O(n) sum.
class MemoryIntegral {
 public:
  MemoryIntegral(const CorrelationKernel& kernel, double h, bool force_generic = false);

  void push(cd m);
  cd value_at(double delta, cd m_trial) const;
  std::size_t size() const { return history_.size(); }
  bool uses_recursion() const { return fast_; }

 private:
  const CorrelationKernel* kernel_;
  double h_;
  bool fast_ = false;
  cd alpha0_conj_{};
  double rate_ = 0.0;
  cd recursive_{};  // int_0^{t_last} exp(-rate (t_last - s)) m(s) ds
  std::vector<cd> history_;
};

enum class QsdKind { Linear, Nonlinear };

struct QsdProblem {
  QsdKind kind = QsdKind::Linear;
  Ket psi0;
  double t_end = 1.0;
  double dt = 1e-3;
  /// Must be sampled at spacing dt/2 so every RK4 stage lands on the grid.
  std::shared_ptr<const CoefficientTrajectory> coefficient;
  /// Lattice spacing dt/2, covering [0, t_end].
  CorrelationKernel kernel;
  ControlSchedule schedule;
  double Omega = 1.0;
  std::size_t stride = 1;
  bool zero_noise = false;
};

struct TrajectoryOutcome {
  bool ok = true;
  double max_norm_drift = 0.0;  // max | |psi| - 1 |, meaningful for the nonlinear solver
  double final_norm = 1.0;
};

/// Called at every emitted snapshot with the raw (unnormalized) state.
using TrajectoryObserver = std::function<void(std::size_t snapshot, double t, const Ket& psi)>;

/// One trajectory solver shared read-only across workers. RK4 at fixed dt; the
/// colored noise is sampled at dt/2 so each stage sees its own exact sample.
class QsdIntegrator {
 public:
  QsdIntegrator(QsdProblem problem, const TruncationSpec& trunc);

  TrajectoryOutcome run(std::uint64_t seed, std::uint64_t noise_index, const TrajectoryObserver& observer) const;
  TrajectoryOutcome run(const NoiseRealization& noise, const TrajectoryObserver& observer) const;

  const QsdProblem& problem() const { return problem_; }
  const ModeOperators& operators() const { return ops_; }
  const NoiseSampler& sampler() const { return sampler_; }
  std::size_t steps() const { return steps_; }
  const std::vector<std::size_t>& snapshot_steps() const { return snapshot_steps_; }
  std::vector<double> snapshot_times() const;

 private:
  QsdProblem problem_;
  ModeOperators ops_;
  NoiseSampler sampler_;
  std::size_t steps_ = 0;
  double h_ = 0.0;
  std::vector<std::size_t> snapshot_steps_;
};

struct EnsembleOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency
  bool keep_group_means = false;
  std::optional<std::filesystem::path> debug_dir;  // per-trajectory CSV dumps
  std::size_t debug_count = 0;
  double leakage_limit = kLeakageError;  // on the ensemble mean
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<DensityMatrix> rho_mean;
  std::vector<double> standard_error;  // Frobenius-norm jackknife
  std::size_t count = 0;
  std::size_t failures = 0;
  std::size_t resamples = 0;
  double max_norm_drift = 0.0;
  double max_leakage = 0.0;
  /// Per-group means, [group][snapshot]; filled when keep_group_means is set.
  std::vector<std::vector<DensityMatrix>> group_means;
  std::vector<std::size_t> group_sizes;
};

/// Trajectories are split into min(32, count) contiguous index groups; each
/// group is integrated in index order by one worker and groups are folded in
/// order, so the result does not depend on the worker count.
EnsembleResult run_ensemble(const QsdIntegrator& integrator, const EnsembleOptions& options);

/// Delete-one-group jackknife standard error of a nonlinear statistic of the
/// ensemble mean at one snapshot. Needs keep_group_means.
double group_jackknife_se(const EnsembleResult& result, std::size_t snapshot,
                          const std::function<double(const DensityMatrix&)>& statistic);

}  // namespace qbm
