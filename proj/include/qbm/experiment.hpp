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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/coefficients.hpp"
#include "qbm/config.hpp"
#include "qbm/gaussian.hpp"

namespace qbm {

enum class RunMode { Master, Qsd, Gaussian, Compare, Sweep };

const char* mode_name(RunMode mode);

/// Kernel on a dt/2 lattice and F(t) on a dt/2 grid, the resolution every
/// integrator needs for its RK4 stages.
struct PreparedDynamics {
  CorrelationKernel kernel;
  std::shared_ptr<const CoefficientTrajectory> coefficient;
};
PreparedDynamics prepare_dynamics(const ExperimentConfig& config);

/// Covariance matrix of a Gaussian initial state; throws Config for cat and
/// excited Fock states.
CovarianceMatrix initial_covariance(const StateKind& kind);

struct SweepRow {
  double freq = 0.0;
  double late_energy = 0.0;  // mean over snapshots in the final 10% of the window
  double late_EN = 0.0;
  double peak_EN = 0.0;
};

/// One master-equation run per drive frequency; rows sorted by frequency.
/// Requires a sinusoid control schedule.
std::vector<SweepRow> sweep_drive_frequency(const ExperimentConfig& base, const std::vector<double>& frequencies,
                                            unsigned workers = 0);

/// $QBM_OUT_ROOT (if set) or output.directory, then "<mode>-seed<seed>".
std::filesystem::path default_run_dir(const ExperimentConfig& config, RunMode mode);

/// Runs and writes config.json, manifest.json, observables.csv, kernel.csv,
/// coefficients.csv and mode-specific files into `run_dir` (default_run_dir
/// when empty). The manifest records failures before the error is rethrown.
std::filesystem::path run_experiment(const ExperimentConfig& config, RunMode mode,
                                     const std::filesystem::path& run_dir = {});

}  // namespace qbm
