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
#include <string>
#include <string_view>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/control.hpp"
#include "qbm/hilbert.hpp"

namespace qbm {

inline constexpr int kConfigSchemaVersion = 1;

enum class QsdSolver { Linear, Nonlinear };

/// Everything needed to reproduce a run. Parsed from JSON; see README for the
/// schema.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;

  // system
  double Omega = 1.0;
  TruncationSpec trunc;
  double leakage_limit = kLeakageError;  // run abort threshold

  // bath
  BathSpec bath;
  std::string kernel_file;  // tabulated kernels only, resolved against the config directory

  // grid
  double t_end = 5.0;
  double dt = 1e-3;

  StateKind initial = TwoModeSqueezedState{0.3};
  ControlSchedule control;

  // solver
  QsdSolver qsd_solver = QsdSolver::Linear;
  bool richardson = true;

  // ensemble
  std::size_t trajectories = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::size_t debug_trajectories = 0;

  // output
  std::size_t stride = 10;
  std::string output_dir = "runs";
  bool plot_script = true;
  bool raw_rho = false;

  std::vector<double> sweep_frequencies;

  /// Throws Config naming the offending field.
  void validate() const;
};

/// `base_dir` resolves a relative bath.file.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace qbm
