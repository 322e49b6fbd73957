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
#include <optional>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/types.hpp"

namespace qbm {

/// Parameters of the Lorentzian memory coefficient: dF/dt = 2F^2 - (gamma - i Omega) F + Gamma gamma / 2.
struct CoefficientSpec {
  double Gamma = 1.0;
  double gamma_env = 5.0;
  double Omega = 0.0;

  void validate() const;
};

enum class Markovianity { Markovian, NonMarkovian };

cd riccati_rhs(cd F, const CoefficientSpec& spec);

/// Roots of lambda^2 + (gamma - i Omega) lambda + Gamma gamma = 0, labeled
/// lambda_{1,2} = (-(gamma - i Omega) +- sqrt(delta)) / 2 with the principal root.
struct CharacteristicRoots {
  cd lambda1;
  cd lambda2;
  cd delta;
};

CharacteristicRoots characteristic_roots(const CoefficientSpec& spec);

/// Closed-form F(t) = -y'/(2y) for y'' + (gamma - i Omega) y' + Gamma gamma y = 0,
/// y(0) = 1, y'(0) = 0. Throws DegenerateRoots when delta == 0.
cd analytic_F(const CoefficientSpec& spec, double t);
/// Same expression for an explicit root labeling (the result is symmetric in the labels).
cd analytic_F(cd lambda1, cd lambda2, double t);

/// Non-Markovian iff Omega != 0 or gamma^2 - 4 Gamma gamma < 0.
Markovianity classify_markovianity(const CoefficientSpec& spec);

/// Fixed points of riccati_rhs for Omega = 0 and gamma^2 > 4 Gamma gamma. The
/// attractor is the one with the smaller |2F|; asserted via the sign of
/// d(rhs)/dF = 4F - gamma.
struct RiccatiFixedPoints {
  double stable;
  double unstable;
};
RiccatiFixedPoints riccati_fixed_points(const CoefficientSpec& spec);

/// F(t) on a uniform grid, together with the regular amplitude u(t) that
/// defines the memory function: f(t, s) = u(s) / u(t).
///
/// F = N/u diverges where u crosses zero (strong-coupling Lorentzian baths with
/// Omega = 0); u itself stays smooth there.
class CoefficientTrajectory {
 public:
  CoefficientTrajectory() = default;
  CoefficientTrajectory(TimeGrid grid, std::vector<cd> F, std::vector<cd> amplitude);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return F_.size(); }
  double time(std::size_t j) const { return grid_.time(j); }
  cd F(std::size_t j) const { return F_[j]; }
  cd amplitude(std::size_t j) const { return u_[j]; }
  const std::vector<cd>& F_values() const { return F_; }
  const std::vector<cd>& amplitudes() const { return u_; }

  /// Linear interpolation between grid points; exact on the grid.
  cd at(double t) const;

  /// f(t_j, s_i) for i <= j; f(t_j, t_j) == 1 exactly.
  cd memory(std::size_t j, std::size_t i) const;

  bool has_history() const { return !history_.empty(); }
  /// Triangular table, row j holds f(t_j, s_0..s_j).
  const std::vector<std::vector<cd>>& history() const { return history_; }
  void build_history(std::size_t max_rows = 4096);

  /// First grid interval (returned as its midpoint) in which u passes through
  /// or next to zero, detected as a phase jump of at least 90 degrees between
  /// neighbouring samples. Empty when F stays finite on [0, t_end].
  std::optional<double> first_pole(double t_end) const;

 private:
  TimeGrid grid_;
  std::vector<cd> F_;
  std::vector<cd> u_;
  std::vector<std::vector<cd>> history_;
};

struct VolterraOptions {
  /// Combine the h and h/2 trapezoid solutions, (4 u_{h/2} - u_h) / 3.
  bool richardson = true;
  bool store_history = false;
};

/// Solves df/dt = i Omega f + 2 F(t) f, f(t, t) = 1, F(t) = int_0^t alpha(t-s) f(t,s) ds
/// on `grid`. The kernel lattice spacing must divide grid.dt (and grid.dt/2
/// when Richardson extrapolation is on), unless the kernel is exponential.
CoefficientTrajectory solve_F_general(const CorrelationKernel& kernel, double Omega, const TimeGrid& grid,
                                      const VolterraOptions& options = {});

/// Lorentzian shortcut: builds the exponential kernel and calls solve_F_general.
CoefficientTrajectory lorentzian_coefficients(const CoefficientSpec& spec, const TimeGrid& grid,
                                              const VolterraOptions& options = {});

/// Columns t, re_F, im_F.
void write_coefficients_csv(const CoefficientTrajectory& trajectory, const std::filesystem::path& path);

}  // namespace qbm
