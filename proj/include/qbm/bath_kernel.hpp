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
#include <optional>
#include <vector>

#include "qbm/types.hpp"

namespace qbm {

enum class KernelFamily { Lorentzian, SuperOhmic, Tabulated };

/// Environment parameters in hbar = M = k_B = 1 units.
///
/// Lorentzian uses Gamma and gamma_env; SuperOhmic uses gamma_J, Lambda and
/// temperature. A Tabulated bath carries its kernel values directly.
struct BathSpec {
  KernelFamily family = KernelFamily::Lorentzian;
  double Gamma = 1.0;
  double gamma_env = 5.0;
  double gamma_J = 1.0;
  double Lambda = 1.0;
  double temperature = 0.0;

  void validate() const;
};

/// alpha(tau_j) on tau_j = j * dt, tau >= 0. alpha(-tau) = conj(alpha(tau)).
struct CorrelationKernel {
  double dt = 1e-3;
  std::vector<cd> values;
  /// Set when alpha(tau) = values[0] * exp(-rate * tau) exactly; enables O(1)
  /// memory-integral and noise recursions.
  std::optional<double> exponential_rate;

  std::size_t size() const { return values.size(); }
  double tau(std::size_t j) const { return static_cast<double>(j) * dt; }
  /// Linear interpolation on the lattice; exact for exponential kernels.
  cd at(double tau) const;
};

struct NoiseRealization {
  double dt = 1e-3;
  std::vector<cd> z_star;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

cd lorentzian_kernel(const BathSpec& spec, double tau);

/// J(omega) = gamma_J * omega^3 * exp(-omega / Lambda).
double superohmic_spectral_density(double omega, double gamma_J, double Lambda);

struct QuadratureOptions {
  double omega_max_factor = 50.0;  // integrate on [0, factor * Lambda]
  double relative_tolerance = 1e-8;
  unsigned max_depth = 18;
};

/// alpha(tau) = int_0^inf J(w) [coth(w/2T) cos(w tau) - i sin(w tau)] dw by
/// adaptive Gauss-Kronrod (61 points) per lattice point. coth == 1 at T = 0.
/// Throws Numerical if the error estimate exceeds tol * int|integrand|.
CorrelationKernel kernel_from_spectral_density(const BathSpec& spec, const TimeGrid& grid,
                                               const QuadratureOptions& options = {});

/// Kernel on `grid` for any family except Tabulated.
CorrelationKernel make_kernel(const BathSpec& spec, const TimeGrid& grid);

/// Keeps every `stride`-th sample.
CorrelationKernel subsample(const CorrelationKernel& kernel, std::size_t stride);

/// Colored complex Gaussian noise with M[z_t z*_s] = alpha(t - s), M[z_t z_s] = 0.
///
/// Exponential kernels use the exact discrete Ornstein-Uhlenbeck update.
/// Other kernels factor the lattice covariance once (pivoted LDL^T), which is
/// O(n^2) memory; lattices above max_tabulated_points are rejected.
class NoiseSampler {
 public:
  enum class Method { Recursion, Factorization };

  explicit NoiseSampler(CorrelationKernel kernel, Method method);
  explicit NoiseSampler(CorrelationKernel kernel);

  NoiseRealization sample(std::uint64_t seed, std::uint64_t index) const;
  NoiseRealization sample(std::uint64_t seed, std::uint64_t index, std::size_t points) const;

  const CorrelationKernel& kernel() const { return kernel_; }
  Method method() const { return method_; }

  static constexpr std::size_t max_tabulated_points = 4096;

 private:
  void prepare();

  CorrelationKernel kernel_;
  Method method_;
  DenseMatrix factor_;  // n x rank square root of the covariance (Factorization only)
};

/// Per-trajectory 64-bit seed derived from (seed, index) by splitmix64 mixing.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

void write_kernel_csv(const CorrelationKernel& kernel, const std::filesystem::path& path);
/// Reads the (tau, re_alpha, im_alpha) layout written by write_kernel_csv.
CorrelationKernel read_kernel_csv(const std::filesystem::path& path);

}  // namespace qbm
