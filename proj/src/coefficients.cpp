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

#include "qbm/coefficients.hpp"

#include <cmath>
#include <sstream>

#include "qbm/error.hpp"
#include "qbm/timeseries.hpp"

namespace qbm {

namespace {

constexpr cd I{0.0, 1.0};

// alpha(j h) for j = 0..steps.
std::vector<cd> kernel_samples(const CorrelationKernel& kernel, double h, std::size_t steps) {
  std::vector<cd> a(steps + 1);
  if (kernel.exponential_rate) {
    const cd a0 = kernel.values.front();
    for (std::size_t j = 0; j <= steps; ++j) a[j] = a0 * std::exp(-*kernel.exponential_rate * h * double(j));
    return a;
  }
  const double ratio = h / kernel.dt;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "kernel spacing " << kernel.dt << " does not divide the solver step " << h;
    throw Error(ErrorCode::Domain, msg.str());
  }
  const auto stride = static_cast<std::size_t>(m);
  if ((kernel.size() - 1) < steps * stride) throw Error(ErrorCode::Domain, "kernel grid shorter than the solver grid");
  for (std::size_t j = 0; j <= steps; ++j) a[j] = kernel.values[j * stride];
  return a;
}

struct AmplitudeSolution {
  std::vector<cd> u;  // regular amplitude, u(0) = 1
  std::vector<cd> N;  // int_0^t alpha(t - s) u(s) ds
};

// Trapezoid in s, trapezoidal rule in t:
//   u_j = u_{j-1} + h/2 [-i Omega (u_{j-1} + u_j) - 2 (N_{j-1} + N_j)],
//   N_j = P_j + h/2 alpha(0) u_j,
// where P_j collects the history. Linear in u_j, so each step is an exact solve.
AmplitudeSolution trapezoid_amplitude(const CorrelationKernel& kernel, double Omega, double h, std::size_t steps) {
  const std::vector<cd> a = kernel_samples(kernel, h, steps);
  AmplitudeSolution sol;
  sol.u.assign(steps + 1, cd{});
  sol.N.assign(steps + 1, cd{});
  sol.u[0] = 1.0;

  const cd lhs = 1.0 + 0.5 * I * Omega * h + 0.5 * h * h * a[0];
  const cd keep = 1.0 - 0.5 * I * Omega * h;

  const bool exponential = kernel.exponential_rate.has_value();
  const double decay = exponential ? std::exp(-*kernel.exponential_rate * h) : 0.0;
  cd Q = 0.0;  // sum_{i<j} w_i e^{-c (j-i) h} u_i, exponential kernels only

  for (std::size_t j = 1; j <= steps; ++j) {
    cd P;
    if (exponential) {
      Q = decay * (Q + (j == 1 ? 0.5 : 1.0) * sol.u[j - 1]);
      P = h * a[0] * Q;
    } else {
      cd acc = 0.5 * a[j] * sol.u[0];
      for (std::size_t i = 1; i < j; ++i) acc += a[j - i] * sol.u[i];
      P = h * acc;
    }
    const cd uj = (keep * sol.u[j - 1] - h * sol.N[j - 1] - h * P) / lhs;
    sol.u[j] = uj;
    sol.N[j] = P + 0.5 * h * a[0] * uj;
  }
  return sol;
}

}  // namespace

void CoefficientSpec::validate() const {
  if (!(Gamma >= 0.0) || !std::isfinite(Gamma)) throw Error(ErrorCode::Config, "Gamma must be >= 0");
  if (!(gamma_env > 0.0) || !std::isfinite(gamma_env)) throw Error(ErrorCode::Config, "gamma must be > 0");
  if (!(Omega >= 0.0) || !std::isfinite(Omega)) throw Error(ErrorCode::Config, "Omega must be >= 0");
}

cd riccati_rhs(cd F, const CoefficientSpec& spec) {
  return 2.0 * F * F - (spec.gamma_env - I * spec.Omega) * F + 0.5 * spec.Gamma * spec.gamma_env;
}

CharacteristicRoots characteristic_roots(const CoefficientSpec& spec) {
  const cd b = spec.gamma_env - I * spec.Omega;
  const cd delta = b * b - 4.0 * spec.Gamma * spec.gamma_env;
  const cd s = std::sqrt(delta);
  return {0.5 * (-b + s), 0.5 * (-b - s), delta};
}

cd analytic_F(cd l1, cd l2, double t) {
  if (t == 0.0) return 0.0;
  // Factor out the faster-growing exponential so large t neither overflows nor
  // collapses to 0/0.
  if (l1.real() >= l2.real()) {
    const cd e = std::exp((l2 - l1) * t);
    return (-l1 + l1 * e) / (2.0 * (1.0 - (l1 / l2) * e));
  }
  const cd e = std::exp((l1 - l2) * t);
  return (-l1 * e + l1) / (2.0 * (e - l1 / l2));
}

cd analytic_F(const CoefficientSpec& spec, double t) {
  spec.validate();
  const CharacteristicRoots roots = characteristic_roots(spec);
  if (std::abs(roots.delta) == 0.0) {
    throw Error(ErrorCode::DegenerateRoots,
                "characteristic roots coincide (delta = 0); perturb gamma slightly to leave the confluent case");
  }
  return analytic_F(roots.lambda1, roots.lambda2, t);
}

Markovianity classify_markovianity(const CoefficientSpec& spec) {
  const double disc = spec.gamma_env * spec.gamma_env - 4.0 * spec.Gamma * spec.gamma_env;
  return (spec.Omega != 0.0 || disc < 0.0) ? Markovianity::NonMarkovian : Markovianity::Markovian;
}

RiccatiFixedPoints riccati_fixed_points(const CoefficientSpec& spec) {
  const double disc = spec.gamma_env * spec.gamma_env - 4.0 * spec.Gamma * spec.gamma_env;
  if (spec.Omega != 0.0 || !(disc > 0.0)) {
    throw Error(ErrorCode::Domain, "real fixed points need Omega = 0 and gamma^2 > 4 Gamma gamma");
  }
  const double lo = (spec.gamma_env - std::sqrt(disc)) / 4.0;
  const double hi = (spec.gamma_env + std::sqrt(disc)) / 4.0;
  // d(rhs)/dF = 4F - gamma: negative at the attractor.
  if (!(4.0 * lo - spec.gamma_env < 0.0 && 4.0 * hi - spec.gamma_env > 0.0)) {
    throw Error(ErrorCode::Numerical, "fixed-point stability check failed");
  }
  return {lo, hi};
}

CoefficientTrajectory::CoefficientTrajectory(TimeGrid grid, std::vector<cd> F, std::vector<cd> amplitude)
    : grid_(grid), F_(std::move(F)), u_(std::move(amplitude)) {
  if (F_.size() != grid_.size() || u_.size() != grid_.size()) {
    throw Error(ErrorCode::Domain, "coefficient arrays do not match the grid");
  }
}

cd CoefficientTrajectory::at(double t) const {
  if (F_.empty()) throw Error(ErrorCode::Domain, "empty coefficient trajectory");
  const double x = t / grid_.dt;
  if (x < -1e-9 || x > double(grid_.steps) + 1e-9) {
    std::ostringstream msg;
    msg << "t = " << t << " outside the coefficient grid [0, " << grid_.end() << "]";
    throw Error(ErrorCode::Domain, msg.str());
  }
  const double xr = std::round(x);
  if (std::abs(x - xr) < 1e-9) return F_[static_cast<std::size_t>(xr)];
  const auto j = static_cast<std::size_t>(std::floor(x));
  const double w = x - double(j);
  return (1.0 - w) * F_[j] + w * F_[j + 1];
}

cd CoefficientTrajectory::memory(std::size_t j, std::size_t i) const {
  if (i > j || j >= u_.size()) throw Error(ErrorCode::Domain, "memory(t_j, s_i) needs i <= j on the grid");
  if (i == j) return 1.0;
  return u_[i] / u_[j];
}

void CoefficientTrajectory::build_history(std::size_t max_rows) {
  if (u_.size() > max_rows) {
    throw Error(ErrorCode::Domain, "history table limited to " + std::to_string(max_rows) + " rows");
  }
  history_.assign(u_.size(), {});
  for (std::size_t j = 0; j < u_.size(); ++j) {
    history_[j].resize(j + 1);
    for (std::size_t i = 0; i <= j; ++i) history_[j][i] = memory(j, i);
  }
}

std::optional<double> CoefficientTrajectory::first_pole(double t_end) const {
  for (std::size_t j = 0; j + 1 < u_.size() && time(j) < t_end; ++j) {
    if (u_[j] == 0.0 || (u_[j] * std::conj(u_[j + 1])).real() <= 0.0) return time(j) + 0.5 * grid_.dt;
  }
  return std::nullopt;
}

CoefficientTrajectory solve_F_general(const CorrelationKernel& kernel, double Omega, const TimeGrid& grid,
                                      const VolterraOptions& options) {
  if (kernel.values.empty()) throw Error(ErrorCode::Domain, "empty correlation kernel");
  if (!std::isfinite(Omega)) throw Error(ErrorCode::Domain, "Omega must be finite");
  const std::size_t n = grid.steps;

  AmplitudeSolution coarse = trapezoid_amplitude(kernel, Omega, grid.dt, n);
  std::vector<cd> u = std::move(coarse.u);
  std::vector<cd> N = std::move(coarse.N);
  if (options.richardson && n > 0) {
    const AmplitudeSolution fine = trapezoid_amplitude(kernel, Omega, 0.5 * grid.dt, 2 * n);
    for (std::size_t j = 0; j <= n; ++j) {
      u[j] = (4.0 * fine.u[2 * j] - u[j]) / 3.0;
      N[j] = (4.0 * fine.N[2 * j] - N[j]) / 3.0;
    }
  }

  std::vector<cd> F(n + 1);
  F[0] = 0.0;
  u[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    if (!std::isfinite(u[j].real()) || !std::isfinite(u[j].imag())) {
      std::ostringstream msg;
      msg << "amplitude became non-finite at t = " << grid.time(j);
      throw Error(ErrorCode::Convergence, msg.str());
    }
    F[j] = N[j] / u[j];
  }
  CoefficientTrajectory out(grid, std::move(F), std::move(u));
  if (options.store_history) out.build_history();
  return out;
}

CoefficientTrajectory lorentzian_coefficients(const CoefficientSpec& spec, const TimeGrid& grid,
                                              const VolterraOptions& options) {
  spec.validate();
  BathSpec bath;
  bath.family = KernelFamily::Lorentzian;
  bath.Gamma = spec.Gamma;
  bath.gamma_env = spec.gamma_env;
  return solve_F_general(make_kernel(bath, TimeGrid{grid.dt, 0}), spec.Omega, grid, options);
}

void write_coefficients_csv(const CoefficientTrajectory& trajectory, const std::filesystem::path& path) {
  TimeSeries series({"re_F", "im_F"});
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    series.append(trajectory.time(j), {trajectory.F(j).real(), trajectory.F(j).imag()});
  }
  series.write_csv(path);
}

}  // namespace qbm
