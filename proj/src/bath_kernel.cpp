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

#include "qbm/bath_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbm/error.hpp"
#include "qbm/timeseries.hpp"

namespace qbm {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void BathSpec::validate() const {
  switch (family) {
    case KernelFamily::Lorentzian:
      if (!nonnegative_finite(Gamma)) throw Error(ErrorCode::Config, "bath.Gamma must be >= 0");
      if (!positive_finite(gamma_env)) throw Error(ErrorCode::Config, "bath.gamma must be > 0");
      break;
    case KernelFamily::SuperOhmic:
      if (!nonnegative_finite(gamma_J)) throw Error(ErrorCode::Config, "bath.gamma_J must be >= 0");
      if (!positive_finite(Lambda)) throw Error(ErrorCode::Config, "bath.Lambda must be > 0");
      if (!(std::isfinite(temperature) && temperature >= 0.0)) {
        throw Error(ErrorCode::Config, "bath.temperature must be >= 0");
      }
      break;
    case KernelFamily::Tabulated:
      break;
  }
}

cd CorrelationKernel::at(double tau) const {
  if (values.empty()) throw Error(ErrorCode::Domain, "empty correlation kernel");
  if (tau < 0.0) return std::conj(at(-tau));
  if (exponential_rate) return values.front() * std::exp(-*exponential_rate * tau);
  const double x = tau / dt;
  const auto j = static_cast<std::size_t>(std::floor(x));
  if (j + 1 >= values.size()) {
    if (j + 1 == values.size() && x - static_cast<double>(j) < 1e-9) return values.back();
    throw Error(ErrorCode::Domain, "tau beyond the tabulated kernel range");
  }
  const double w = x - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

cd lorentzian_kernel(const BathSpec& spec, double tau) {
  if (spec.family != KernelFamily::Lorentzian) {
    throw Error(ErrorCode::Config, "lorentzian_kernel requires a Lorentzian bath");
  }
  if (tau < 0.0) throw Error(ErrorCode::Domain, "lorentzian_kernel expects tau >= 0");
  return {0.5 * spec.Gamma * spec.gamma_env * std::exp(-spec.gamma_env * tau), 0.0};
}

double superohmic_spectral_density(double omega, double gamma_J, double Lambda) {
  if (omega < 0.0) throw Error(ErrorCode::Domain, "spectral density needs omega >= 0");
  return gamma_J * omega * omega * omega * std::exp(-omega / Lambda);
}

CorrelationKernel kernel_from_spectral_density(const BathSpec& spec, const TimeGrid& grid,
                                               const QuadratureOptions& options) {
  if (spec.family != KernelFamily::SuperOhmic) {
    throw Error(ErrorCode::Config, "kernel_from_spectral_density requires a SuperOhmic bath");
  }
  spec.validate();
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double omega_max = options.omega_max_factor * spec.Lambda;
  const double T = spec.temperature;

  // J(w) coth(w / 2T); finite as w -> 0 because J ~ w^3.
  auto thermal_weight = [&](double w) {
    const double J = superohmic_spectral_density(w, spec.gamma_J, spec.Lambda);
    if (T == 0.0 || w == 0.0) return J;
    return J / std::tanh(w / (2.0 * T));
  };

  CorrelationKernel kernel;
  kernel.dt = grid.dt;
  kernel.values.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double tau = grid.time(j);
    double err_re = 0.0, l1_re = 0.0, err_im = 0.0, l1_im = 0.0;
    const double re = Quad::integrate([&](double w) { return thermal_weight(w) * std::cos(w * tau); }, 0.0,
                                      omega_max, options.max_depth, options.relative_tolerance, &err_re, &l1_re);
    double im = 0.0;
    if (tau > 0.0) {
      im = -Quad::integrate(
          [&](double w) { return superohmic_spectral_density(w, spec.gamma_J, spec.Lambda) * std::sin(w * tau); },
          0.0, omega_max, options.max_depth, options.relative_tolerance, &err_im, &l1_im);
    }
    const double tol = options.relative_tolerance;
    if (err_re > tol * l1_re || err_im > tol * l1_im || !std::isfinite(re) || !std::isfinite(im)) {
      std::ostringstream msg;
      msg << "quadrature did not converge at tau=" << tau << " (error estimates " << err_re << ", " << err_im
          << "; L1 " << l1_re << ", " << l1_im << "; rtol " << tol << ")";
      throw Error(ErrorCode::Numerical, msg.str());
    }
    kernel.values[j] = {re, im};
  }
  return kernel;
}

CorrelationKernel make_kernel(const BathSpec& spec, const TimeGrid& grid) {
  spec.validate();
  switch (spec.family) {
    case KernelFamily::Lorentzian: {
      CorrelationKernel kernel;
      kernel.dt = grid.dt;
      kernel.values.resize(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) kernel.values[j] = lorentzian_kernel(spec, grid.time(j));
      kernel.exponential_rate = spec.gamma_env;
      return kernel;
    }
    case KernelFamily::SuperOhmic:
      return kernel_from_spectral_density(spec, grid);
    case KernelFamily::Tabulated:
      break;
  }
  throw Error(ErrorCode::Config, "tabulated kernels are loaded from file, not generated");
}

CorrelationKernel subsample(const CorrelationKernel& kernel, std::size_t stride) {
  if (stride == 0) throw Error(ErrorCode::Domain, "subsample stride must be >= 1");
  CorrelationKernel out;
  out.dt = kernel.dt * static_cast<double>(stride);
  out.exponential_rate = kernel.exponential_rate;
  for (std::size_t j = 0; j < kernel.size(); j += stride) out.values.push_back(kernel.values[j]);
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

namespace {

bool recursion_applicable(const CorrelationKernel& kernel) {
  return kernel.exponential_rate.has_value() && !kernel.values.empty() && kernel.values.front().imag() == 0.0 &&
         kernel.values.front().real() >= 0.0;
}

}  // namespace

NoiseSampler::NoiseSampler(CorrelationKernel kernel) : kernel_(std::move(kernel)) {
  method_ = recursion_applicable(kernel_) ? Method::Recursion : Method::Factorization;
  prepare();
}

NoiseSampler::NoiseSampler(CorrelationKernel kernel, Method method) : kernel_(std::move(kernel)), method_(method) {
  prepare();
}

void NoiseSampler::prepare() {
  const std::size_t n = kernel_.size();
  if (n == 0) throw Error(ErrorCode::Domain, "noise sampling needs a non-empty kernel grid");
  if (method_ == Method::Recursion) {
    if (!recursion_applicable(kernel_)) {
      throw Error(ErrorCode::KernelValidity, "exponential recursion needs a real, non-negative exponential kernel");
    }
    return;
  }
  if (n > max_tabulated_points) {
    throw Error(ErrorCode::Domain, "tabulated noise is limited to " + std::to_string(max_tabulated_points) +
                                       " lattice points; use a coarser dt");
  }
  if (std::abs(kernel_.values[0].imag()) > 1e-12 * std::max(1.0, std::abs(kernel_.values[0]))) {
    throw Error(ErrorCode::KernelValidity, "alpha(0) must be real");
  }
  // Pivoted Cholesky, stopped once the largest remaining pivot is negligible.
  // Smooth kernels give numerically low-rank covariances, where a full LDLT
  // produces huge multipliers around the vanishing pivots.
  auto cov = [&](std::size_t i, std::size_t j) {
    return i >= j ? kernel_.values[i - j] : std::conj(kernel_.values[j - i]);
  };
  const double scale = std::max(kernel_.values[0].real(), 1e-300);
  const double stop = 1e-13 * scale;
  std::vector<double> diag(n, kernel_.values[0].real());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  DenseMatrix columns = DenseMatrix::Zero(static_cast<Eigen::Index>(n), 0);
  std::size_t rank = 0;
  for (; rank < n; ++rank) {
    std::size_t best = rank;
    for (std::size_t i = rank + 1; i < n; ++i)
      if (diag[order[i]] > diag[order[best]]) best = i;
    if (diag[order[best]] <= stop) break;
    std::swap(order[rank], order[best]);
    const std::size_t p = order[rank];
    const double pivot = std::sqrt(diag[p]);
    columns.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(rank + 1));
    columns.col(static_cast<Eigen::Index>(rank)).setZero();
    columns(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(rank)) = pivot;
    const auto prev = columns.leftCols(static_cast<Eigen::Index>(rank));
    for (std::size_t m = rank + 1; m < n; ++m) {
      const std::size_t i = order[m];
      const cd dot = rank == 0 ? cd{} : cd(prev.row(static_cast<Eigen::Index>(p)).dot(prev.row(static_cast<Eigen::Index>(i))));
      const cd v = (cov(i, p) - dot) / pivot;
      columns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(rank)) = v;
      diag[i] -= std::norm(v);
    }
  }
  double worst = 0.0;
  for (std::size_t m = rank; m < n; ++m) worst = std::min(worst, diag[order[m]]);
  if (worst < -1e-8 * scale) {
    std::ostringstream msg;
    msg << "kernel covariance is not positive semidefinite (residual pivot " << worst << ", alpha(0) " << scale << ")";
    throw Error(ErrorCode::KernelValidity, msg.str());
  }
  factor_ = std::move(columns);
}

NoiseRealization NoiseSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  return sample(seed, index, kernel_.size());
}

NoiseRealization NoiseSampler::sample(std::uint64_t seed, std::uint64_t index, std::size_t points) const {
  const std::size_t n = kernel_.size();
  if (points > n) throw Error(ErrorCode::Domain, "requested more noise points than the kernel grid holds");
  std::mt19937_64 gen(stream_seed(seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&]() {
    const double re = normal(gen);
    const double im = normal(gen);
    return cd(re, im) * M_SQRT1_2;
  };

  NoiseRealization out;
  out.dt = kernel_.dt;
  out.seed = seed;
  out.index = index;
  out.z_star.resize(points);
  if (method_ == Method::Recursion) {
    const double a0 = kernel_.values.front().real();
    const double phi = std::exp(-*kernel_.exponential_rate * kernel_.dt);
    const double kick = std::sqrt(a0 * (1.0 - phi * phi));
    cd z = std::sqrt(a0) * draw();
    for (std::size_t j = 0; j < points; ++j) {
      if (j > 0) z = phi * z + kick * draw();
      out.z_star[j] = std::conj(z);
    }
    return out;
  }
  Eigen::VectorXcd xi(factor_.cols());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = draw();
  const Eigen::VectorXcd z = factor_ * xi;
  for (std::size_t j = 0; j < points; ++j) out.z_star[j] = std::conj(z[j]);
  return out;
}

void write_kernel_csv(const CorrelationKernel& kernel, const std::filesystem::path& path) {
  std::string text = "tau,re_alpha,im_alpha\n";
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    text += format_number(kernel.tau(j));
    text += ',';
    text += format_number(kernel.values[j].real());
    text += ',';
    text += format_number(kernel.values[j].imag());
    text += '\n';
  }
  write_text_file(path, text);
}

CorrelationKernel read_kernel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open kernel file " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> taus;
  CorrelationKernel kernel;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    double tau = 0.0, re = 0.0, im = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> tau >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',') {
      throw Error(ErrorCode::Config, "malformed kernel row: " + line);
    }
    taus.push_back(tau);
    kernel.values.emplace_back(re, im);
  }
  if (taus.size() < 2 || taus.front() != 0.0) {
    throw Error(ErrorCode::Config, "kernel file needs >= 2 rows starting at tau = 0");
  }
  kernel.dt = taus[1] - taus[0];
  for (std::size_t j = 1; j < taus.size(); ++j) {
    if (std::abs(taus[j] - kernel.dt * static_cast<double>(j)) > 1e-9 * std::max(1.0, taus[j])) {
      throw Error(ErrorCode::Config, "kernel file lattice is not uniform");
    }
  }
  return kernel;
}

}  // namespace qbm
