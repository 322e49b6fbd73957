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


#include <cmath>
#include <numeric>

#include "doctest.h"
#include "qbm/bath_kernel.hpp"
#include "qbm/error.hpp"

using namespace qbm;

TEST_CASE("lorentzian kernel values") {
  BathSpec spec;
  spec.Gamma = 1.0;
  spec.gamma_env = 5.0;
  CHECK(lorentzian_kernel(spec, 0.0).real() == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(lorentzian_kernel(spec, 0.0).imag() == 0.0);
  CHECK(std::abs(lorentzian_kernel(spec, 20.0)) < 1e-40);
}

TEST_CASE("lorentzian kernel integrates to Gamma/2") {
  BathSpec spec;
  spec.Gamma = 1.0;
  spec.gamma_env = 5.0;
  const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(10.0, 1e-3));
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < k.size(); ++j) sum += 0.5 * k.dt * (k.values[j] + k.values[j + 1]).real();
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(k.exponential_rate.has_value());
  CHECK(*k.exponential_rate == 5.0);
}

TEST_CASE("lorentzian kernel rejects other families") {
  BathSpec spec;
  spec.family = KernelFamily::SuperOhmic;
  CHECK_THROWS_AS(lorentzian_kernel(spec, 0.0), Error);
}

TEST_CASE("super-ohmic spectral density") {
  CHECK(superohmic_spectral_density(0.0, 1.0, 1.0) == 0.0);
  CHECK(superohmic_spectral_density(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(superohmic_spectral_density(-1.0, 1.0, 1.0), Error);
  const double Lambda = 0.7;
  double best = 0.0, arg = 0.0;
  for (int i = 1; i <= 500000; ++i) {
    const double w = i * 1e-5;
    const double v = superohmic_spectral_density(w, 1.0, Lambda);
    if (v > best) best = v, arg = w;
  }
  CHECK(arg == doctest::Approx(3.0 * Lambda).epsilon(1e-4));
}

TEST_CASE("super-ohmic kernel at zero lag matches the Gamma-function integral") {
  BathSpec spec;
  spec.family = KernelFamily::SuperOhmic;
  spec.gamma_J = 0.8;
  spec.Lambda = 1.3;
  const CorrelationKernel k = kernel_from_spectral_density(spec, TimeGrid::covering(0.1, 0.01));
  CHECK(k.values[0].real() == doctest::Approx(6.0 * 0.8 * std::pow(1.3, 4)).epsilon(1e-8));
  CHECK(k.values[0].imag() == 0.0);
  CHECK(!k.exponential_rate.has_value());
}

TEST_CASE("vanishing spectral density gives a vanishing kernel") {
  BathSpec spec;
  spec.family = KernelFamily::SuperOhmic;
  spec.gamma_J = 0.0;
  const CorrelationKernel k = kernel_from_spectral_density(spec, TimeGrid::covering(1.0, 0.1));
  for (const cd& v : k.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("noise sampler") {
  SUBCASE("zero kernel gives zero noise") {
    CorrelationKernel k;
    k.dt = 0.01;
    k.values.assign(101, cd{0.0, 0.0});
    for (auto method : {NoiseSampler::Method::Recursion, NoiseSampler::Method::Factorization}) {
      if (method == NoiseSampler::Method::Recursion) k.exponential_rate = 1.0;
      const NoiseRealization z = NoiseSampler(k, method).sample(3, 4);
      for (const cd& v : z.z_star) CHECK(std::abs(v) == 0.0);
    }
  }
  SUBCASE("determinism") {
    BathSpec spec;
    const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(1.0, 0.01));
    const NoiseSampler sampler(k);
    const auto a = sampler.sample(11, 5);
    const auto b = sampler.sample(11, 5);
    const auto c = sampler.sample(11, 6);
    CHECK(a.z_star == b.z_star);
    CHECK(a.z_star != c.z_star);
  }
  SUBCASE("variance matches alpha(0)") {
    BathSpec spec;
    spec.Gamma = 1.0;
    spec.gamma_env = 5.0;
    const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(0.05, 0.01));
    const NoiseSampler sampler(k);
    const std::size_t n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::norm(sampler.sample(2024, i).z_star[3]);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - 2.5) < 5.0 * se);
  }
  SUBCASE("recursion and factorization agree in covariance") {
    BathSpec spec;
    spec.Gamma = 1.0;
    spec.gamma_env = 3.0;
    const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(0.4, 0.05));
    const NoiseSampler rec(k, NoiseSampler::Method::Recursion);
    const NoiseSampler fac(k, NoiseSampler::Method::Factorization);
    const std::size_t n = 40000;
    cd c_rec{}, c_fac{};
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = rec.sample(9, i).z_star;
      const auto b = fac.sample(9, i).z_star;
      c_rec += a[6] * std::conj(a[2]);
      c_fac += b[6] * std::conj(b[2]);
    }
    c_rec /= double(n);
    c_fac /= double(n);
    const double expected = 1.5 * std::exp(-3.0 * 0.2);
    CHECK(std::abs(c_rec - expected) < 0.05);
    CHECK(std::abs(c_fac - expected) < 0.05);
  }
}

TEST_CASE("tabulated noise reproduces a smooth complex kernel") {
  // A smooth kernel gives a numerically low-rank covariance on a fine lattice.
  BathSpec spec;
  spec.family = KernelFamily::SuperOhmic;
  spec.gamma_J = 0.05;
  spec.Lambda = 1.0;
  const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(5.0, 0.0025));
  const NoiseSampler sampler(k);
  const std::size_t n = 4000, s = 1000;
  const std::size_t lags[] = {0, 100, 200, 400};
  cd sums[4] = {};
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = sampler.sample(77, i).z_star;
    for (int l = 0; l < 4; ++l) sums[l] += std::conj(z[s + lags[l]]) * z[s];
    sum2 += std::norm(z[s]) * std::norm(z[s]);
  }
  const double se = std::sqrt(sum2 / n) / std::sqrt(double(n));
  for (int l = 0; l < 4; ++l) {
    const cd mean = sums[l] / double(n);
    CHECK(std::abs(mean - k.values[lags[l]]) < 5.0 * se);
  }
}

TEST_CASE("indefinite kernel is rejected") {
  CorrelationKernel k;
  k.dt = 0.1;
  k.values = {cd(1.0, 0.0), cd(2.0, 0.0), cd(0.0, 0.0)};
  try {
    NoiseSampler sampler(k, NoiseSampler::Method::Factorization);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KernelValidity);
  }
}

TEST_CASE("kernel CSV round trip") {
  BathSpec spec;
  const CorrelationKernel k = make_kernel(spec, TimeGrid::covering(0.5, 0.05));
  const auto path = std::filesystem::temp_directory_path() / "qbm_kernel_roundtrip.csv";
  write_kernel_csv(k, path);
  const CorrelationKernel back = read_kernel_csv(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == k.size());
  CHECK(back.dt == doctest::Approx(k.dt));
  for (std::size_t j = 0; j < k.size(); ++j) CHECK(back.values[j] == k.values[j]);
}
