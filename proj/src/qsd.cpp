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

#include "qbm/qsd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "qbm/error.hpp"
#include "qbm/timeseries.hpp"

namespace qbm {

namespace {

constexpr cd kI{0.0, 1.0};
constexpr double kNormFloor = 1e-12;
constexpr std::size_t kMaxGroups = 32;
constexpr std::size_t kMaxAttempts = 8;

bool finite(const Ket& psi) { return psi.allFinite(); }

cd expectation(const Ket& psi, const Ket& Apsi, double norm2) { return psi.dot(Apsi) / norm2; }

// The same formulas as the public rhs functions, with H psi assembled from the
// number and control operators so H never has to be rebuilt per stage.
struct StageOps {
  const ModeOperators& ops;
  double Omega;

  Ket H_apply(const Ket& psi, double k) const {
    Ket out = Omega * (ops.number * psi);
    if (k != 0.0) out += k * (ops.control * psi);
    return out;
  }
};

}  // namespace

Ket linear_qsd_rhs(const Ket& psi, cd z_star, cd F, const Operator& H, const Operator& L, const Operator& LdagL) {
  Ket out = -kI * (H * psi);
  out += z_star * (L * psi);
  out -= F * (LdagL * psi);
  return out;
}

Ket nonlinear_qsd_rhs(const Ket& psi, cd z_tilde_star, cd F, const Operator& H, const Operator& L,
                      const Operator& LdagL) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > kNormFloor * kNormFloor)) throw Error(ErrorCode::Numerical, "state norm underflow");
  const Ket Lpsi = L * psi;
  const Ket LdLpsi = LdagL * psi;
  const cd mL = expectation(psi, Lpsi, norm2);
  const cd mLdL = expectation(psi, LdLpsi, norm2);
  Ket out = -kI * (H * psi);
  out += z_tilde_star * (Lpsi - mL * psi);
  out -= F * (LdLpsi - std::conj(mL) * Lpsi);
  out += (F * (mLdL - std::norm(mL))) * psi;
  return out;
}

cd memory_integral(const std::vector<cd>& history, double h, const CorrelationKernel& kernel) {
  if (history.size() < 2) return 0.0;
  const std::size_t n = history.size() - 1;
  cd sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::conj(kernel.at(static_cast<double>(n - i) * h)) * history[i];
  }
  return h * sum;
}

cd shifted_noise(cd z_star, const std::vector<cd>& history, double h, const CorrelationKernel& kernel) {
  return z_star + memory_integral(history, h, kernel);
}

MemoryIntegral::MemoryIntegral(const CorrelationKernel& kernel, double h, bool force_generic)
    : kernel_(&kernel), h_(h) {
  if (kernel.exponential_rate && !kernel.values.empty() && !force_generic) {
    fast_ = true;
    alpha0_conj_ = std::conj(kernel.values.front());
    rate_ = *kernel.exponential_rate;
  }
}

void MemoryIntegral::push(cd m) {
  if (fast_ && !history_.empty()) {
    const double decay = std::exp(-rate_ * h_);
    recursive_ = decay * recursive_ + 0.5 * h_ * (decay * history_.back() + m);
  }
  history_.push_back(m);
}

cd MemoryIntegral::value_at(double delta, cd m_trial) const {
  if (history_.empty()) return 0.0;
  const cd last = history_.back();
  if (fast_) {
    const double decay = std::exp(-rate_ * delta);
    return alpha0_conj_ * (decay * recursive_ + 0.5 * delta * (decay * last + m_trial));
  }
  const std::size_t n = history_.size() - 1;
  const double t_last = static_cast<double>(n) * h_;
  cd sum = 0.0;
  for (std::size_t i = 0; i <= n && n > 0; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::conj(kernel_->at(t_last + delta - static_cast<double>(i) * h_)) * history_[i];
  }
  cd out = h_ * sum;
  out += 0.5 * delta * (std::conj(kernel_->at(delta)) * last + std::conj(kernel_->at(0.0)) * m_trial);
  return out;
}

QsdIntegrator::QsdIntegrator(QsdProblem problem, const TruncationSpec& trunc)
    : problem_(std::move(problem)), ops_(trunc), sampler_(problem_.kernel) {
  const QsdProblem& p = problem_;
  if (!(p.dt > 0.0) || !(p.t_end > 0.0)) throw Error(ErrorCode::Config, "qsd run needs dt > 0 and t_end > 0");
  if (p.stride == 0) throw Error(ErrorCode::Config, "snapshot stride must be positive");
  if (p.psi0.size() != static_cast<Eigen::Index>(trunc.dim()))
    throw Error(ErrorCode::Config, "initial state does not match the truncation");
  if (!p.coefficient) throw Error(ErrorCode::Config, "qsd run has no coefficient trajectory");
  steps_ = static_cast<std::size_t>(std::llround(p.t_end / p.dt));
  h_ = p.t_end / static_cast<double>(steps_);
  const std::size_t fine_points = 2 * steps_ + 1;
  const double half = 0.5 * h_;
  if (std::abs(p.coefficient->grid().dt - half) > 1e-9 * half || p.coefficient->size() < fine_points)
    throw Error(ErrorCode::Config, "qsd coefficient trajectory must be sampled at dt/2 over [0, t_end]");
  if (std::abs(p.kernel.dt - half) > 1e-9 * half || p.kernel.size() < fine_points)
    throw Error(ErrorCode::Config, "qsd kernel lattice must have spacing dt/2 over [0, t_end]");
  if (auto pole = p.coefficient->first_pole(p.t_end)) {
    std::ostringstream msg;
    msg << "F(t) diverges near t=" << *pole << "; the convolutionless trajectory equation is undefined there"
        << " (shorten grid.t_end below the pole)";
    throw Error(ErrorCode::SingularGenerator, msg.str());
  }
  for (std::size_t j = 0; j < steps_; ++j)
    if (j % p.stride == 0) snapshot_steps_.push_back(j);
  snapshot_steps_.push_back(steps_);
}

std::vector<double> QsdIntegrator::snapshot_times() const {
  std::vector<double> out;
  out.reserve(snapshot_steps_.size());
  for (std::size_t s : snapshot_steps_) out.push_back(h_ * static_cast<double>(s));
  return out;
}

TrajectoryOutcome QsdIntegrator::run(std::uint64_t seed, std::uint64_t noise_index,
                                     const TrajectoryObserver& observer) const {
  if (problem_.zero_noise) {
    NoiseRealization zero;
    zero.dt = 0.5 * h_;
    zero.z_star.assign(2 * steps_ + 1, cd{});
    zero.seed = seed;
    zero.index = noise_index;
    return run(zero, observer);
  }
  return run(sampler_.sample(seed, noise_index, 2 * steps_ + 1), observer);
}

TrajectoryOutcome QsdIntegrator::run(const NoiseRealization& noise, const TrajectoryObserver& observer) const {
  if (noise.z_star.size() < 2 * steps_ + 1) throw Error(ErrorCode::Config, "noise realization too short");
  const QsdProblem& p = problem_;
  const CoefficientTrajectory& coef = *p.coefficient;
  const StageOps stage{ops_, p.Omega};
  const bool nonlinear = p.kind == QsdKind::Nonlinear;

  TrajectoryOutcome outcome;
  Ket psi = p.psi0;
  const double norm0 = psi.norm();

  MemoryIntegral memory(p.kernel, h_);
  if (nonlinear) memory.push(std::conj(expectation(psi, ops_.L * psi, psi.squaredNorm())));

  std::size_t next_snapshot = 0;
  auto emit = [&](std::size_t step) {
    if (next_snapshot < snapshot_steps_.size() && snapshot_steps_[next_snapshot] == step) {
      if (observer) observer(next_snapshot, h_ * static_cast<double>(step), psi);
      ++next_snapshot;
    }
  };
  emit(0);

  for (std::size_t j = 0; j < steps_; ++j) {
    const double t = h_ * static_cast<double>(j);
    // Stage offset in half steps: 0, 1, 1, 2.
    auto f = [&](unsigned half_steps, const Ket& x) -> Ket {
      const std::size_t idx = 2 * j + half_steps;
      const double delta = 0.5 * h_ * half_steps;
      const cd F = coef.F(idx);
      const cd z = noise.z_star[idx];
      const double k = p.schedule.evaluate(t + delta);
      const Ket Hx = stage.H_apply(x, k);
      const Ket Lx = ops_.L * x;
      const Ket LdLx = ops_.LdagL * x;
      Ket out = -kI * Hx;
      if (!nonlinear) {
        out += z * Lx;
        out -= F * LdLx;
        return out;
      }
      const double norm2 = x.squaredNorm();
      const cd mL = expectation(x, Lx, norm2);
      const cd mLdL = expectation(x, LdLx, norm2);
      const cd zt = z + memory.value_at(delta, std::conj(mL));
      out += zt * (Lx - mL * x);
      out -= F * (LdLx - std::conj(mL) * Lx);
      out += (F * (mLdL - std::norm(mL))) * x;
      return out;
    };
    const Ket k1 = f(0, psi);
    const Ket k2 = f(1, psi + (0.5 * h_) * k1);
    const Ket k3 = f(1, psi + (0.5 * h_) * k2);
    const Ket k4 = f(2, psi + h_ * k3);
    psi += (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double norm = psi.norm();
    if (!finite(psi) || !(norm > kNormFloor)) {
      outcome.ok = false;
      outcome.final_norm = norm;
      return outcome;
    }
    if (nonlinear) {
      outcome.max_norm_drift = std::max(outcome.max_norm_drift, std::abs(norm - norm0));
      memory.push(std::conj(expectation(psi, ops_.L * psi, norm * norm)));
    }
    emit(j + 1);
  }
  outcome.final_norm = psi.norm();
  return outcome;
}

namespace {

struct GroupAccumulator {
  std::vector<DenseMatrix> sum;
  std::vector<double> sumsq;
  std::size_t size = 0;
  std::size_t failures = 0;
  std::size_t resamples = 0;
  double max_norm_drift = 0.0;
};

void write_debug_csv(const std::filesystem::path& path, const std::vector<double>& times, const std::vector<Ket>& kets,
                     const Operator& L) {
  TimeSeries ts({"re_L", "im_L", "norm"});
  for (std::size_t s = 0; s < kets.size(); ++s) {
    const double n2 = kets[s].squaredNorm();
    const cd mL = kets[s].dot(L * kets[s]) / n2;
    ts.append(times[s], {mL.real(), mL.imag(), std::sqrt(n2)});
  }
  ts.write_csv(path);
}

}  // namespace

EnsembleResult run_ensemble(const QsdIntegrator& integrator, const EnsembleOptions& options) {
  if (options.count == 0) throw Error(ErrorCode::Config, "ensemble.trajectories must be at least 1");
  const std::size_t count = options.count;
  const std::size_t groups = std::min(kMaxGroups, count);
  const auto times = integrator.snapshot_times();
  const std::size_t snaps = times.size();
  const auto d = static_cast<Eigen::Index>(integrator.operators().trunc.dim());
  const bool normalize = integrator.problem().kind == QsdKind::Nonlinear;
  const Operator& L = integrator.operators().L;

  if (options.debug_dir) std::filesystem::create_directories(*options.debug_dir);

  std::vector<GroupAccumulator> acc(groups);
  std::vector<std::exception_ptr> errors(groups);

  auto process_group = [&](std::size_t g) {
    GroupAccumulator& a = acc[g];
    a.sum.assign(snaps, DenseMatrix::Zero(d, d));
    a.sumsq.assign(snaps, 0.0);
    std::vector<Ket> kets(snaps);
    const std::size_t begin = g * count / groups;
    const std::size_t end = (g + 1) * count / groups;
    for (std::size_t i = begin; i < end; ++i) {
      TrajectoryOutcome outcome;
      std::size_t attempt = 0;
      for (; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t noise_index = i + static_cast<std::uint64_t>(count) * attempt;
        outcome = integrator.run(options.seed, noise_index,
                                 [&](std::size_t s, double, const Ket& psi) { kets[s] = psi; });
        if (outcome.ok) break;
      }
      if (!outcome.ok) {
        std::ostringstream msg;
        msg << "trajectory " << i << " failed " << kMaxAttempts << " times in a row";
        throw Error(ErrorCode::Run, msg.str());
      }
      if (attempt > 0) {
        ++a.failures;
        a.resamples += attempt;
      }
      a.max_norm_drift = std::max(a.max_norm_drift, outcome.max_norm_drift);
      for (std::size_t s = 0; s < snaps; ++s) {
        const double n2 = kets[s].squaredNorm();
        const double scale = normalize ? 1.0 / n2 : 1.0;
        a.sum[s].noalias() += scale * (kets[s] * kets[s].adjoint());
        a.sumsq[s] += normalize ? 1.0 : n2 * n2;
      }
      ++a.size;
      if (options.debug_dir && i < options.debug_count)
        write_debug_csv(*options.debug_dir / ("trajectory-" + std::to_string(i) + ".csv"), times, kets, L);
    }
  };

  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, groups));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g = next++; g < groups; g = next++) {
      try {
        process_group(g);
      } catch (...) {
        errors[g] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EnsembleResult out;
  out.times = times;
  out.count = count;
  out.rho_mean.assign(snaps, DenseMatrix::Zero(d, d));
  std::vector<double> sumsq(snaps, 0.0);
  for (const auto& a : acc) {
    for (std::size_t s = 0; s < snaps; ++s) {
      out.rho_mean[s] += a.sum[s];
      sumsq[s] += a.sumsq[s];
    }
    out.failures += a.failures;
    out.resamples += a.resamples;
    out.max_norm_drift = std::max(out.max_norm_drift, a.max_norm_drift);
    out.group_sizes.push_back(a.size);
  }
  const double n = static_cast<double>(count);
  out.standard_error.resize(snaps);
  for (std::size_t s = 0; s < snaps; ++s) {
    out.rho_mean[s] /= n;
    const double var = (sumsq[s] - n * out.rho_mean[s].squaredNorm()) / (n * (n - 1.0));
    out.standard_error[s] = count > 1 ? std::sqrt(std::max(0.0, var)) : std::nan("");
    out.max_leakage = std::max(out.max_leakage, leakage(out.rho_mean[s], integrator.operators().trunc));
  }
  if (options.keep_group_means) {
    out.group_means.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) {
      out.group_means[g].resize(snaps);
      for (std::size_t s = 0; s < snaps; ++s) out.group_means[g][s] = acc[g].sum[s] / static_cast<double>(acc[g].size);
    }
  }

  if (out.failures * 100 > count) {
    std::ostringstream msg;
    msg << out.failures << " of " << count << " trajectories failed (limit 1%)";
    throw Error(ErrorCode::Run, msg.str());
  }
  if (out.max_leakage > options.leakage_limit) {
    std::ostringstream msg;
    msg << "ensemble population " << out.max_leakage << " on the top Fock level; increase system.levels";
    throw Error(ErrorCode::Truncation, msg.str());
  }
  return out;
}

double group_jackknife_se(const EnsembleResult& result, std::size_t snapshot,
                          const std::function<double(const DensityMatrix&)>& statistic) {
  const std::size_t G = result.group_means.size();
  if (G < 2) throw Error(ErrorCode::Domain, "group jackknife needs stored group means from at least two groups");
  if (snapshot >= result.times.size()) throw Error(ErrorCode::Domain, "snapshot index out of range");
  DenseMatrix total = DenseMatrix::Zero(result.rho_mean[snapshot].rows(), result.rho_mean[snapshot].cols());
  for (std::size_t g = 0; g < G; ++g)
    total += static_cast<double>(result.group_sizes[g]) * result.group_means[g][snapshot];
  const double n = static_cast<double>(result.count);
  std::vector<double> theta(G);
  double mean = 0.0;
  for (std::size_t g = 0; g < G; ++g) {
    const double ng = static_cast<double>(result.group_sizes[g]);
    const DenseMatrix loo = (total - ng * result.group_means[g][snapshot]) / (n - ng);
    theta[g] = statistic(loo);
    mean += theta[g];
  }
  mean /= static_cast<double>(G);
  double ss = 0.0;
  for (double v : theta) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(G - 1) / static_cast<double>(G));
}

}  // namespace qbm
