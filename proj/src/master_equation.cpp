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

#include "qbm/master_equation.hpp"

#include <cmath>
#include <sstream>

#include "qbm/error.hpp"

namespace qbm {

namespace {

// RK4's real-axis stability limit is about 2.785; stay clear of it.
constexpr double kStabilityBound = 2.5;

double trace_real(const DensityMatrix& rho) { return rho.trace().real(); }

}  // namespace

DenseMatrix me_rhs(const DensityMatrix& rho, cd F, double k, double Omega, const ModeOperators& ops,
                   CommutatorSign sign) {
  const cd i_sign = sign == CommutatorSign::Standard ? cd(0.0, -1.0) : cd(0.0, 1.0);
  Operator H = ops.hamiltonian(Omega, k);
  Operator M = i_sign * H - F * ops.LdagL;
  Operator Mdag = M.adjoint();
  DenseMatrix out = M * rho;
  out += rho * Mdag;
  DenseMatrix Lrho = ops.L * rho;
  Operator Ldag = ops.L.adjoint();
  out += (2.0 * F.real()) * (Lrho * Ldag);
  return out;
}

MasterDiagnostics integrate_master(const MasterRun& run, const ModeOperators& ops, const SnapshotObserver& observer) {
  if (!run.coefficient) throw Error(ErrorCode::Config, "master run has no coefficient trajectory");
  if (!(run.dt > 0.0) || !(run.t1 > run.t0)) throw Error(ErrorCode::Config, "master run needs dt > 0 and t1 > t0");
  if (run.stride == 0) throw Error(ErrorCode::Config, "snapshot stride must be positive");
  const auto d = static_cast<Eigen::Index>(ops.trunc.dim());
  if (run.rho0.rows() != d || run.rho0.cols() != d)
    throw Error(ErrorCode::Config, "initial density matrix does not match the truncation");
  const CoefficientTrajectory& coef = *run.coefficient;
  if (coef.grid().end() < run.t1 - 1e-12)
    throw Error(ErrorCode::Config, "coefficient trajectory does not cover the integration window");

  if (auto pole = coef.first_pole(run.t1); pole && *pole >= run.t0) {
    std::ostringstream msg;
    msg << "F(t) diverges near t=" << *pole << "; the time-local generator is undefined there"
        << " (shorten grid.t_end below the pole)";
    throw Error(ErrorCode::SingularGenerator, msg.str());
  }

  const auto steps = static_cast<std::size_t>(std::llround((run.t1 - run.t0) / run.dt));
  const double h = (run.t1 - run.t0) / static_cast<double>(steps);

  // |F| bounds the dissipative part of the spectrum at about 4|F| <L'L>; the
  // crude estimate uses the largest eigenvalue of L'L on the truncation.
  const double ldl_norm = 4.0 * ops.trunc.levels + 2.0;

  MasterDiagnostics diag;
  DensityMatrix rho = run.rho0;
  const double trace0 = trace_real(rho);

  auto emit = [&](double t) {
    ++diag.snapshots;
    if (observer) observer(t, rho);
  };
  emit(run.t0);

  auto rhs = [&](double t, const DensityMatrix& r) {
    const cd F = coef.at(t);
    if (!std::isfinite(F.real()) || !std::isfinite(F.imag()) || h * std::abs(F) * ldl_norm > kStabilityBound) {
      std::ostringstream msg;
      msg << "F(" << t << ")=" << F.real() << (F.imag() < 0 ? "" : "+") << F.imag()
          << "i is too large for dt=" << h << "; reduce dt or stay away from the pole";
      throw Error(ErrorCode::SingularGenerator, msg.str());
    }
    return me_rhs(r, F, run.schedule.evaluate(t), run.Omega, ops);
  };

  for (std::size_t j = 0; j < steps; ++j) {
    const double t = run.t0 + h * static_cast<double>(j);
    const DenseMatrix k1 = rhs(t, rho);
    const DenseMatrix k2 = rhs(t + 0.5 * h, rho + (0.5 * h) * k1);
    const DenseMatrix k3 = rhs(t + 0.5 * h, rho + (0.5 * h) * k2);
    const DenseMatrix k4 = rhs(t + h, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    diag.max_hermiticity = std::max(diag.max_hermiticity, (rho - rho.adjoint()).norm());
    rho = (0.5 * (rho + rho.adjoint())).eval();
    ++diag.steps;

    const double t_next = run.t0 + h * static_cast<double>(j + 1);
    const double drift = std::abs(trace_real(rho) - trace0);
    diag.max_trace_drift = std::max(diag.max_trace_drift, drift);
    if (!std::isfinite(drift) || drift > 1e-6) {
      std::ostringstream msg;
      msg << "trace drifted by " << drift << " at t=" << t_next;
      throw Error(ErrorCode::Run, msg.str());
    }
    const double leak = leakage(rho, ops.trunc);
    diag.max_leakage = std::max(diag.max_leakage, leak);
    if (leak > run.leakage_limit) {
      std::ostringstream msg;
      msg << "population " << leak << " on the top Fock level at t=" << t_next << "; increase system.levels";
      throw Error(ErrorCode::Truncation, msg.str());
    }
    if ((j + 1) % run.stride == 0 || j + 1 == steps) emit(t_next);
  }
  return diag;
}

MasterSnapshots integrate_master(const MasterRun& run, const ModeOperators& ops) {
  MasterSnapshots out;
  out.diagnostics = integrate_master(run, ops, [&](double t, const DensityMatrix& rho) {
    out.times.push_back(t);
    out.states.push_back(rho);
  });
  return out;
}

RhoDumpWriter::RhoDumpWriter(const std::filesystem::path& path, std::uint32_t dim)
    : out_(path, std::ios::binary | std::ios::trunc), dim_(dim) {
  if (!out_) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const std::uint64_t zero = 0;
  out_.write(reinterpret_cast<const char*>(&kMagic), 4);
  out_.write(reinterpret_cast<const char*>(&dim_), 4);
  out_.write(reinterpret_cast<const char*>(&zero), 8);
}

RhoDumpWriter::~RhoDumpWriter() {
  try {
    close();
  } catch (...) {
  }
}

void RhoDumpWriter::write(const DensityMatrix& rho) {
  if (!out_.is_open()) throw Error(ErrorCode::Io, "rho dump already closed");
  if (rho.rows() != static_cast<Eigen::Index>(dim_)) throw Error(ErrorCode::Io, "rho dump dimension mismatch");
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      const double re = rho(r, c).real();
      const double im = rho(r, c).imag();
      out_.write(reinterpret_cast<const char*>(&re), 8);
      out_.write(reinterpret_cast<const char*>(&im), 8);
    }
  ++count_;
}

void RhoDumpWriter::close() {
  if (!out_.is_open()) return;
  out_.seekp(8);
  out_.write(reinterpret_cast<const char*>(&count_), 8);
  out_.close();
  if (out_.fail()) throw Error(ErrorCode::Io, "failed writing rho dump");
}

std::vector<DensityMatrix> read_rho_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::uint32_t magic = 0, dim = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  if (!in || magic != RhoDumpWriter::kMagic) throw Error(ErrorCode::Io, path.string() + " is not a rho dump");
  std::vector<DensityMatrix> out;
  out.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    DensityMatrix rho(dim, dim);
    for (std::uint32_t r = 0; r < dim; ++r)
      for (std::uint32_t c = 0; c < dim; ++c) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        rho(r, c) = cd(re, im);
      }
    if (!in) throw Error(ErrorCode::Io, path.string() + " is truncated");
    out.push_back(std::move(rho));
  }
  return out;
}

}  // namespace qbm
