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

#include "qbm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qbm/error.hpp"
#include "qbm/hilbert.hpp"
#include "qbm/master_equation.hpp"
#include "qbm/observables.hpp"
#include "qbm/qsd.hpp"
#include "qbm/timeseries.hpp"

namespace qbm {

namespace {

using json = nlohmann::json;

// Above this the per-group means needed for the E_N standard error are not kept.
constexpr double kGroupMeanBudgetBytes = 512.0 * 1024.0 * 1024.0;

const std::vector<std::string> kObservableColumns = {"E_N", "l1_coherence", "energy", "purity", "re_F", "im_F"};

DensityMatrix normalized(const DensityMatrix& rho) {
  DensityMatrix out = 0.5 * (rho + rho.adjoint());
  return out / out.trace().real();
}

std::vector<double> fock_row(const DensityMatrix& rho, double t, const ExperimentConfig& c, const ModeOperators& ops,
                             const CoefficientTrajectory& coef) {
  const cd F = coef.at(t);
  return {log_negativity_fock(rho, c.trunc), l1_coherence(rho), mean_energy(rho, c.Omega, c.control.evaluate(t), ops),
          purity(rho), F.real(), F.imag()};
}

struct MasterOutcome {
  TimeSeries observables{kObservableColumns};
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  MasterDiagnostics diagnostics;
};

MasterOutcome run_master(const ExperimentConfig& c, const PreparedDynamics& dyn, bool keep_states,
                         RhoDumpWriter* dump) {
  const ModeOperators ops(c.trunc);
  const Ket psi0 = prepare_state(c.initial, c.trunc);
  MasterRun run;
  run.rho0 = psi0 * psi0.adjoint();
  run.t1 = c.t_end;
  run.dt = c.dt;
  run.coefficient = dyn.coefficient;
  run.schedule = c.control;
  run.Omega = c.Omega;
  run.stride = c.stride;
  run.leakage_limit = c.leakage_limit;
  MasterOutcome out;
  out.diagnostics = integrate_master(run, ops, [&](double t, const DensityMatrix& rho) {
    out.observables.append(t, fock_row(rho, t, c, ops, *dyn.coefficient));
    if (keep_states) {
      out.times.push_back(t);
      out.states.push_back(rho);
    }
    if (dump) dump->write(rho);
  });
  return out;
}

QsdProblem qsd_problem(const ExperimentConfig& c, const PreparedDynamics& dyn) {
  QsdProblem p;
  p.kind = c.qsd_solver == QsdSolver::Linear ? QsdKind::Linear : QsdKind::Nonlinear;
  p.psi0 = prepare_state(c.initial, c.trunc);
  p.t_end = c.t_end;
  p.dt = c.dt;
  p.coefficient = dyn.coefficient;
  p.kernel = dyn.kernel;
  p.schedule = c.control;
  p.Omega = c.Omega;
  p.stride = c.stride;
  return p;
}

struct QsdOutcome {
  EnsembleResult ensemble;
  std::vector<double> EN_se;
};

QsdOutcome run_qsd(const ExperimentConfig& c, const PreparedDynamics& dyn, const std::filesystem::path& run_dir) {
  const QsdIntegrator integrator(qsd_problem(c, dyn), c.trunc);
  EnsembleOptions opts;
  opts.count = c.trajectories;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.leakage_limit = c.leakage_limit;
  const double d2 = static_cast<double>(c.trunc.dim() * c.trunc.dim());
  const double bytes = 32.0 * static_cast<double>(integrator.snapshot_steps().size()) * d2 * 16.0;
  opts.keep_group_means = c.trajectories >= 2 && bytes <= kGroupMeanBudgetBytes;
  if (c.debug_trajectories > 0) {
    opts.debug_dir = run_dir / "trajectories";
    opts.debug_count = c.debug_trajectories;
  }
  QsdOutcome out;
  out.ensemble = run_ensemble(integrator, opts);
  const auto EN = [&](const DensityMatrix& rho) { return log_negativity_fock(normalized(rho), c.trunc); };
  for (std::size_t s = 0; s < out.ensemble.times.size(); ++s)
    out.EN_se.push_back(opts.keep_group_means ? group_jackknife_se(out.ensemble, s, EN) : std::nan(""));
  return out;
}

std::string plot_script(RunMode mode) {
  std::ostringstream gp;
  gp << "# gnuplot script; run `gnuplot plot.gp` inside the run directory\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set terminal pngcairo size 1200,800\n";
  if (mode == RunMode::Sweep) {
    gp << "set output 'sweep.png'\n"
          "set multiplot layout 1,2\n"
          "set xlabel 'drive frequency'\n"
          "plot 'sweep.csv' using 1:2 with linespoints\n"
          "plot 'sweep.csv' using 1:3 with linespoints, '' using 1:4 with linespoints\n"
          "unset multiplot\n";
    return gp.str();
  }
  gp << "set output 'observables.png'\n"
        "set multiplot layout 2,2\n"
        "set xlabel 't'\n"
        "plot 'observables.csv' using 1:2 with lines\n"
        "plot 'observables.csv' using 1:4 with lines\n"
        "plot 'observables.csv' using 1:3 with lines\n"
        "plot 'observables.csv' using 1:6 with lines, '' using 1:7 with lines\n"
        "unset multiplot\n";
  if (mode == RunMode::Compare) {
    gp << "set output 'compare.png'\n"
          "set xlabel 't'\n"
          "set ylabel 'E_N'\n"
          "plot 'compare.csv' using 1:2 with lines, '' using 1:3:4 with yerrorbars pointtype 7 pointsize 0.4\n";
  }
  return gp.str();
}

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Master: return "master";
    case RunMode::Qsd: return "qsd";
    case RunMode::Gaussian: return "gaussian";
    case RunMode::Compare: return "compare";
    case RunMode::Sweep: return "sweep";
  }
  return "?";
}

PreparedDynamics prepare_dynamics(const ExperimentConfig& c) {
  c.validate();
  const double half = 0.5 * c.dt;
  const TimeGrid grid = TimeGrid::covering(c.t_end, half);
  VolterraOptions opts;
  opts.richardson = c.richardson;
  PreparedDynamics out;
  switch (c.bath.family) {
    case KernelFamily::Lorentzian: {
      out.kernel = make_kernel(c.bath, grid);
      out.coefficient = std::make_shared<CoefficientTrajectory>(
          lorentzian_coefficients(CoefficientSpec{c.bath.Gamma, c.bath.gamma_env, c.Omega}, grid, opts));
      break;
    }
    case KernelFamily::SuperOhmic: {
      const TimeGrid fine = c.richardson ? TimeGrid::covering(c.t_end, 0.5 * half) : grid;
      const CorrelationKernel k = make_kernel(c.bath, fine);
      out.coefficient = std::make_shared<CoefficientTrajectory>(solve_F_general(k, c.Omega, grid, opts));
      out.kernel = c.richardson ? subsample(k, 2) : k;
      break;
    }
    case KernelFamily::Tabulated: {
      const CorrelationKernel k = read_kernel_csv(c.kernel_file);
      const double ratio = half / k.dt;
      const double m = std::round(ratio);
      if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio)
        throw Error(ErrorCode::Config, "bath.file: lattice spacing must divide grid.dt / 2");
      out.coefficient = std::make_shared<CoefficientTrajectory>(solve_F_general(k, c.Omega, grid, opts));
      out.kernel = subsample(k, static_cast<std::size_t>(m));
      if (out.kernel.size() < grid.size()) throw Error(ErrorCode::Config, "bath.file: kernel shorter than grid.t_end");
      out.kernel.values.resize(grid.size());
      break;
    }
  }
  return out;
}

CovarianceMatrix initial_covariance(const StateKind& kind) {
  if (!is_gaussian(kind))
    throw Error(ErrorCode::Config,
                "initial_state: run-gaussian needs a Gaussian state (vacuum fock, coherent or tmsv)");
  CovarianceMatrix cm;
  if (const auto* t = std::get_if<TwoModeSqueezedState>(&kind)) return cm_two_mode_squeezed(t->r);
  if (const auto* c = std::get_if<CoherentState>(&kind)) {
    cm.mean << std::sqrt(2.0) * c->alpha1.real(), std::sqrt(2.0) * c->alpha1.imag(), std::sqrt(2.0) * c->alpha2.real(),
        std::sqrt(2.0) * c->alpha2.imag();
  }
  return cm;
}

std::vector<SweepRow> sweep_drive_frequency(const ExperimentConfig& base, const std::vector<double>& frequencies,
                                            unsigned workers) {
  if (!base.control.is_sinusoid()) throw Error(ErrorCode::Config, "control: a sweep needs a sinusoid schedule");
  if (frequencies.empty()) throw Error(ErrorCode::Config, "sweep.frequencies: must not be empty");
  std::vector<double> freqs = frequencies;
  std::sort(freqs.begin(), freqs.end());
  if (std::adjacent_find(freqs.begin(), freqs.end()) != freqs.end())
    throw Error(ErrorCode::Config, "sweep.frequencies: duplicate entries");

  const PreparedDynamics dyn = prepare_dynamics(base);
  std::vector<SweepRow> rows(freqs.size());
  std::vector<std::exception_ptr> errors(freqs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < freqs.size(); i = next++) {
      try {
        ExperimentConfig c = base;
        auto drive = std::get<SinusoidControl>(base.control.variant());
        drive.drive_freq = freqs[i];
        c.control = ControlSchedule(drive);
        const MasterOutcome m = run_master(c, dyn, false, nullptr);
        const auto& t = m.observables.time();
        const auto& energy = m.observables.column("energy");
        const auto& EN = m.observables.column("E_N");
        SweepRow row;
        row.freq = freqs[i];
        std::size_t late = 0;
        for (std::size_t s = 0; s < t.size(); ++s) {
          row.peak_EN = std::max(row.peak_EN, EN[s]);
          if (t[s] >= 0.9 * c.t_end - 1e-12) {
            row.late_energy += energy[s];
            row.late_EN += EN[s];
            ++late;
          }
        }
        row.late_energy /= static_cast<double>(late);
        row.late_EN /= static_cast<double>(late);
        rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, freqs.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::filesystem::path default_run_dir(const ExperimentConfig& config, RunMode mode) {
  std::filesystem::path root = config.output_dir;
  if (const char* env = std::getenv("QBM_OUT_ROOT"); env && *env) root = env;
  return root / (std::string(mode_name(mode)) + "-seed" + std::to_string(config.seed));
}

std::filesystem::path run_experiment(const ExperimentConfig& c, RunMode mode, const std::filesystem::path& run_dir) {
  c.validate();
  const std::filesystem::path dir = run_dir.empty() ? default_run_dir(c, mode) : run_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create run directory " + dir.string() + ": " + ec.message());
  write_text_file(dir / "config.json", config_to_json(c));

  json manifest = {{"program", "qbm"},
                   {"mode", mode_name(mode)},
                   {"solver", c.qsd_solver == QsdSolver::Linear ? "linear" : "nonlinear"},
                   {"seed", c.seed},
                   {"trajectories", c.trajectories},
                   {"status", "running"}};
  const auto started = std::chrono::steady_clock::now();
  auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

  try {
    if (mode != RunMode::Gaussian) {
      const double leak = leakage(prepare_state(c.initial, c.trunc), c.trunc);
      manifest["initial_leakage"] = leak;
      if (leak > kLeakageWarn) manifest["warnings"].push_back("initial state leakage above 1e-6; consider more levels");
    }
    if (mode == RunMode::Gaussian) initial_covariance(c.initial);  // reject early, before any work
    if (mode == RunMode::Sweep) {
      if (!c.control.is_sinusoid()) throw Error(ErrorCode::Config, "control: a sweep needs a sinusoid schedule");
      if (c.sweep_frequencies.empty()) throw Error(ErrorCode::Config, "sweep.frequencies: must not be empty");
    }

    const PreparedDynamics dyn = prepare_dynamics(c);
    write_kernel_csv(dyn.kernel, dir / "kernel.csv");
    write_coefficients_csv(*dyn.coefficient, dir / "coefficients.csv");

    switch (mode) {
      case RunMode::Master: {
        std::optional<RhoDumpWriter> dump;
        if (c.raw_rho) dump.emplace(dir / "rho.bin", static_cast<std::uint32_t>(c.trunc.dim()));
        const MasterOutcome m = run_master(c, dyn, false, dump ? &*dump : nullptr);
        if (dump) dump->close();
        m.observables.write_csv(dir / "observables.csv");
        manifest["max_trace_drift"] = m.diagnostics.max_trace_drift;
        manifest["max_leakage"] = m.diagnostics.max_leakage;
        manifest["steps"] = m.diagnostics.steps;
        break;
      }
      case RunMode::Qsd: {
        const QsdOutcome q = run_qsd(c, dyn, dir);
        const ModeOperators ops(c.trunc);
        TimeSeries obs(kObservableColumns);
        TimeSeries ens({"trace", "frobenius_se", "E_N_se"});
        for (std::size_t s = 0; s < q.ensemble.times.size(); ++s) {
          const double t = q.ensemble.times[s];
          obs.append(t, fock_row(normalized(q.ensemble.rho_mean[s]), t, c, ops, *dyn.coefficient));
          ens.append(t, {q.ensemble.rho_mean[s].trace().real(), q.ensemble.standard_error[s], q.EN_se[s]});
        }
        obs.write_csv(dir / "observables.csv");
        ens.write_csv(dir / "ensemble.csv");
        manifest["failures"] = q.ensemble.failures;
        manifest["resamples"] = q.ensemble.resamples;
        manifest["max_leakage"] = q.ensemble.max_leakage;
        manifest["max_norm_drift"] = q.ensemble.max_norm_drift;
        break;
      }
      case RunMode::Gaussian: {
        const CmTrajectory cm = propagate_cm(initial_covariance(c.initial), *dyn.coefficient, c.control, c.Omega,
                                             c.t_end, c.dt, c.stride);
        TimeSeries obs(kObservableColumns);
        TimeSeries cov({"s11", "s12", "s13", "s14", "s22", "s23", "s24", "s33", "s34", "s44", "m1", "m2", "m3", "m4"});
        for (std::size_t s = 0; s < cm.times.size(); ++s) {
          const double t = cm.times[s];
          const CovarianceMatrix& x = cm.states[s];
          const cd F = dyn.coefficient->at(t);
          obs.append(t, {log_negativity_cm(x.sigma), std::nan(""), energy_cm(x, c.Omega, c.control.evaluate(t)),
                         purity_cm(x.sigma), F.real(), F.imag()});
          std::vector<double> row;
          for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) row.push_back(x.sigma(i, j));
          for (int i = 0; i < 4; ++i) row.push_back(x.mean(i));
          cov.append(t, row);
        }
        obs.write_csv(dir / "observables.csv");
        cov.write_csv(dir / "covariance.csv");
        manifest["min_physicality_margin"] = cm.min_margin;
        break;
      }
      case RunMode::Compare: {
        const MasterOutcome m = run_master(c, dyn, true, nullptr);
        const QsdOutcome q = run_qsd(c, dyn, dir);
        if (m.times.size() != q.ensemble.times.size()) throw Error(ErrorCode::Run, "snapshot grids disagree");
        TimeSeries cmp({"E_N_master", "E_N_qsd", "E_N_qsd_se", "trace_distance", "frobenius_se"});
        for (std::size_t s = 0; s < m.times.size(); ++s) {
          const DensityMatrix rq = normalized(q.ensemble.rho_mean[s]);
          cmp.append(m.times[s], {log_negativity_fock(m.states[s], c.trunc), log_negativity_fock(rq, c.trunc),
                                  q.EN_se[s], trace_distance(m.states[s], rq), q.ensemble.standard_error[s]});
        }
        m.observables.write_csv(dir / "observables.csv");
        cmp.write_csv(dir / "compare.csv");
        manifest["max_trace_drift"] = m.diagnostics.max_trace_drift;
        manifest["max_leakage"] = std::max(m.diagnostics.max_leakage, q.ensemble.max_leakage);
        manifest["failures"] = q.ensemble.failures;
        manifest["resamples"] = q.ensemble.resamples;
        manifest["max_norm_drift"] = q.ensemble.max_norm_drift;
        break;
      }
      case RunMode::Sweep: {
        const auto rows = sweep_drive_frequency(c, c.sweep_frequencies, c.workers);
        std::string csv = "freq,late_energy,late_EN,peak_EN\n";
        for (const auto& r : rows)
          csv += format_number(r.freq) + "," + format_number(r.late_energy) + "," + format_number(r.late_EN) + "," +
                 format_number(r.peak_EN) + "\n";
        write_text_file(dir / "sweep.csv", csv);
        const auto best = std::max_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
          return a.late_energy < b.late_energy;
        });
        manifest["resonance_freq"] = best->freq;
        break;
      }
    }
    if (c.plot_script) write_text_file(dir / "plot.gp", plot_script(mode));
  } catch (const Error& e) {
    manifest["status"] = "failed";
    manifest["error_code"] = to_string(e.code());
    manifest["error"] = e.what();
    manifest["wall_time_s"] = wall();
    write_manifest(dir, manifest);
    throw;
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["wall_time_s"] = wall();
    write_manifest(dir, manifest);
    throw;
  }
  manifest["status"] = "ok";
  manifest["wall_time_s"] = wall();
  write_manifest(dir, manifest);
  return dir;
}

}  // namespace qbm
