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

// qbmsim: command-line driver. Talks to the library only through qbm.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbm/qbm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::uint64_t trajectories = 0;
  bool has_trajectories = false;
  unsigned workers = 0;
  bool has_workers = false;
};

int report(qbm_status st, const char* what) {
  std::fprintf(stderr, "qbmsim: %s failed: %s\n", what, qbm_last_error());
  return st == QBM_ERR_CONFIG || st == QBM_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

int run(const GlobalOptions& g, qbm_mode mode, int solver) {
  qbm_experiment* exp = nullptr;
  qbm_status st = qbm_experiment_load_file(g.config.c_str(), &exp);
  if (st != QBM_OK) return report(st, "loading config");
  if (g.has_seed) st = qbm_experiment_set_seed(exp, g.seed);
  if (st == QBM_OK && g.has_trajectories) st = qbm_experiment_set_trajectories(exp, g.trajectories);
  if (st == QBM_OK && g.has_workers) st = qbm_experiment_set_workers(exp, g.workers);
  if (st == QBM_OK && solver >= 0) st = qbm_experiment_set_qsd_solver(exp, static_cast<qbm_qsd_solver>(solver));
  if (st != QBM_OK) {
    const int code = report(st, "applying options");
    qbm_experiment_free(exp);
    return code;
  }
  std::vector<char> dir(4096);
  st = qbm_experiment_run(exp, mode, g.out_dir.empty() ? nullptr : g.out_dir.c_str(), dir.data(), dir.size());
  qbm_experiment_free(exp);
  if (st != QBM_OK) return report(st, "run");
  std::printf("%s\n", dir.data());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-oscillator quantum Brownian motion simulator (qbm " + std::string(qbm_version()) + ")"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out-dir", g.out_dir, "Run directory (default: $QBM_OUT_ROOT or output.directory, then <mode>-seed<seed>)");
  auto* seed = app.add_option("--seed", g.seed, "Override ensemble.seed");
  auto* traj = app.add_option("--trajectories", g.trajectories, "Override ensemble.trajectories")
                   ->check(CLI::PositiveNumber);
  auto* workers = app.add_option("--workers", g.workers, "Worker threads, 0 = all cores");

  auto* master = app.add_subcommand("run-master", "Integrate the time-local master equation");
  auto* qsd = app.add_subcommand("run-qsd", "Trajectory ensemble (linear or nonlinear QSD)");
  bool linear = false, nonlinear = false;
  auto* lin_flag = qsd->add_flag("--linear", linear, "Linear (unnormalized) equation");
  qsd->add_flag("--nonlinear", nonlinear, "Norm-preserving nonlinear equation")->excludes(lin_flag);
  auto* gauss = app.add_subcommand("run-gaussian", "Covariance-matrix propagation for Gaussian states");
  auto* compare = app.add_subcommand("compare", "Master equation against a QSD ensemble");
  bool cmp_linear = false, cmp_nonlinear = false;
  auto* cmp_lin = compare->add_flag("--linear", cmp_linear, "Use the linear QSD ensemble");
  compare->add_flag("--nonlinear", cmp_nonlinear, "Use the nonlinear QSD ensemble")->excludes(cmp_lin);
  auto* sweep = app.add_subcommand("sweep", "Drive-frequency sweep of the sinusoidal control");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (g.config.empty()) {
    std::fprintf(stderr, "qbmsim: --config is required\n");
    return kExitUsage;
  }
  g.has_seed = seed->count() > 0;
  g.has_trajectories = traj->count() > 0;
  g.has_workers = workers->count() > 0;

  if (master->parsed()) return run(g, QBM_MODE_MASTER, -1);
  if (qsd->parsed()) return run(g, QBM_MODE_QSD, nonlinear ? QBM_QSD_NONLINEAR : (linear ? QBM_QSD_LINEAR : -1));
  if (gauss->parsed()) return run(g, QBM_MODE_GAUSSIAN, -1);
  if (compare->parsed())
    return run(g, QBM_MODE_COMPARE, cmp_nonlinear ? QBM_QSD_NONLINEAR : (cmp_linear ? QBM_QSD_LINEAR : -1));
  if (sweep->parsed()) return run(g, QBM_MODE_SWEEP, -1);
  return kExitUsage;
}
