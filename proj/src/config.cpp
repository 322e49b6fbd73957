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

#include "qbm/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "qbm/error.hpp"

namespace qbm {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, field + ": " + what);
}

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(section, "expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) fail(section + "." + item.key(), "unknown key");
  }
}

const json& section(const json& root, const char* name) {
  if (!root.contains(name)) fail(name, "missing section");
  return root.at(name);
}

template <typename T>
T get(const json& j, const std::string& section, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(section + "." + key, "wrong type");
  }
}

template <typename T>
T require(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key)) fail(section + "." + key, "missing");
  return get<T>(j, section, key, T{});
}

cd complex_field(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key)) return 0.0;
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(section + "." + key, "expected a number or [re, im]");
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::Lorentzian: return "lorentzian";
    case KernelFamily::SuperOhmic: return "super_ohmic";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "?";
}

StateKind parse_state(const json& j) {
  const std::string s = "initial_state";
  if (!j.is_object()) fail(s, "expected an object");
  const auto type = require<std::string>(j, s, "type");
  if (type == "fock") {
    check_keys(j, s, {"type", "n1", "n2"});
    FockState f{get<int>(j, s, "n1", 0), get<int>(j, s, "n2", 0)};
    if (f.n1 < 0 || f.n2 < 0) fail(s, "occupations must be >= 0");
    return f;
  }
  if (type == "coherent") {
    check_keys(j, s, {"type", "alpha1", "alpha2"});
    return CoherentState{complex_field(j, s, "alpha1"), complex_field(j, s, "alpha2")};
  }
  if (type == "cat") {
    check_keys(j, s, {"type", "alpha", "parity"});
    CatState c{complex_field(j, s, "alpha"), get<int>(j, s, "parity", 0)};
    if (c.parity != 0 && c.parity != 1) fail(s + ".parity", "must be 0 (even) or 1 (odd)");
    return c;
  }
  if (type == "tmsv") {
    check_keys(j, s, {"type", "r"});
    return TwoModeSqueezedState{require<double>(j, s, "r")};
  }
  fail(s + ".type", "expected fock, coherent, cat or tmsv, got '" + type + "'");
}

json state_json(const StateKind& kind) {
  if (const auto* f = std::get_if<FockState>(&kind)) return {{"type", "fock"}, {"n1", f->n1}, {"n2", f->n2}};
  if (const auto* c = std::get_if<CoherentState>(&kind))
    return {{"type", "coherent"}, {"alpha1", complex_json(c->alpha1)}, {"alpha2", complex_json(c->alpha2)}};
  if (const auto* c = std::get_if<CatState>(&kind))
    return {{"type", "cat"}, {"alpha", complex_json(c->alpha)}, {"parity", c->parity}};
  const auto& t = std::get<TwoModeSqueezedState>(kind);
  return {{"type", "tmsv"}, {"r", t.r}};
}

ControlSchedule parse_control(const json& j) {
  const std::string s = "control";
  if (!j.is_object()) fail(s, "expected an object");
  const auto type = require<std::string>(j, s, "type");
  if (type == "constant") {
    check_keys(j, s, {"type", "k"});
    return ControlSchedule(ConstantControl{get<double>(j, s, "k", 0.0)});
  }
  if (type == "sinusoid") {
    check_keys(j, s, {"type", "k0", "amplitude", "drive_freq", "phase"});
    return ControlSchedule(SinusoidControl{get<double>(j, s, "k0", 0.0), get<double>(j, s, "amplitude", 0.0),
                                           require<double>(j, s, "drive_freq"), get<double>(j, s, "phase", 0.0)});
  }
  if (type == "piecewise") {
    check_keys(j, s, {"type", "segments"});
    PiecewiseControl p;
    const json& segs = require<json>(j, s, "segments");
    if (!segs.is_array()) fail(s + ".segments", "expected [[t_start, k], ...]");
    for (const auto& seg : segs) {
      if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number() || !seg[1].is_number())
        fail(s + ".segments", "expected [[t_start, k], ...]");
      p.segments.emplace_back(seg[0].get<double>(), seg[1].get<double>());
    }
    return ControlSchedule(std::move(p));
  }
  fail(s + ".type", "expected constant, sinusoid or piecewise, got '" + type + "'");
}

json control_json(const ControlSchedule& schedule) {
  const auto& v = schedule.variant();
  if (const auto* c = std::get_if<ConstantControl>(&v)) return {{"type", "constant"}, {"k", c->k0}};
  if (const auto* s = std::get_if<SinusoidControl>(&v))
    return {{"type", "sinusoid"},
            {"k0", s->k0},
            {"amplitude", s->amplitude},
            {"drive_freq", s->drive_freq},
            {"phase", s->phase}};
  const auto& p = std::get<PiecewiseControl>(v);
  json segs = json::array();
  for (const auto& [t, k] : p.segments) segs.push_back({t, k});
  return {{"type", "piecewise"}, {"segments", segs}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(schema_version));
  if (!(std::isfinite(Omega) && Omega >= 0.0)) fail("system.omega", "must be >= 0");
  trunc.validate();
  if (!(leakage_limit > 0.0 && leakage_limit <= 1.0)) fail("system.leakage_limit", "must lie in (0, 1]");
  bath.validate();
  if (bath.family == KernelFamily::Tabulated && kernel_file.empty()) fail("bath.file", "required for tabulated kernels");
  if (bath.temperature != 0.0)
    fail("bath.temperature", "dynamics are implemented at zero temperature only; use the kernel tools for T > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("grid.dt", "must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("grid.t_end", "must be > 0");
  const double ratio = t_end / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) fail("grid.t_end", "must be an integer multiple of grid.dt");
  if (trajectories < 1) fail("ensemble.trajectories", "must be >= 1");
  if (stride < 1) fail("output.stride", "must be >= 1");
  if (const auto* t = std::get_if<TwoModeSqueezedState>(&initial); t && !(std::isfinite(t->r) && t->r >= 0.0))
    fail("initial_state.r", "must be >= 0");
  for (double f : sweep_frequencies)
    if (!(std::isfinite(f) && f >= 0.0)) fail("sweep.frequencies", "entries must be finite and >= 0");
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "config",
             {"schema_version", "system", "bath", "grid", "initial_state", "control", "solver", "ensemble", "output",
              "sweep"});
  ExperimentConfig c;
  c.schema_version = require<int>(root, "config", "schema_version");

  const json& sys = section(root, "system");
  check_keys(sys, "system", {"omega", "levels", "leakage_limit"});
  c.Omega = require<double>(sys, "system", "omega");
  c.trunc.levels = require<int>(sys, "system", "levels");
  c.leakage_limit = get<double>(sys, "system", "leakage_limit", kLeakageError);

  const json& bath = section(root, "bath");
  check_keys(bath, "bath", {"kernel", "Gamma", "gamma", "gamma_J", "Lambda", "temperature", "file"});
  const auto family = require<std::string>(bath, "bath", "kernel");
  if (family == "lorentzian") {
    c.bath.family = KernelFamily::Lorentzian;
  } else if (family == "super_ohmic") {
    c.bath.family = KernelFamily::SuperOhmic;
  } else if (family == "tabulated") {
    c.bath.family = KernelFamily::Tabulated;
  } else {
    fail("bath.kernel", "expected lorentzian, super_ohmic or tabulated, got '" + family + "'");
  }
  c.bath.Gamma = get<double>(bath, "bath", "Gamma", c.bath.Gamma);
  c.bath.gamma_env = get<double>(bath, "bath", "gamma", c.bath.gamma_env);
  c.bath.gamma_J = get<double>(bath, "bath", "gamma_J", c.bath.gamma_J);
  c.bath.Lambda = get<double>(bath, "bath", "Lambda", c.bath.Lambda);
  c.bath.temperature = get<double>(bath, "bath", "temperature", 0.0);
  c.kernel_file = get<std::string>(bath, "bath", "file", "");
  if (!c.kernel_file.empty() && std::filesystem::path(c.kernel_file).is_relative() && !base_dir.empty())
    c.kernel_file = (base_dir / c.kernel_file).string();

  const json& grid = section(root, "grid");
  check_keys(grid, "grid", {"t_end", "dt"});
  c.t_end = require<double>(grid, "grid", "t_end");
  c.dt = require<double>(grid, "grid", "dt");

  c.initial = parse_state(section(root, "initial_state"));
  if (root.contains("control")) c.control = parse_control(root.at("control"));

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    check_keys(s, "solver", {"qsd", "richardson"});
    const auto kind = get<std::string>(s, "solver", "qsd", "linear");
    if (kind == "linear") {
      c.qsd_solver = QsdSolver::Linear;
    } else if (kind == "nonlinear") {
      c.qsd_solver = QsdSolver::Nonlinear;
    } else {
      fail("solver.qsd", "expected linear or nonlinear");
    }
    c.richardson = get<bool>(s, "solver", "richardson", true);
  }
  if (root.contains("ensemble")) {
    const json& e = root.at("ensemble");
    check_keys(e, "ensemble", {"trajectories", "seed", "workers", "debug_trajectories"});
    const auto count = get<std::int64_t>(e, "ensemble", "trajectories", 1000);
    if (count < 1) fail("ensemble.trajectories", "must be >= 1");
    c.trajectories = static_cast<std::size_t>(count);
    c.seed = get<std::uint64_t>(e, "ensemble", "seed", 0);
    const auto workers = get<std::int64_t>(e, "ensemble", "workers", 0);
    if (workers < 0) fail("ensemble.workers", "must be >= 0");
    c.workers = static_cast<unsigned>(workers);
    const auto debug = get<std::int64_t>(e, "ensemble", "debug_trajectories", 0);
    if (debug < 0) fail("ensemble.debug_trajectories", "must be >= 0");
    c.debug_trajectories = static_cast<std::size_t>(debug);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, "output", {"stride", "directory", "plot_script", "raw_rho"});
    const auto stride = get<std::int64_t>(o, "output", "stride", 10);
    if (stride < 1) fail("output.stride", "must be >= 1");
    c.stride = static_cast<std::size_t>(stride);
    c.output_dir = get<std::string>(o, "output", "directory", c.output_dir);
    c.plot_script = get<bool>(o, "output", "plot_script", true);
    c.raw_rho = get<bool>(o, "output", "raw_rho", false);
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    check_keys(s, "sweep", {"frequencies"});
    c.sweep_frequencies = get<std::vector<double>>(s, "sweep", "frequencies", {});
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json bath = {{"kernel", family_name(c.bath.family)},
               {"Gamma", c.bath.Gamma},
               {"gamma", c.bath.gamma_env},
               {"gamma_J", c.bath.gamma_J},
               {"Lambda", c.bath.Lambda},
               {"temperature", c.bath.temperature}};
  if (!c.kernel_file.empty()) bath["file"] = c.kernel_file;
  json root = {
      {"schema_version", c.schema_version},
      {"system", {{"omega", c.Omega}, {"levels", c.trunc.levels}, {"leakage_limit", c.leakage_limit}}},
      {"bath", bath},
      {"grid", {{"t_end", c.t_end}, {"dt", c.dt}}},
      {"initial_state", state_json(c.initial)},
      {"control", control_json(c.control)},
      {"solver", {{"qsd", c.qsd_solver == QsdSolver::Linear ? "linear" : "nonlinear"}, {"richardson", c.richardson}}},
      {"ensemble",
       {{"trajectories", c.trajectories},
        {"seed", c.seed},
        {"workers", c.workers},
        {"debug_trajectories", c.debug_trajectories}}},
      {"output",
       {{"stride", c.stride},
        {"directory", c.output_dir},
        {"plot_script", c.plot_script},
        {"raw_rho", c.raw_rho}}},
      {"sweep", {{"frequencies", c.sweep_frequencies}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace qbm
