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


#include <string>

#include "doctest.h"
#include "qbm/config.hpp"
#include "qbm/error.hpp"

using namespace qbm;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "system": {"omega": 1.0, "levels": 3},
  "bath": {"kernel": "lorentzian", "Gamma": 1.0, "gamma": 3.0},
  "grid": {"t_end": 1.0, "dt": 0.01},
  "initial_state": {"type": "tmsv", "r": 0.3}
})";

std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("minimal config") {
  const ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.trunc.levels == 3);
  CHECK(c.bath.gamma_env == 3.0);
  CHECK(c.t_end == 1.0);
  CHECK(std::get<TwoModeSqueezedState>(c.initial).r == 0.3);
  CHECK(c.leakage_limit == kLeakageError);
}

TEST_CASE("round trip through JSON") {
  ExperimentConfig c = parse_config(kMinimal);
  c.control = ControlSchedule(SinusoidControl{0.0, 0.05, 2.0, 0.1});
  c.qsd_solver = QsdSolver::Nonlinear;
  c.trajectories = 123;
  c.sweep_frequencies = {1.0, 2.0};
  const ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.trajectories == 123);
  CHECK(std::get<SinusoidControl>(back.control.variant()).drive_freq == 2.0);
}

TEST_CASE("validation errors name the field") {
  CHECK(error_message(replace(kMinimal, R"("bath": {"kernel": "lorentzian", "Gamma": 1.0, "gamma": 3.0},)", ""))
            .find("bath") != std::string::npos);
  CHECK(error_message(replace(kMinimal, R"("levels": 3)", R"("levels": 3, "colour": 1)")).find("colour") !=
        std::string::npos);
  CHECK(error_message(replace(kMinimal, R"("t_end": 1.0)", R"("t_end": 1.005)")).find("grid.t_end") !=
        std::string::npos);
  CHECK(error_message(replace(kMinimal, R"("gamma": 3.0)", R"("gamma": 3.0, "temperature": 0.5)"))
            .find("temperature") != std::string::npos);
  CHECK(error_message(replace(kMinimal, "lorentzian", "ohmic")).find("bath.kernel") != std::string::npos);
  CHECK(!error_message("{ not json").empty());
}
