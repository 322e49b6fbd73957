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

#include "qbm/control.hpp"

#include <algorithm>
#include <cmath>

#include "qbm/error.hpp"

namespace qbm {

ControlSchedule::ControlSchedule(Variant v) : v_(std::move(v)) {
  if (const auto* pw = std::get_if<PiecewiseControl>(&v_)) {
    if (pw->segments.empty()) throw Error(ErrorCode::Config, "control.segments must not be empty");
    if (pw->segments.front().first != 0.0) throw Error(ErrorCode::Config, "control.segments must start at t = 0");
    for (std::size_t i = 1; i < pw->segments.size(); ++i) {
      if (!(pw->segments[i].first > pw->segments[i - 1].first)) {
        throw Error(ErrorCode::Config, "control.segments must be strictly increasing in t_start");
      }
    }
  }
  if (const auto* s = std::get_if<SinusoidControl>(&v_)) {
    if (!std::isfinite(s->drive_freq) || !std::isfinite(s->amplitude)) {
      throw Error(ErrorCode::Config, "control sinusoid parameters must be finite");
    }
  }
}

double ControlSchedule::evaluate(double t) const {
  if (t < 0.0) throw Error(ErrorCode::Domain, "control schedules are defined for t >= 0");
  return std::visit(
      [t](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConstantControl>) {
          return c.k0;
        } else if constexpr (std::is_same_v<T, SinusoidControl>) {
          return c.k0 + c.amplitude * std::sin(c.drive_freq * t + c.phase);
        } else {
          // last segment whose start is <= t
          auto it = std::upper_bound(c.segments.begin(), c.segments.end(), t,
                                     [](double value, const auto& seg) { return value < seg.first; });
          return std::prev(it)->second;
        }
      },
      v_);
}

}  // namespace qbm
