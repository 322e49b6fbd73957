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

#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace qbm {

struct ConstantControl {
  double k0 = 0.0;
};
/// k(t) = k0 + amplitude * sin(drive_freq * t + phase).
struct SinusoidControl {
  double k0 = 0.0;
  double amplitude = 0.0;
  double drive_freq = 1.0;
  double phase = 0.0;
};
/// Left-closed segments [t_start, next t_start); the first starts at t = 0.
struct PiecewiseControl {
  std::vector<std::pair<double, double>> segments;  // (t_start, k)
};

/// Time-dependent inter-oscillator coupling k(t).
class ControlSchedule {
 public:
  using Variant = std::variant<ConstantControl, SinusoidControl, PiecewiseControl>;

  ControlSchedule() = default;
  ControlSchedule(Variant v);  // NOLINT(google-explicit-constructor)
  ControlSchedule(ConstantControl c) : ControlSchedule(Variant(c)) {}          // NOLINT(google-explicit-constructor)
  ControlSchedule(SinusoidControl c) : ControlSchedule(Variant(c)) {}          // NOLINT(google-explicit-constructor)
  ControlSchedule(PiecewiseControl c) : ControlSchedule(Variant(std::move(c))) {}  // NOLINT(google-explicit-constructor)

  double evaluate(double t) const;
  const Variant& variant() const { return v_; }
  bool is_sinusoid() const { return std::holds_alternative<SinusoidControl>(v_); }

 private:
  Variant v_{ConstantControl{}};
};

}  // namespace qbm
