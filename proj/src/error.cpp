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

#include "qbm/error.hpp"

namespace qbm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::DegenerateRoots: return "degenerate-roots";
    case ErrorCode::SingularGenerator: return "singular-generator";
    case ErrorCode::Truncation: return "truncation";
    case ErrorCode::KernelValidity: return "kernel-validity";
    case ErrorCode::Run: return "run";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " error: " + message), code_(code) {}

}  // namespace qbm
