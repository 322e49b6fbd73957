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

#include <stdexcept>
#include <string>

namespace qbm {

enum class ErrorCode {
  Config,             // invalid or incomplete configuration
  Domain,             // argument outside the operation's domain
  Numerical,          // quadrature / solver failed to reach tolerance
  Convergence,        // iterative step rejected
  DegenerateRoots,    // Riccati characteristic roots coincide
  SingularGenerator,  // time-local coefficient diverges inside the window
  Truncation,         // Fock cutoff too small for the state
  KernelValidity,     // kernel covariance not positive semidefinite
  Run,                // run aborted (drift, failures, ...)
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qbm
