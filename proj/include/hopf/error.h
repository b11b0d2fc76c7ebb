// Copyright 2026 The Hopf Control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOPF_ERROR_H_
#define HOPF_ERROR_H_

#include <stdexcept>
#include <string>

namespace hopf {

enum class ErrorCode {
  kDimensionMismatch,
  kNotPositiveDefinite,
  kSingularScaling,
  kNonOriginTarget,
  kInvalidArgument,
  kNonFinite,
  kHorizonNonPositive,
  kFactorizationFailed,
  kStepSizeViolation,
  kNoSignChange,
  kMaxOuterIter,
  kControlInconsistent,
  kNonPositiveWeight,
  kNonOriginGoal,
  kNotTwoDimensional,
};

const char* ToString(ErrorCode code);

// All recoverable failures of the library surface as HopfError. Non
// convergence of a single Hopf solve is not an error; it is reported through
// HopfSolution::converged.
class HopfError : public std::runtime_error {
 public:
  HopfError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hopf

#endif  // HOPF_ERROR_H_
