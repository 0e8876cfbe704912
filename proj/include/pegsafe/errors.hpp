// Copyright 2026 The pegsafe Authors
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

#ifndef PEGSAFE_ERRORS_HPP_
#define PEGSAFE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pegsafe {

// Base of every error raised by the library. The CLI maps any of these to a
// non-zero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PEGSAFE_DEFINE_ERROR(Name)                    \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& what)            \
        : Error(std::string(#Name ": ") + what) {}    \
  }

PEGSAFE_DEFINE_ERROR(InvalidShape);
PEGSAFE_DEFINE_ERROR(NonPositiveClearance);
PEGSAFE_DEFINE_ERROR(InvalidConfig);
PEGSAFE_DEFINE_ERROR(EpisodeFinished);
PEGSAFE_DEFINE_ERROR(MissingWrench);
PEGSAFE_DEFINE_ERROR(InsufficientHistory);
PEGSAFE_DEFINE_ERROR(NonFiniteOutput);
PEGSAFE_DEFINE_ERROR(IncompatibleCheckpoint);
PEGSAFE_DEFINE_ERROR(SchemaMismatch);

#undef PEGSAFE_DEFINE_ERROR

// Carries the offending minibatch so callers can log it.
class NonFiniteGradient : public Error {
 public:
  explicit NonFiniteGradient(int minibatch)
      : Error("NonFiniteGradient: non-finite gradient in minibatch " +
              std::to_string(minibatch)),
        minibatch_(minibatch) {}
  int minibatch() const { return minibatch_; }

 private:
  int minibatch_;
};

// Logged and recomputed values differ at `step`.
class ReplayDivergence : public Error {
 public:
  ReplayDivergence(int step, const std::string& what)
      : Error("ReplayDivergence: step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace pegsafe

#endif  // PEGSAFE_ERRORS_HPP_
