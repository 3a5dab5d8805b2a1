// Copyright 2026 the crsopt authors
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

#ifndef CRSOPT_ERRORS_HPP
#define CRSOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crsopt {

// Structural misuse: mismatched dimensions, unknown variables, bad arguments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// SINR targets that no positive power allocation can meet.
class InfeasibleTargetsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The first SCA surrogate was infeasible; the initializer broke its contract.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The efficiency floor exceeds what the realization can achieve at any power.
class EfficiencyInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crsopt

#endif  // CRSOPT_ERRORS_HPP
