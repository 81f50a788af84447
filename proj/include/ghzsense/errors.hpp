// Copyright 2026 The ghzsense Authors
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

namespace ghzsense {

/// Argument outside the mathematical domain of an operation (bad j, m, theta, negative time, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The estimation is insensitive to theta at the requested configuration (dP/dtheta vanishes).
class SensitivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fisher information is zero, so no Cramer-Rao bound exists.
class NoInformationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-outcome measurement with P in {0, 1}.
class DegenerateMeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant that must hold by construction was violated. Signals a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration that the implementation deliberately does not handle (e.g. QFI at phi != 0).
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense oracle asked to simulate more qubits than it is built for.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed user configuration or input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite-difference step produced an inconsistent Richardson estimate.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ghzsense
