// Copyright 2026 The pilevol Authors
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

#ifndef PILEVOL_ERRORS_HPP
#define PILEVOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pilevol {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InsufficientDetections : public Error {
 public:
  using Error::Error;
};

class SingularGeometry : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class InvalidCovariance : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Query outside the modelled domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasibleCandidate : public Error {
 public:
  using Error::Error;
};

class NoFeasibleCandidate : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class LocalizationLost : public Error {
 public:
  using Error::Error;
};

}  // namespace pilevol

#endif  // PILEVOL_ERRORS_HPP
