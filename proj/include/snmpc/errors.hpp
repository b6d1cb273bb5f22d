/*
 Copyright 2026 The sampled-nmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SNMPC_ERRORS_HPP
#define SNMPC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace snmpc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (dimension mismatch, empty plan, unbounded box...).
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// The warm start handed to the solver is not feasible for the given state.
class RejectedInput : public Error {
public:
  using Error::Error;
};

/// Random search for an initial feasible plan exhausted its budget.
class NoOracle : public Error {
public:
  using Error::Error;
};

/// No feasible append could be found while building the shifted warm start.
class WarmStartFailure : public Error {
public:
  using Error::Error;
};

/// The plant has no published terminal feedback law.
class NoTerminalLaw : public Error {
public:
  using Error::Error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace snmpc

#endif // SNMPC_ERRORS_HPP
