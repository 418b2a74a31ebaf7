/*
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
#pragma once

#include <stdexcept>
#include <string>

namespace hrcsim {

/// Base for every error raised by the simulator.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An event that would break a world invariant (e.g. grasping a held workpiece).
class IllegalEvent : public Error {
  public:
    using Error::Error;
};

/// An event timestamped before the current world time.
class StaleEvent : public Error {
  public:
    using Error::Error;
};

/// A state machine leaf or container broke its declared outcome contract.
class ContractViolation : public Error {
  public:
    using Error::Error;
};

class MalformedLog : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

/// Scenario or config validation failure; `field()` holds the offending field path.
class ValidationError : public Error {
  public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class VersionMismatch : public Error {
  public:
    using Error::Error;
};

class CorruptLog : public Error {
  public:
    using Error::Error;
};

class DecodeError : public Error {
  public:
    using Error::Error;
};

} // namespace hrcsim
