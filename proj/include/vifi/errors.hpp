// Copyright 2026 The ViFi Authors
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

namespace vifi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coincident endpoints, points outside the floorplan, malformed plans.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula (e.g. d <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The least-squares system of one fit is rank deficient.
class DegenerateFit : public Error {
 public:
  DegenerateFit(std::string ap, const std::string& what)
      : Error(what), ap_(std::move(ap)) {}
  const std::string& ap() const noexcept { return ap_; }

 private:
  std::string ap_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class UnknownAccessPoint : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input file; carries the offending path.
class InputError : public Error {
 public:
  InputError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace vifi
