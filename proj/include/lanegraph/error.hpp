/*
 * Copyright 2026 The lanegraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LANEGRAPH_ERROR_HPP_
#define LANEGRAPH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lanegraph {

/// Argument outside the domain of an operation (bad t, shape mismatch, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Least-squares fit could not be solved (rank-deficient basis).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

/// Pixel at or above the horizon has no flat-ground intersection.
class UndefinedGroundError : public DomainError {
 public:
  explicit UndefinedGroundError(const std::string& what) : DomainError(what) {}
};

/// Depth-warp denominator vanished.
class WarpSingularityError : public DomainError {
 public:
  explicit WarpSingularityError(const std::string& what) : DomainError(what) {}
};

class OutOfRoiError : public DomainError {
 public:
  explicit OutOfRoiError(const std::string& what) : DomainError(what) {}
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Input parsed but failed structural validation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lanegraph

#endif  // LANEGRAPH_ERROR_HPP_
