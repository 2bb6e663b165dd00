/*
 * Copyright 2026 The occtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCTRACK_ERROR_H_
#define OCCTRACK_ERROR_H_

#include <stdexcept>
#include <string>

namespace occtrack {

// Base class for every error raised by the library. Callers that do not care
// about the category can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index or coordinate outside the valid lattice range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Ray origin outside the grid, non-finite input, or similar precondition
// violations on geometric arguments.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A viewing ray for which the projection model has no valid value.
class InvalidRayError : public Error {
 public:
  using Error::Error;
};

// Radial ratio beyond the feasible bound (negative discriminant).
class InfeasibleRadiusError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DegenerateRotationError : public Error {
 public:
  using Error::Error;
};

// Malformed files, bad magic, parse failures.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Mismatched grid configurations or sequence lengths.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace occtrack

#endif  // OCCTRACK_ERROR_H_
