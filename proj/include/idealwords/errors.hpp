/*
 * Copyright 2026 The idealwords Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IDEALWORDS_ERRORS_HPP_
#define IDEALWORDS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace iw {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation failures. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failures while computing on already validated inputs (exit code 3).
class ComputeError : public Error {
 public:
  using Error::Error;
};

// Unknown factor value, wrong tuple arity, malformed grid.
class InvalidConcept : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Dimension or row-count mismatch between operands.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Structural problem in a manifest or data file.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Non-finite values in stored or supplied data.
class DataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filesystem failures; the message carries the offending path.
class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numeric overflow, e.g. exponentiating large log values.
class RangeError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Metric inputs that do not define a value (empty group, missing target).
class MetricError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Rejection sampling ran out of attempts.
class GenerationError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

}  // namespace iw

#endif  // IDEALWORDS_ERRORS_HPP_
