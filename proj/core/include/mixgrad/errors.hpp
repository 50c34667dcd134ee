/* Copyright 2026 The mixgrad Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixgrad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: shape mismatches, non-finite inputs, out-of-range
/// indices, unparseable documents.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A conditional density underflowed below the density floor at some
/// dimension, so the recursions that divide by it are meaningless there.
class DegenerateSampleError : public Error {
 public:
  DegenerateSampleError(int dimension, double log_density);
  int dimension() const noexcept { return dimension_; }
  double log_density() const noexcept { return log_density_; }

 private:
  int dimension_;
  double log_density_;
};

/// Too many samples of an estimation run were degenerate; results would be
/// silently biased, so the run is aborted instead.
class DegenerateRateError : public Error {
 public:
  DegenerateRateError(std::int64_t degenerate, std::int64_t requested);
  std::int64_t degenerate_count() const noexcept { return degenerate_; }
  std::int64_t requested_count() const noexcept { return requested_; }

 private:
  std::int64_t degenerate_;
  std::int64_t requested_;
};

/// A root finder or other iterative numeric routine failed to converge.
class NumericFailureError : public Error {
 public:
  using Error::Error;
};

/// The rejection sampler produced no acceptances within its attempt budget.
/// Carries the empirical acceptance-probability estimate so callers can see
/// how bad the truncation was.
class LowAcceptanceError : public Error {
 public:
  explicit LowAcceptanceError(double acceptance_estimate);
  double acceptance_estimate() const noexcept { return acceptance_estimate_; }

 private:
  double acceptance_estimate_;
};

/// Adaptive quadrature could not reach the requested tolerance; carries the
/// error bound it did achieve.
class AccuracyFailureError : public Error {
 public:
  explicit AccuracyFailureError(double achieved_bound);
  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

/// A user-supplied loss returned a non-finite value or gradient.
class InvalidLossError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixgrad
