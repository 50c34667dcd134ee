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
#include "mixgrad/errors.hpp"

namespace mixgrad {

DegenerateSampleError::DegenerateSampleError(int dimension, double log_density)
    : Error("conditional density underflow at dimension " + std::to_string(dimension) +
            " (log density " + std::to_string(log_density) + ")"),
      dimension_(dimension),
      log_density_(log_density) {}

DegenerateRateError::DegenerateRateError(std::int64_t degenerate, std::int64_t requested)
    : Error("degenerate-sample rate too high: " + std::to_string(degenerate) + " of " +
            std::to_string(requested) + " samples exceeded the 0.01% budget"),
      degenerate_(degenerate),
      requested_(requested) {}

LowAcceptanceError::LowAcceptanceError(double acceptance_estimate)
    : Error("rejection sampler exhausted its attempt budget; estimated acceptance probability " +
            std::to_string(acceptance_estimate)),
      acceptance_estimate_(acceptance_estimate) {}

AccuracyFailureError::AccuracyFailureError(double achieved_bound)
    : Error("quadrature tolerance not reached; achieved error bound " +
            std::to_string(achieved_bound)),
      achieved_bound_(achieved_bound) {}

}  // namespace mixgrad
