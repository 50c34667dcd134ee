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
#include <span>
#include <vector>

#include "mixgrad/forward_trace.hpp"
#include "mixgrad/mixture_model.hpp"
#include "mixgrad/philox.hpp"

namespace mixgrad {

/// A vector of D uniforms, each strictly inside (0,1), plus the seed it was
/// drawn from. Feeding the same draw back into the quantile transform
/// reproduces the same sample exactly, which is what makes common-random-
/// number finite differences possible.
struct UniformDraw {
  std::vector<double> u;
  std::uint64_t seed = 0;
};

UniformDraw make_uniform_draw(int dimension, Philox& rng);

/// Validating constructor for externally supplied uniforms.
UniformDraw uniform_draw_from(std::vector<double> u, std::uint64_t seed = 0);

/// Draw from the mixture by picking a component from the weights and then
/// sampling each dimension of that component. Fast exact path whose law is
/// the mixture density itself.
std::vector<double> sample_ancestral(const MixtureModel& model, Philox& rng);
void sample_ancestral_into(const MixtureModel& model, Philox& rng, std::span<double> out);

/// Conditional mixture CDF at dimension d given a responsibility row:
/// sum_k resp[k] * F_kd(x).
double conditional_cdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                       double x);
double conditional_pdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                       double x);

/// Solves conditional_cdf(x) = u. Bracketed by the component quantiles
/// (the mixture quantile always lies between the smallest and largest
/// component quantile), then bisection plus safeguarded Newton down to
/// machine precision; the residual |F(x)-u| is at most 1e-12.
double invert_conditional_cdf(const MixtureModel& model, std::span<const double> resp_row, int d,
                              double u);

/// Draw from the mixture by recursively inverting conditional CDFs at the
/// given uniforms. Deterministic in u; same law as sample_ancestral.
std::vector<double> sample_quantile_transform(const MixtureModel& model, const UniformDraw& draw);

/// Accepted draws from the conditional density at dimension d restricted to
/// t <= upper, produced by rejection.
struct TruncatedSampleBatch {
  int dimension = 0;
  double upper = 0;
  std::vector<double> resp;  // conditioning responsibilities the draws used
  std::vector<double> samples;
  std::int64_t attempts = 0;

  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(samples.size()) / static_cast<double>(attempts);
  }
};

/// Rejection-samples n_samples values from the conditional density given the
/// responsibility row, keeping only t <= upper. Throws LowAcceptanceError
/// (carrying the empirical acceptance estimate) if some sample exceeds
/// max_attempts_per_sample rejections; slow truncations surface as errors
/// rather than hangs.
TruncatedSampleBatch sample_truncated(const MixtureModel& model, int d,
                                      std::span<const double> resp_row, double upper,
                                      int n_samples, Philox& rng,
                                      std::int64_t max_attempts_per_sample = 1000000);

}  // namespace mixgrad
