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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixgrad {

/// One named group of estimated coordinates (e.g. the logit-space weight
/// gradient) with per-coordinate Monte-Carlo statistics. variance is the
/// unbiased per-sample variance and std_error = sqrt(variance / n).
struct CoordinateBlock {
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> std_error;
};

/// Result of one Monte-Carlo estimation run. Reruns with the same seed are
/// bit-identical regardless of the worker count: samples are generated in
/// fixed-size batches with per-batch counter streams and batch sums are
/// combined by pairwise reduction in batch-index order.
struct EstimatorReport {
  std::string method;  // "pathwise" or "score"
  std::vector<CoordinateBlock> blocks;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::int64_t degenerate_samples = 0;
  double wall_time_sec = 0;

  const CoordinateBlock& block(std::string_view name) const;
  bool has_block(std::string_view name) const;
};

// Block names shared by the pathwise and score estimators.
inline constexpr const char* kBlockWeightsRaw = "weights_raw_pi";
inline constexpr const char* kBlockWeightsLogit = "weights_logit";
inline constexpr const char* kBlockLocations = "locations";
inline constexpr const char* kBlockLogScales = "log_scales";

namespace detail {

/// Per-batch accumulator: elementwise sums and sums of squares of the
/// per-sample coordinate vectors.
struct BatchAccum {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::int64_t count = 0;
  std::int64_t degenerate = 0;

  void resize(std::size_t n_coords) {
    sum.assign(n_coords, 0.0);
    sum_sq.assign(n_coords, 0.0);
  }
  void add(std::span<const double> values) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += values[i];
      sum_sq[i] += values[i] * values[i];
    }
    ++count;
  }
};

/// Fixed batch size used by all estimators; results do not depend on the
/// worker count because the batch partition is fixed.
inline constexpr std::int64_t kBatchSize = 4096;

using BatchFn = std::function<void(std::int64_t batch_index, std::int64_t quota, BatchAccum&)>;

/// Runs batches 0..ceil(n/kBatchSize)-1 across `workers` threads, each
/// worker instantiating its own batch function via the factory (so closures
/// can hold scratch buffers), then reduces batch sums pairwise in index
/// order. Aborts with DegenerateRateError if more than 0.01% of the n
/// samples were degenerate.
struct EstimateResult {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> std_error;
  std::int64_t degenerate = 0;
};

EstimateResult run_batched(std::int64_t n, int workers, std::size_t n_coords,
                           const std::function<BatchFn()>& make_batch_fn);

}  // namespace detail

}  // namespace mixgrad
