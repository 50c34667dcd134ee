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
#include "mixgrad/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "mixgrad/errors.hpp"

namespace mixgrad {

const CoordinateBlock& EstimatorReport::block(std::string_view name) const {
  for (const CoordinateBlock& b : blocks)
    if (b.name == name) return b;
  throw InvalidInputError("estimator report has no block named \"" + std::string(name) + "\"");
}

bool EstimatorReport::has_block(std::string_view name) const {
  for (const CoordinateBlock& b : blocks)
    if (b.name == name) return true;
  return false;
}

namespace detail {

namespace {

void combine_into(BatchAccum& into, const BatchAccum& from) {
  for (std::size_t i = 0; i < into.sum.size(); ++i) {
    into.sum[i] += from.sum[i];
    into.sum_sq[i] += from.sum_sq[i];
  }
  into.count += from.count;
  into.degenerate += from.degenerate;
}

}  // namespace

EstimateResult run_batched(std::int64_t n, int workers, std::size_t n_coords,
                           const std::function<BatchFn()>& make_batch_fn) {
  if (n < 1) throw InvalidInputError("estimator needs n >= 1");
  if (workers < 1) throw InvalidInputError("estimator needs workers >= 1");

  const std::int64_t n_batches = (n + kBatchSize - 1) / kBatchSize;
  std::vector<BatchAccum> accums(n_batches);
  for (auto& a : accums) a.resize(n_coords);

  auto run_range = [&](std::int64_t first, std::int64_t stride) {
    BatchFn fn = make_batch_fn();
    for (std::int64_t b = first; b < n_batches; b += stride) {
      const std::int64_t quota = std::min<std::int64_t>(kBatchSize, n - b * kBatchSize);
      fn(b, quota, accums[b]);
    }
  };

  if (workers == 1 || n_batches == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int used = static_cast<int>(std::min<std::int64_t>(workers, n_batches));
    threads.reserve(used);
    for (int w = 0; w < used; ++w) {
      threads.emplace_back([&, w]() {
        try {
          run_range(w, used);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Pairwise reduction in batch-index order: the merged sums do not depend
  // on which worker produced which batch.
  std::size_t m = accums.size();
  while (m > 1) {
    const std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i) {
      combine_into(accums[2 * i], accums[2 * i + 1]);
      if (i != 2 * i) accums[i] = std::move(accums[2 * i]);
    }
    // Pairwise over even slots: compact [0,2,4,...] plus a possible tail.
    std::size_t out = half;
    if (m % 2 == 1) {
      accums[out] = std::move(accums[m - 1]);
      ++out;
    }
    m = out;
  }
  BatchAccum& total = accums[0];

  if (total.degenerate > 0 &&
      static_cast<double>(total.degenerate) > 1e-4 * static_cast<double>(n))
    throw DegenerateRateError(total.degenerate, n);

  EstimateResult result;
  result.degenerate = total.degenerate;
  result.mean.resize(n_coords);
  result.variance.resize(n_coords);
  result.std_error.resize(n_coords);
  const double count = static_cast<double>(total.count);
  for (std::size_t i = 0; i < n_coords; ++i) {
    const double mean = total.sum[i] / count;
    result.mean[i] = mean;
    double var = 0.0;
    if (total.count > 1) {
      var = (total.sum_sq[i] - count * mean * mean) / (count - 1.0);
      if (var < 0.0) var = 0.0;  // cancellation guard
    }
    result.variance[i] = var;
    result.std_error[i] = std::sqrt(var / count);
  }
  return result;
}

}  // namespace detail

}  // namespace mixgrad
