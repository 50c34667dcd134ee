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
#include <doctest.h>

#include <cmath>

#include "mixgrad/errors.hpp"
#include "mixgrad/estimator.hpp"
#include "mixgrad/philox.hpp"
#include "support.hpp"

using namespace mixgrad;

TEST_SUITE("engine") {

TEST_CASE("batched reduction is worker-count invariant") {
  auto make_fn = []() -> detail::BatchFn {
    return [](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      Philox rng(1234, static_cast<std::uint64_t>(batch) + 1);
      for (std::int64_t i = 0; i < quota; ++i) {
        const double v[2] = {rng.next_double(), rng.next_double() - 0.5};
        accum.add(std::span<const double>(v, 2));
      }
    };
  };
  const auto r1 = detail::run_batched(100001, 1, 2, make_fn);
  const auto r5 = detail::run_batched(100001, 5, 2, make_fn);
  CHECK(r1.mean == r5.mean);
  CHECK(r1.variance == r5.variance);
  CHECK(testsupport::near_abs(r1.mean[0], 0.5, 0.005));
  CHECK(testsupport::near_abs(r1.std_error[0], std::sqrt(1.0 / 12.0 / 100001.0), 2e-5));
}

TEST_CASE("degenerate samples are counted and redrawn") {
  auto make_fn = []() -> detail::BatchFn {
    return [](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      Philox rng(99, static_cast<std::uint64_t>(batch) + 1);
      std::int64_t produced = 0;
      while (produced < quota) {
        const double u = rng.next_double();
        if (u < 0.2) {  // pretend one in five draws underflows
          ++accum.degenerate;
          continue;
        }
        const double v[1] = {u};
        accum.add(std::span<const double>(v, 1));
        ++produced;
      }
    };
  };
  // A 20% degenerate rate blows the 0.01% budget.
  CHECK_THROWS_AS(detail::run_batched(50000, 1, 1, make_fn), DegenerateRateError);
  try {
    detail::run_batched(50000, 1, 1, make_fn);
  } catch (const DegenerateRateError& e) {
    CHECK(e.requested_count() == 50000);
    CHECK(e.degenerate_count() > 10000);
  }
}

TEST_CASE("a tiny degenerate count is reported, not fatal") {
  auto make_fn = []() -> detail::BatchFn {
    return [](std::int64_t batch, std::int64_t quota, detail::BatchAccum& accum) {
      if (batch == 0) accum.degenerate = 1;  // one lone skip in the whole run
      Philox rng(7, static_cast<std::uint64_t>(batch) + 1);
      for (std::int64_t i = 0; i < quota; ++i) {
        const double v[1] = {rng.next_double()};
        accum.add(std::span<const double>(v, 1));
      }
    };
  };
  const auto result = detail::run_batched(1000000, 2, 1, make_fn);
  CHECK(result.degenerate == 1);
}

TEST_CASE("input validation") {
  auto noop = []() -> detail::BatchFn {
    return [](std::int64_t, std::int64_t, detail::BatchAccum&) {};
  };
  CHECK_THROWS_AS(detail::run_batched(0, 1, 1, noop), InvalidInputError);
  CHECK_THROWS_AS(detail::run_batched(10, 0, 1, noop), InvalidInputError);
}

TEST_CASE("worker exceptions propagate") {
  auto make_fn = []() -> detail::BatchFn {
    return [](std::int64_t batch, std::int64_t, detail::BatchAccum&) {
      if (batch == 3) throw NumericFailureError("boom");
    };
  };
  CHECK_THROWS_AS(detail::run_batched(100000, 4, 1, make_fn), NumericFailureError);
}

}  // TEST_SUITE
