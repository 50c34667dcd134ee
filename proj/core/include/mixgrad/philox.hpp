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

#include <array>
#include <cstdint>

namespace mixgrad {

/// Counter-based Philox4x32-10 generator.
///
/// The generator is a pure function of (seed, stream, position), which makes
/// Monte-Carlo runs reproducible and trivially parallel: every batch of work
/// is assigned its own stream and the merged results do not depend on which
/// thread produced which batch.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  /// Uniform double in the open interval (0,1); endpoints are excluded so
  /// that quantile functions applied to the output stay finite.
  double next_double() noexcept {
    const std::uint64_t bits = next_u64();
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  }

  std::uint64_t next_u64() noexcept {
    if (lane_pos_ == 2) {
      lanes_ = encrypt(block_++);
      lane_pos_ = 0;
    }
    return lanes_[lane_pos_++];
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::array<std::uint64_t, 2> encrypt(std::uint64_t block) const noexcept {
    std::uint32_t c0 = static_cast<std::uint32_t>(block);
    std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * c0;
      const std::uint64_t p1 = 0xCD9E8D57ull * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {(static_cast<std::uint64_t>(c1) << 32) | c0,
            (static_cast<std::uint64_t>(c3) << 32) | c2};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> lanes_{};
  int lane_pos_ = 2;
};

}  // namespace mixgrad
