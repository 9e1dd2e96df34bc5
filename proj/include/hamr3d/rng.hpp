// Copyright 2026 The hamr3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, purpose, index), so results never depend on thread count
// or on the order in which grains are visited.

#ifndef HAMR3D_RNG_HPP
#define HAMR3D_RNG_HPP

#include <array>
#include <cstdint>

namespace hamr {

using Philox4x32Block = std::array<std::uint32_t, 4>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline Philox4x32Block philox4x32_10(Philox4x32Block ctr,
                                     std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Maps a 32-bit word onto the open interval (0, 1).
inline double to_open_unit(std::uint32_t u) {
  return (static_cast<double>(u) + 0.5) * (1.0 / 4294967296.0);
}

/// Inverse of the standard normal CDF (Wichura, AS 241, PPND16).
/// Relative accuracy about 1e-16 over the open unit interval.
double inverse_normal_cdf(double p);

/// Purpose tags keep independent uses of one seed from overlapping.
enum class RngPurpose : std::uint32_t {
  kGeometry = 1,
  kProperties = 2,
  kThermalNoise = 3,
  kTest = 99,
};

/// One keyed stream: blocks are addressed by a 64-bit index.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream, RngPurpose purpose)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream),
        purpose_(static_cast<std::uint32_t>(purpose)) {}

  Philox4x32Block block(std::uint64_t index) const {
    return philox4x32_10({static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32), stream_,
                          purpose_},
                         key_);
  }

  /// Uniform on (0, 1); lane selects one of the four words of a block.
  double uniform(std::uint64_t index, int lane) const {
    return to_open_unit(block(index)[static_cast<std::size_t>(lane & 3)]);
  }

  double normal(std::uint64_t index, int lane) const {
    return inverse_normal_cdf(uniform(index, lane));
  }

  /// Six standard normals for one integrator step (two Philox blocks).
  std::array<double, 6> normals6(std::uint64_t step) const {
    const auto a = block(2 * step);
    const auto b = block(2 * step + 1);
    return {inverse_normal_cdf(to_open_unit(a[0])),
            inverse_normal_cdf(to_open_unit(a[1])),
            inverse_normal_cdf(to_open_unit(a[2])),
            inverse_normal_cdf(to_open_unit(a[3])),
            inverse_normal_cdf(to_open_unit(b[0])),
            inverse_normal_cdf(to_open_unit(b[1]))};
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint32_t purpose_;
};

}  // namespace hamr

#endif  // HAMR3D_RNG_HPP
