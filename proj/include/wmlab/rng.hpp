// Copyright 2026 The wmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WMLAB_RNG_HPP_
#define WMLAB_RNG_HPP_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace wmlab {

/// splitmix64 step; also used to seed and to mix stream labels.
std::uint64_t SplitMix64(std::uint64_t& state);

/// Order-sensitive hash of a seed with string labels (FNV-1a per label,
/// folded through splitmix64). Used to derive independent sub-streams.
std::uint64_t DeriveSeed(std::uint64_t seed,
                         std::initializer_list<std::string_view> labels);
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

/// xoshiro256** generator seeded through splitmix64. Output depends only on
/// the seed, never on the platform or standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t NextU64();
  /// Uniform in [0, 1) with 53 bits of precision.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);
  /// Standard normal via Box-Muller (second value cached).
  double Normal();

  RngStream Derive(std::string_view label) const;
  RngStream Derive(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmlab

#endif  // WMLAB_RNG_HPP_
