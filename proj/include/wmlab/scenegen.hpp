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

#ifndef WMLAB_SCENEGEN_HPP_
#define WMLAB_SCENEGEN_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "wmlab/imagecore.hpp"
#include "wmlab/rng.hpp"

namespace wmlab {

struct SceneDescriptor {
  std::string object_name;
  std::string background_name;
  std::string style_name;
  std::uint64_t prompt_seed = 0;

  bool operator==(const SceneDescriptor&) const = default;
};

struct Scene {
  ImageF image;
  BinaryMask gt_mask;
  SceneDescriptor descriptor;
};

std::span<const std::string_view> ObjectWords();
std::span<const std::string_view> BackgroundWords();
std::span<const std::string_view> StyleWords();

/// Smoothstep-interpolated lattice noise in [0,1] on a size x size grid with
/// `cells` lattice cells across the image.
GrayF ValueNoise(RngStream& rng, int size, int cells);
/// Normalized sum of `octaves` value-noise layers, doubling cells and
/// scaling amplitude by `persistence` per octave.
GrayF Fbm(RngStream& rng, int size, int base_cells, int octaves,
          double persistence = 0.5);

SceneDescriptor DescribeSeed(std::uint64_t prompt_seed);
/// Throws InvalidParameter for size < 64.
Scene GenerateScene(std::uint64_t prompt_seed, int size);
/// Answers to the object / background / style questions.
std::array<std::string, 3> DescribeScene(const Scene& scene);

}  // namespace wmlab

#endif  // WMLAB_SCENEGEN_HPP_
