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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmlab/error.hpp"
#include "wmlab/scenegen.hpp"

namespace wmlab {
namespace {

constexpr std::string_view kObjects[] = {
    "fox", "teapot", "lighthouse", "owl", "sailboat", "cactus",
    "violin", "tortoise", "lantern", "hot air balloon", "mushroom", "bicycle"};
constexpr std::string_view kBackgrounds[] = {
    "meadow", "desert", "city street", "forest", "beach", "mountain lake",
    "library", "night sky", "snowfield", "harbor"};
constexpr std::string_view kStyles[] = {
    "watercolor", "oil painting", "pixel art", "charcoal sketch", "photorealistic",
    "ukiyo-e", "art nouveau", "low poly", "impressionist"};

// Blob radius range as a fraction of the image side.
constexpr double kRadiusMin = 0.18;
constexpr double kRadiusMax = 0.30;
constexpr double kBackgroundAmplitude = 0.25;
constexpr double kForegroundAmplitude = 0.15;
constexpr double kMinLumaGap = 0.3;
constexpr double kMinCoverage = 0.05;
constexpr double kMaxCoverage = 0.60;

std::array<double, 3> Palette(RngStream& rng) {
  return {0.15 + 0.7 * rng.Uniform(), 0.15 + 0.7 * rng.Uniform(),
          0.15 + 0.7 * rng.Uniform()};
}

double Luma(const std::array<double, 3>& c) {
  return kLumaWeights[0] * c[0] + kLumaWeights[1] * c[1] + kLumaWeights[2] * c[2];
}

BinaryMask DrawBlob(RngStream& rng, int size) {
  const double cx = rng.Uniform(0.35, 0.65) * size;
  const double cy = rng.Uniform(0.35, 0.65) * size;
  const double radius = rng.Uniform(kRadiusMin, kRadiusMax) * size;
  const double ecc = rng.Uniform(0.7, 1.0);
  const double rot = rng.Uniform(0.0, std::numbers::pi);
  constexpr int kHarmonics[3] = {2, 3, 5};
  double amp[3], phase[3];
  for (int i = 0; i < 3; ++i) {
    amp[i] = rng.Uniform(-0.12, 0.12);
    phase[i] = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  }
  const double cr = std::cos(rot);
  const double sr = std::sin(rot);
  BinaryMask mask(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double px = x + 0.5 - cx;
      const double py = y + 0.5 - cy;
      const double theta = std::atan2(py, px);
      double r = 1.0;
      for (int i = 0; i < 3; ++i) r += amp[i] * std::cos(kHarmonics[i] * theta + phase[i]);
      r *= radius;
      const double dx = px * cr + py * sr;
      const double dy = (-px * sr + py * cr) / ecc;
      mask.set(x, y, std::hypot(dx, dy) <= r);
    }
  }
  return mask;
}

template <std::size_t N>
std::string Pick(RngStream& rng, const std::string_view (&words)[N]) {
  return std::string(words[rng.Below(N)]);
}

}  // namespace

std::span<const std::string_view> ObjectWords() { return kObjects; }
std::span<const std::string_view> BackgroundWords() { return kBackgrounds; }
std::span<const std::string_view> StyleWords() { return kStyles; }

GrayF ValueNoise(RngStream& rng, int size, int cells) {
  if (cells < 1) throw Error(ErrorCode::kInvalidParameter, "cells must be >= 1");
  const int g = cells + 2;
  std::vector<double> lattice(static_cast<std::size_t>(g) * g);
  for (double& v : lattice) v = rng.Uniform();
  std::vector<int> idx(size);
  std::vector<double> t(size);
  for (int i = 0; i < size; ++i) {
    const double s = static_cast<double>(i) * cells / size;
    idx[i] = static_cast<int>(std::floor(s));
    const double f = s - idx[i];
    t[i] = f * f * (3.0 - 2.0 * f);
  }
  GrayF out(size, size);
  for (int y = 0; y < size; ++y) {
    const double ty = t[y];
    const double* r0 = &lattice[static_cast<std::size_t>(idx[y]) * g];
    const double* r1 = r0 + g;
    for (int x = 0; x < size; ++x) {
      const double tx = t[x];
      const int i = idx[x];
      const double top = r0[i] * (1 - tx) + r0[i + 1] * tx;
      const double bot = r1[i] * (1 - tx) + r1[i + 1] * tx;
      out.at(x, y) = top * (1 - ty) + bot * ty;
    }
  }
  return out;
}

GrayF Fbm(RngStream& rng, int size, int base_cells, int octaves, double persistence) {
  GrayF sum(size, size);
  double amp = 1.0;
  double total = 0.0;
  for (int o = 0; o < octaves; ++o) {
    GrayF layer = ValueNoise(rng, size, base_cells << o);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] += amp * layer.data()[i];
    total += amp;
    amp *= persistence;
  }
  for (double& v : sum.data()) v /= total;
  return sum;
}

SceneDescriptor DescribeSeed(std::uint64_t prompt_seed) {
  RngStream rng(DeriveSeed(prompt_seed, {"scene-descriptor"}));
  SceneDescriptor d;
  d.object_name = Pick(rng, kObjects);
  d.background_name = Pick(rng, kBackgrounds);
  d.style_name = Pick(rng, kStyles);
  d.prompt_seed = prompt_seed;
  return d;
}

Scene GenerateScene(std::uint64_t prompt_seed, int size) {
  if (size < 64) {
    throw Error(ErrorCode::kInvalidParameter, "scene size must be >= 64");
  }
  RngStream rng(DeriveSeed(prompt_seed, {"scene-pixels"}));
  std::array<double, 3> bgc, fgc;
  do {
    bgc = Palette(rng);
    fgc = Palette(rng);
  } while (std::abs(Luma(fgc) - Luma(bgc)) < kMinLumaGap);

  const GrayF bg_noise = Fbm(rng, size, 4, 4);
  BinaryMask mask;
  double coverage = 0.0;
  do {
    mask = DrawBlob(rng, size);
    coverage = MaskCoverage(mask);
  } while (coverage < kMinCoverage || coverage > kMaxCoverage);
  const GrayF fg_noise = Fbm(rng, size, 16, 2);

  ImageF img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool fg = mask.at(x, y);
      const auto& pal = fg ? fgc : bgc;
      const double n = fg ? kForegroundAmplitude * (fg_noise.at(x, y) - 0.5)
                          : kBackgroundAmplitude * (bg_noise.at(x, y) - 0.5);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = std::clamp(pal[c] + n, 0.0, 1.0);
    }
  }
  return Scene{std::move(img), std::move(mask), DescribeSeed(prompt_seed)};
}

std::array<std::string, 3> DescribeScene(const Scene& scene) {
  return {scene.descriptor.object_name, scene.descriptor.background_name,
          scene.descriptor.style_name};
}

}  // namespace wmlab
