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
#include <array>
#include <cmath>

#include "wmlab/attacks.hpp"
#include "wmlab/error.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {
namespace {

constexpr double kSoftClampWidth = 0.1;

double SoftClamp(double v) {
  if (v > 1.0) return 1.0 + kSoftClampWidth * std::tanh((v - 1.0) / kSoftClampWidth);
  if (v < 0.0) return -kSoftClampWidth * std::tanh(-v / kSoftClampWidth);
  return v;
}

double SoftThreshold(double c, double t) {
  const double m = std::abs(c) - t;
  return m > 0.0 ? std::copysign(m, c) : 0.0;
}

// Soft-thresholds the orthonormal 8x8 DCT of every full block of channel c.
// Leftover rows/columns at the far edges are left as they are.
void DenoiseChannel(ImageF& img, int c, double threshold) {
  const std::vector<double>& m = DctMatrix(8);
  std::array<double, 64> blk{}, tmp{}, coef{};
  for (int by = 0; by + 8 <= img.height(); by += 8) {
    for (int bx = 0; bx + 8 <= img.width(); bx += 8) {
      for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) blk[j * 8 + i] = img.at(bx + i, by + j, c);
      }
      for (int j = 0; j < 8; ++j) {
        for (int k = 0; k < 8; ++k) {
          double s = 0.0;
          for (int i = 0; i < 8; ++i) s += m[k * 8 + i] * blk[j * 8 + i];
          tmp[j * 8 + k] = s;
        }
      }
      for (int k = 0; k < 8; ++k) {
        for (int i = 0; i < 8; ++i) {
          double s = 0.0;
          for (int j = 0; j < 8; ++j) s += m[k * 8 + j] * tmp[j * 8 + i];
          coef[k * 8 + i] = SoftThreshold(s, threshold);
        }
      }
      for (int k = 0; k < 8; ++k) {
        for (int i = 0; i < 8; ++i) {
          double s = 0.0;
          for (int j = 0; j < 8; ++j) s += m[j * 8 + k] * coef[j * 8 + i];
          tmp[k * 8 + i] = s;
        }
      }
      for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) {
          double s = 0.0;
          for (int k = 0; k < 8; ++k) s += m[k * 8 + i] * tmp[j * 8 + k];
          img.at(bx + i, by + j, c) = s;
        }
      }
    }
  }
}

}  // namespace

ImageF RegenProxy(const ImageF& img, double strength, int steps, RngStream& rng) {
  if (!(strength >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "strength must be >= 0");
  if (steps < 1) throw Error(ErrorCode::kInvalidParameter, "steps must be >= 1");
  ImageF x = img;
  for (int s = 0; s < steps; ++s) {
    for (double& v : x.data()) v += strength * rng.Normal();
    for (int c = 0; c < ImageF::kChannels; ++c) DenoiseChannel(x, c, strength / 2.0);
    for (double& v : x.data()) v = SoftClamp(v);
  }
  return x;
}

ImageF Rinse(const ImageF& img, int cycles, double strength, int steps, RngStream& rng) {
  if (cycles < 1) throw Error(ErrorCode::kInvalidParameter, "cycles must be >= 1");
  ImageF x = img;
  for (int c = 0; c < cycles; ++c) x = RegenProxy(x, strength, steps, rng);
  return x;
}

ImageF ApplyDistortion(const ImageF& img, const AttackSpec& spec, RngStream& rng) {
  ValidateAttackSpec(spec);
  return std::visit(
      [&](const auto& a) -> ImageF {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IdentityAttack>) {
          return img;
        } else if constexpr (std::is_same_v<T, BlurAttack>) {
          return GaussianBlur(img, a.sigma);
        } else if constexpr (std::is_same_v<T, JpegAttack>) {
          return JpegProxy(img, a.quality);
        } else if constexpr (std::is_same_v<T, ResizeAttack>) {
          const int w = std::max(1, static_cast<int>(std::lround(img.width() * a.factor)));
          const int h = std::max(1, static_cast<int>(std::lround(img.height() * a.factor)));
          return ResizeBilinear(ResizeBilinear(img, w, h), img.width(), img.height());
        } else if constexpr (std::is_same_v<T, NoiseAttack>) {
          if (a.sigma == 0.0) return img;
          ImageF out = img;
          for (double& v : out.data()) v += a.sigma * rng.Normal();
          return out;
        } else if constexpr (std::is_same_v<T, RegenAttack>) {
          return RegenProxy(img, a.strength, a.steps, rng);
        } else if constexpr (std::is_same_v<T, RinseAttack>) {
          return Rinse(img, a.cycles, a.strength, a.steps, rng);
        } else {
          throw Error(ErrorCode::kInvalidParameter,
                      "semantic regeneration is not a distortion");
        }
      },
      spec);
}

}  // namespace wmlab
