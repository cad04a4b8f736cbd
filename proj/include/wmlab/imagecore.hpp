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

#ifndef WMLAB_IMAGECORE_HPP_
#define WMLAB_IMAGECORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wmlab {

/// Floating-point RGB raster, row-major, channel-interleaved. Nominal range
/// is [0, 1]; values may leave it inside pipelines and are clamped only at
/// 8-bit export.
class ImageF {
 public:
  static constexpr int kChannels = 3;

  ImageF() = default;
  ImageF(int width, int height, double fill = 0.0);
  /// Throws InvalidParameter on a size mismatch or non-finite value.
  ImageF(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  double at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  /// Throws InvalidParameter if any value is NaN or infinite.
  void RequireFinite() const;

  bool operator==(const ImageF&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Single-channel real plane.
class GrayF {
 public:
  GrayF() = default;
  GrayF(int width, int height, double fill = 0.0);
  GrayF(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  bool operator==(const GrayF&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Per-pixel boolean mask; true marks foreground (the preserved region).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

  std::size_t CountTrue() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Rec. 601 luma weights.
inline constexpr std::array<double, 3> kLumaWeights = {0.299, 0.587, 0.114};

GrayF Luminance(const ImageF& img);

/// Adds `delta` to all three channels, so luminance shifts by exactly
/// `delta` and chroma differences are untouched.
ImageF AddLuminance(const ImageF& img, const GrayF& delta, double scale = 1.0);

/// fg where mask is true, bg elsewhere; fg pixels are copied bit-identically.
ImageF Composite(const ImageF& fg, const ImageF& bg, const BinaryMask& mask);

double MaskCoverage(const BinaryMask& mask);
BinaryMask InvertMask(const BinaryMask& mask);
BinaryMask MaskUnion(const BinaryMask& a, const BinaryMask& b);
/// 3x3 box dilation applied `iterations` times.
BinaryMask DilateMask(const BinaryMask& mask, int iterations = 1);
/// Fills background regions not 4-connected to the mask border.
BinaryMask FillHoles(const BinaryMask& mask);

/// 4-connected components, largest first; equal areas ordered by the
/// first pixel in row-major scan order.
std::vector<BinaryMask> ConnectedComponents(const BinaryMask& mask);
BinaryMask LargestComponent(const BinaryMask& mask);

ImageF Clamp01(const ImageF& img);
std::array<GrayF, 3> SplitChannels(const ImageF& img);
ImageF MergeChannels(const GrayF& r, const GrayF& g, const GrayF& b);

/// Pixel-wise product with the mask (masked-out pixels become 0).
ImageF ApplyMask(const ImageF& img, const BinaryMask& mask);

void RequireSameSize(const ImageF& a, const ImageF& b);
void RequireSameSize(const ImageF& a, const BinaryMask& m);

}  // namespace wmlab

#endif  // WMLAB_IMAGECORE_HPP_
