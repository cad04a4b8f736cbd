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
#include <string>

#include "wmlab/error.hpp"
#include "wmlab/imagecore.hpp"

namespace wmlab {
namespace {

void RequirePositive(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidParameter,
                "image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kFullMask: return "FullMask";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

ImageF::ImageF(int width, int height, double fill)
    : width_(width), height_(height) {
  RequirePositive(width, height);
  data_.assign(pixel_count() * kChannels, fill);
}

ImageF::ImageF(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  RequirePositive(width, height);
  if (data_.size() != pixel_count() * kChannels) {
    throw Error(ErrorCode::kInvalidParameter, "image data length mismatch");
  }
  RequireFinite();
}

void ImageF::RequireFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidParameter, "image contains NaN or Inf");
    }
  }
}

GrayF::GrayF(int width, int height, double fill)
    : width_(width), height_(height) {
  RequirePositive(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayF::GrayF(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  RequirePositive(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidParameter, "plane data length mismatch");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  RequirePositive(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::CountTrue() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

void RequireSameSize(const ImageF& a, const ImageF& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

void RequireSameSize(const ImageF& a, const BinaryMask& m) {
  if (a.width() != m.width() || a.height() != m.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and mask sizes differ");
  }
}

GrayF Luminance(const ImageF& img) {
  GrayF out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = kLumaWeights[0] * src[3 * i] + kLumaWeights[1] * src[3 * i + 1] +
             kLumaWeights[2] * src[3 * i + 2];
  }
  return out;
}

ImageF AddLuminance(const ImageF& img, const GrayF& delta, double scale) {
  if (img.width() != delta.width() || img.height() != delta.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "luminance plane size differs");
  }
  ImageF out = img;
  auto dst = out.data();
  auto d = delta.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = scale * d[i];
    dst[3 * i] += v;
    dst[3 * i + 1] += v;
    dst[3 * i + 2] += v;
  }
  return out;
}

ImageF Composite(const ImageF& fg, const ImageF& bg, const BinaryMask& mask) {
  RequireSameSize(fg, bg);
  RequireSameSize(fg, mask);
  ImageF out = bg;
  auto dst = out.data();
  auto src = fg.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      dst[3 * i] = src[3 * i];
      dst[3 * i + 1] = src[3 * i + 1];
      dst[3 * i + 2] = src[3 * i + 2];
    }
  }
  return out;
}

double MaskCoverage(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  return static_cast<double>(mask.CountTrue()) /
         static_cast<double>(mask.size());
}

BinaryMask InvertMask(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out.set(i, !mask[i]);
  return out;
}

BinaryMask MaskUnion(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask sizes differ");
  }
  BinaryMask out = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i]) out.set(i, true);
  }
  return out;
}

BinaryMask DilateMask(const BinaryMask& mask, int iterations) {
  BinaryMask cur = mask;
  const int w = mask.width();
  const int h = mask.height();
  for (int it = 0; it < iterations; ++it) {
    BinaryMask next(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        bool on = false;
        for (int dy = -1; dy <= 1 && !on; ++dy) {
          for (int dx = -1; dx <= 1 && !on; ++dx) {
            const int xx = x + dx;
            const int yy = y + dy;
            if (xx >= 0 && xx < w && yy >= 0 && yy < h && cur.at(xx, yy)) {
              on = true;
            }
          }
        }
        next.set(x, y, on);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Flood fill from `start` over pixels equal to `value`; returns indices.
std::vector<std::size_t> Flood(const BinaryMask& mask, std::size_t start,
                               bool value, std::vector<std::uint8_t>& seen) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::size_t> members;
  std::vector<std::size_t> stack = {start};
  seen[start] = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    members.push_back(i);
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
      if (!seen[j] && mask[j] == value) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return members;
}

}  // namespace

BinaryMask FillHoles(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  BinaryMask outside(w, h);
  auto visit = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!mask[i] && !seen[i]) {
      for (std::size_t j : Flood(mask, i, false, seen)) outside.set(j, true);
    }
  };
  for (int x = 0; x < w; ++x) {
    visit(x, 0);
    visit(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    visit(0, y);
    visit(w - 1, y);
  }
  return InvertMask(outside);
}

std::vector<BinaryMask> ConnectedComponents(const BinaryMask& mask) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && !seen[i]) comps.push_back(Flood(mask, i, true, seen));
  }
  // Discovery order is row-major by first pixel; stable sort keeps it for ties.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<BinaryMask> out;
  out.reserve(comps.size());
  for (const auto& comp : comps) {
    BinaryMask m(mask.width(), mask.height());
    for (std::size_t j : comp) m.set(j, true);
    out.push_back(std::move(m));
  }
  return out;
}

BinaryMask LargestComponent(const BinaryMask& mask) {
  auto comps = ConnectedComponents(mask);
  if (comps.empty()) return BinaryMask(mask.width(), mask.height());
  return std::move(comps.front());
}

ImageF Clamp01(const ImageF& img) {
  ImageF out = img;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::array<GrayF, 3> SplitChannels(const ImageF& img) {
  std::array<GrayF, 3> planes = {GrayF(img.width(), img.height()),
                                 GrayF(img.width(), img.height()),
                                 GrayF(img.width(), img.height())};
  auto src = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) planes[c].data()[i] = src[3 * i + c];
  }
  return planes;
}

ImageF MergeChannels(const GrayF& r, const GrayF& g, const GrayF& b) {
  if (r.width() != g.width() || r.width() != b.width() ||
      r.height() != g.height() || r.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "channel planes differ in size");
  }
  ImageF out(r.width(), r.height());
  auto dst = out.data();
  for (std::size_t i = 0; i < r.size(); ++i) {
    dst[3 * i] = r.data()[i];
    dst[3 * i + 1] = g.data()[i];
    dst[3 * i + 2] = b.data()[i];
  }
  return out;
}

ImageF ApplyMask(const ImageF& img, const BinaryMask& mask) {
  RequireSameSize(img, mask);
  ImageF out = img;
  auto dst = out.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double m = mask[i] ? 1.0 : 0.0;
    dst[3 * i] *= m;
    dst[3 * i + 1] *= m;
    dst[3 * i + 2] *= m;
  }
  return out;
}

}  // namespace wmlab
