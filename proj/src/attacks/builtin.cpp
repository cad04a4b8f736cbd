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

#include "wmlab/attacks.hpp"
#include "wmlab/error.hpp"
#include "wmlab/scenegen.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {
namespace {

// Saliency is computed on a fixed small grid; the residual trick works on
// the coarse spectrum.
constexpr int kSaliencySize = 64;
constexpr double kSaliencySigma = 2.5;
constexpr int kOtsuBins = 256;

constexpr int kInpaintMaxIterations = 2000;
constexpr double kInpaintTolerance = 1e-4;
constexpr int kBandWidth = 2;

GrayF SpectralResidual(const GrayF& small) {
  const int n = small.width();
  const ComplexPlane f = Fft2(small);
  GrayF log_amp(n, small.height());
  for (std::size_t i = 0; i < f.size(); ++i) {
    log_amp.data()[i] = std::log(std::abs(f.data()[i]) + 1e-9);
  }
  ComplexPlane r(n, small.height());
  const int h = small.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < n; ++x) {
      double box = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          box += log_amp.at((x + dx + n) % n, (y + dy + h) % h);
        }
      }
      const double residual = log_amp.at(x, y) - box / 9.0;
      r.at(x, y) = std::polar(std::exp(residual), std::arg(f.at(x, y)));
    }
  }
  const ComplexPlane back = Ifft2Complex(r);
  GrayF sal(n, h);
  for (std::size_t i = 0; i < back.size(); ++i) sal.data()[i] = std::norm(back.data()[i]);
  return GaussianBlur(sal, kSaliencySigma);
}

}  // namespace

std::optional<double> OtsuThreshold(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(hi)))) return std::nullopt;
  std::vector<double> hist(kOtsuBins, 0.0);
  const double width = (hi - lo) / kOtsuBins;
  for (double v : values) {
    const int b = std::min(kOtsuBins - 1, static_cast<int>((v - lo) / width));
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < kOtsuBins; ++b) sum_all += b * hist[b];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kOtsuBins - 1; ++b) {
    w0 += hist[b];
    sum0 += b * hist[b];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  // Threshold at the centre of the last bin of the lower class.
  return lo + (best_bin + 0.5) * width;
}

std::vector<BinaryMask> BuiltinSegment(const ImageF& img) {
  if (img.width() < 64 || img.height() < 64) {
    throw Error(ErrorCode::kImageTooSmall, "segmenter needs at least 64x64");
  }
  const GrayF luma = Luminance(img);
  const auto [lo, hi] = std::minmax_element(luma.data().begin(), luma.data().end());
  if (*hi - *lo < 1e-9) return {};
  const GrayF small = ResizeBilinear(luma, kSaliencySize, kSaliencySize);
  const GrayF sal = ResizeBilinear(SpectralResidual(small), img.width(), img.height());
  const std::optional<double> t = OtsuThreshold(sal.data());
  if (!t) return {};
  BinaryMask fg(img.width(), img.height());
  for (std::size_t i = 0; i < sal.size(); ++i) fg.set(i, sal.data()[i] > *t);
  std::vector<BinaryMask> comps = ConnectedComponents(FillHoles(fg));
  for (BinaryMask& m : comps) m = DilateMask(m, 1);
  return comps;
}

ImageF BuiltinInpaint(const ImageF& img, const BinaryMask& region, RngStream& rng) {
  RequireSameSize(img, region);
  const std::size_t count = region.CountTrue();
  if (count == region.size()) {
    throw Error(ErrorCode::kFullMask, "cannot inpaint the whole frame");
  }
  if (count == 0) return img;
  const int w = img.width();
  const int h = img.height();

  // Border band: non-region pixels within two pixels of the region.
  const BinaryMask grown = DilateMask(region, kBandWidth);
  std::array<double, 3> mean{}, sq{};
  std::size_t band_n = 0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (grown[i] && !region[i]) {
      for (int c = 0; c < 3; ++c) {
        const double v = img.data()[3 * i + c];
        mean[c] += v;
        sq[c] += v * v;
      }
      ++band_n;
    }
  }
  std::array<double, 3> sd{};
  for (int c = 0; c < 3; ++c) {
    mean[c] /= static_cast<double>(band_n);
    sd[c] = std::sqrt(std::max(0.0, sq[c] / static_cast<double>(band_n) - mean[c] * mean[c]));
  }

  ImageF out = img;
  auto px = out.data();
  std::vector<std::size_t> cells;
  cells.reserve(count);
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region[i]) {
      cells.push_back(i);
      for (int c = 0; c < 3; ++c) px[3 * i + c] = mean[c];
    }
  }

  // Gauss-Seidel sweeps of the 4-neighbour average over in-frame neighbours.
  for (int it = 0; it < kInpaintMaxIterations; ++it) {
    double max_update = 0.0;
    for (std::size_t i : cells) {
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      std::size_t nb[4];
      int k = 0;
      if (x > 0) nb[k++] = i - 1;
      if (x + 1 < w) nb[k++] = i + 1;
      if (y > 0) nb[k++] = i - w;
      if (y + 1 < h) nb[k++] = i + w;
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += px[3 * nb[j] + c];
        const double v = s / k;
        max_update = std::max(max_update, std::abs(v - px[3 * i + c]));
        px[3 * i + c] = v;
      }
    }
    if (max_update < kInpaintTolerance) break;
  }

  // Texture overlay: three octaves of value noise scaled to the band spread.
  if (sd[0] > 0.0 || sd[1] > 0.0 || sd[2] > 0.0) {
    const int size = std::max(w, h);
    GrayF noise(size, size);
    double amp = 1.0;
    for (int div : {8, 4, 2}) {
      const GrayF layer = ValueNoise(rng, size, std::max(1, size / div));
      for (std::size_t i = 0; i < noise.size(); ++i) {
        noise.data()[i] += amp * (layer.data()[i] - 0.5);
      }
      amp *= 0.5;
    }
    double m = 0.0, s2 = 0.0;
    for (double v : noise.data()) m += v;
    m /= static_cast<double>(noise.size());
    for (double v : noise.data()) s2 += (v - m) * (v - m);
    const double nsd = std::sqrt(s2 / static_cast<double>(noise.size()));
    if (nsd > 0.0) {
      for (std::size_t i : cells) {
        const double n = noise.at(static_cast<int>(i % w), static_cast<int>(i / w)) / nsd;
        for (int c = 0; c < 3; ++c) px[3 * i + c] += n * sd[c];
      }
    }
  }
  return out;
}

BinaryMask CenteredEllipse(int width, int height, double coverage) {
  // pi * a * b = coverage * w * h with a = s*w/2, b = s*h/2.
  const double s = std::sqrt(4.0 * coverage / std::numbers::pi);
  const double a = s * width / 2.0;
  const double b = s * height / 2.0;
  BinaryMask m(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x + 0.5 - width / 2.0) / a;
      const double dy = (y + 0.5 - height / 2.0) / b;
      m.set(x, y, dx * dx + dy * dy <= 1.0);
    }
  }
  return m;
}

AccumulatedMask AccumulateMasks(const std::vector<BinaryMask>& candidates, double tau,
                                double tau_max) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidates, "no segmentation candidates");
  }
  if (!(tau > 0.0 && tau < tau_max && tau_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need 0 < tau < tau_max <= 1");
  }
  for (const BinaryMask& m : candidates) {
    if (m.width() != candidates[0].width() || m.height() != candidates[0].height()) {
      throw Error(ErrorCode::kDimensionMismatch, "candidate masks differ in size");
    }
  }
  AccumulatedMask out{candidates[0], false};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    BinaryMask u = MaskUnion(out.foreground, candidates[i]);
    if (MaskCoverage(u) > tau) break;
    out.foreground = std::move(u);
  }
  out.fallback_used = MaskCoverage(out.foreground) > tau_max;
  return out;
}

}  // namespace wmlab
