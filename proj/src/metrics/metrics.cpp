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
#include <vector>

#include "wmlab/error.hpp"
#include "wmlab/metrics.hpp"

namespace wmlab {
namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> Window1d() {
  std::vector<double> w(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[i] = std::exp(-0.5 * d * d / (kWindowSigma * kWindowSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable weighted window sum over valid positions only.
GrayF FilterValid(const GrayF& in, const std::vector<double>& w) {
  const int ow = in.width() - kWindow + 1;
  const int oh = in.height() - kWindow + 1;
  GrayF tmp(ow, in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * in.at(x + k, y);
      tmp.at(x, y) = s;
    }
  }
  GrayF out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * tmp.at(x, y + k);
      out.at(x, y) = s;
    }
  }
  return out;
}

GrayF Product(const GrayF& a, const GrayF& b) {
  GrayF out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

}  // namespace

double Mse(const ImageF& a, const ImageF& b) {
  RequireSameSize(a, b);
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    s += d * d;
  }
  return s / static_cast<double>(da.size());
}

double PsnrFromMse(double mse) {
  if (mse == 0.0) return kPsnrIdentical;
  return -10.0 * std::log10(mse);
}

double Psnr(const ImageF& a, const ImageF& b) { return PsnrFromMse(Mse(a, b)); }

double Ssim(const ImageF& a, const ImageF& b) {
  RequireSameSize(a, b);
  if (std::min(a.width(), a.height()) < kWindow) {
    throw Error(ErrorCode::kImageTooSmall, "ssim needs images of at least 11x11");
  }
  const GrayF x = Luminance(a);
  const GrayF y = Luminance(b);
  static const std::vector<double> w = Window1d();
  const GrayF mx = FilterValid(x, w);
  const GrayF my = FilterValid(y, w);
  const GrayF sxx = FilterValid(Product(x, x), w);
  const GrayF syy = FilterValid(Product(y, y), w);
  const GrayF sxy = FilterValid(Product(x, y), w);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double ux = mx.data()[i];
    const double uy = my.data()[i];
    const double vx = sxx.data()[i] - ux * ux;
    const double vy = syy.data()[i] - uy * uy;
    const double cxy = sxy.data()[i] - ux * uy;
    total += ((2 * ux * uy + kC1) * (2 * cxy + kC2)) /
             ((ux * ux + uy * uy + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mx.size());
}

double Mssim(const ImageF& a, const ImageF& b, const BinaryMask& mask) {
  RequireSameSize(a, b);
  RequireSameSize(a, mask);
  if (mask.CountTrue() == 0) {
    throw Error(ErrorCode::kEmptyMask, "mssim needs at least one mask pixel");
  }
  return Ssim(ApplyMask(a, mask), ApplyMask(b, mask));
}

QualityReport Quality(const ImageF& a, const ImageF& b, const BinaryMask* mask) {
  QualityReport q;
  q.mse = Mse(a, b);
  q.psnr = PsnrFromMse(q.mse);
  q.ssim = Ssim(a, b);
  if (mask != nullptr) q.mssim = Mssim(a, b, *mask);
  return q;
}

Aggregate Summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "no values to aggregate");
  Aggregate g;
  g.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  g.mean = sum / static_cast<double>(g.count);
  if (g.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.std = std::sqrt(ss / static_cast<double>(g.count - 1));
  }
  g.ci95_halfwidth = 1.96 * g.std / std::sqrt(static_cast<double>(g.count));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = g.count / 2;
  g.median = g.count % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return g;
}

}  // namespace wmlab
