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

#ifndef WMLAB_METRICS_HPP_
#define WMLAB_METRICS_HPP_

#include <limits>
#include <optional>
#include <span>

#include "wmlab/imagecore.hpp"

namespace wmlab {

/// PSNR of identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

struct QualityReport {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> mssim;
};

double Mse(const ImageF& a, const ImageF& b);
/// Peak 1.0; returns kPsnrIdentical when mse == 0.
double Psnr(const ImageF& a, const ImageF& b);
double PsnrFromMse(double mse);
/// Luma SSIM, 11x11 Gaussian window (sigma 1.5), valid positions only.
double Ssim(const ImageF& a, const ImageF& b);
/// SSIM of the mask-multiplied images; EmptyMask if no pixel is set.
double Mssim(const ImageF& a, const ImageF& b, const BinaryMask& mask);

QualityReport Quality(const ImageF& a, const ImageF& b,
                      const BinaryMask* mask = nullptr);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  double ci95_halfwidth = 0.0;
  double median = 0.0;
};

/// Sample mean, n-1 std (0 for n == 1), 1.96*std/sqrt(n), median.
Aggregate Summarize(std::span<const double> values);

}  // namespace wmlab

#endif  // WMLAB_METRICS_HPP_
