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

#ifndef WMLAB_TRANSFORMS_HPP_
#define WMLAB_TRANSFORMS_HPP_

#include <complex>
#include <span>
#include <vector>

#include "wmlab/imagecore.hpp"

namespace wmlab {

using Complex = std::complex<double>;

class ComplexPlane {
 public:
  ComplexPlane() = default;
  ComplexPlane(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  Complex& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const Complex& at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Complex> data_;
};

/// Forward transform, unnormalized: bin (0,0) is the plain pixel sum.
ComplexPlane Fft2(const GrayF& plane);
ComplexPlane Fft2(const ComplexPlane& plane);
/// Inverse transform scaled by 1/(H*W); the real-valued overload drops the
/// imaginary part.
GrayF Ifft2(const ComplexPlane& spec);
ComplexPlane Ifft2Complex(const ComplexPlane& spec);

/// Orthonormal type-II DCT along both axes, and its inverse.
GrayF Dct2(const GrayF& plane);
GrayF Idct2(const GrayF& plane);

/// Orthonormal n-point DCT-II basis, row k = frequency k.
const std::vector<double>& DctMatrix(int n);

struct DwtPyramid {
  GrayF ll, lh, hl, hh;
  // Size of the plane the pyramid was computed from.
  int width = 0;
  int height = 0;
};

/// One-level orthonormal Haar. Odd dimensions are padded by repeating the
/// last row/column and cropped again by the inverse.
DwtPyramid HaarDwt2(const GrayF& plane);
GrayF HaarIdwt2(const DwtPyramid& pyr);

/// Sampled Gaussian normalized to unit sum, radius ceil(3*sigma).
std::vector<double> GaussianKernel(double sigma);
/// Separable blur with half-sample symmetric borders (edge sample repeated).
GrayF GaussianBlur(const GrayF& plane, double sigma);
ImageF GaussianBlur(const ImageF& img, double sigma);

/// Bilinear resampling with half-pixel-centre alignment.
GrayF ResizeBilinear(const GrayF& plane, int new_w, int new_h);
ImageF ResizeBilinear(const ImageF& img, int new_w, int new_h);

/// Quantization-only JPEG stand-in acting on luma 8x8 blocks.
ImageF JpegProxy(const ImageF& img, int quality);
/// Luminance quantization table for `quality` (row-major 8x8).
std::vector<int> JpegLumaTable(int quality);

}  // namespace wmlab

#endif  // WMLAB_TRANSFORMS_HPP_
