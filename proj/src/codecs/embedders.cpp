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

#include <cmath>
#include <numbers>
#include <string>

#include "wmlab/codecs.hpp"
#include "wmlab/error.hpp"

namespace wmlab {
namespace {

constexpr int kMinSize = 64;

void RequireMinSize(const ImageF& img) {
  if (img.width() < kMinSize || img.height() < kMinSize) {
    throw Error(ErrorCode::kImageTooSmall,
                "codec needs at least 64x64, got " + std::to_string(img.width()) +
                    "x" + std::to_string(img.height()));
  }
}

void RequireSpectralSize(const ImageF& img) {
  RequireMinSize(img);
  if (img.width() != img.height()) {
    throw Error(ErrorCode::kNonSquare, "Fourier codecs need a square image");
  }
  const int n = img.width();
  if ((n & (n - 1)) != 0) {
    throw Error(ErrorCode::kInvalidParameter, "Fourier codecs need a power-of-two size");
  }
}

int Wrap(int i, int n) { return ((i % n) + n) % n; }

// Writes a half-plane value and its Hermitian mirror.
void PutHermitian(ComplexPlane& z, const FreqBin& b, Complex value) {
  const int n = z.width();
  z.at(Wrap(b.u, n), Wrap(b.v, n)) = value;
  z.at(Wrap(-b.u, n), Wrap(-b.v, n)) = std::conj(value);
}

Complex GetBin(const ComplexPlane& z, const FreqBin& b) {
  const int n = z.width();
  return z.at(Wrap(b.u, n), Wrap(b.v, n));
}

// Real spatial carrier from a Hermitian spectrum, unitary scaling.
GrayF CarrierFromSpectrum(const ComplexPlane& spec) {
  GrayF z = Ifft2(spec);
  const double scale = static_cast<double>(spec.width());
  for (double& v : z.data()) v *= scale;
  return z;
}

Complex UnitComplexNormal(RngStream& rng) {
  const double re = rng.Normal() / std::numbers::sqrt2;
  const double im = rng.Normal() / std::numbers::sqrt2;
  return {re, im};
}

void RequireBinsFit(const ImageF& img, double r1) {
  if (r1 + 2.0 >= img.width() / 2.0) {
    throw Error(ErrorCode::kImageTooSmall, "annulus does not fit the image spectrum");
  }
}

BitOutcome Score(const BitMessage& extracted, const BitMessage& truth) {
  return BitOutcome{extracted,
                    extracted.CountMatches(truth) / static_cast<double>(BitMessage::kBits)};
}

// LL-band DCT of the luminance and the rest of the pyramid.
struct LlDct {
  GrayF luma;
  DwtPyramid pyr;
  GrayF coeffs;
};

LlDct Analyze(const ImageF& img, const DwtDctKey& key) {
  LlDct a{Luminance(img), {}, {}};
  a.pyr = HaarDwt2(a.luma);
  if (a.pyr.ll.width() <= key.band_hi || a.pyr.ll.height() <= key.band_hi) {
    throw Error(ErrorCode::kImageTooSmall, "image too small for the DWT/DCT band");
  }
  a.coeffs = Dct2(a.pyr.ll);
  return a;
}

}  // namespace

ImageF DwtDctEmbed(const ImageF& img, const BitMessage& msg, const DwtDctKey& key) {
  RequireMinSize(img);
  LlDct a = Analyze(img, key);
  bool changed = false;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    const auto& [p1, p2] = key.pairs[i];
    double& c1 = a.coeffs.at(p1.u, p1.v);
    double& c2 = a.coeffs.at(p2.u, p2.v);
    const double d = c1 - c2;
    const double target = msg[i] ? key.delta : -key.delta;
    if ((msg[i] && d < target) || (!msg[i] && d > target)) {
      const double adj = (target - d) / 2.0;
      c1 += adj;
      c2 -= adj;
      changed = true;
    }
  }
  if (!changed) return img;
  a.pyr.ll = Idct2(a.coeffs);
  const GrayF y2 = HaarIdwt2(a.pyr);
  GrayF delta(img.width(), img.height());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta.data()[i] = y2.data()[i] - a.luma.data()[i];
  }
  return AddLuminance(img, delta);
}

BitOutcome DwtDctExtract(const ImageF& img, const DwtDctKey& key,
                         const BitMessage& truth) {
  RequireMinSize(img);
  const LlDct a = Analyze(img, key);
  BitMessage out;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    const auto& [p1, p2] = key.pairs[i];
    out.set(i, a.coeffs.at(p1.u, p1.v) - a.coeffs.at(p2.u, p2.v) > 0.0);
  }
  return Score(out, truth);
}

ImageF SpreadEmbed(const ImageF& img, const BitMessage& msg, const SpreadKey& key) {
  if (img.width() != key.size || img.height() != key.size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "spread key is for " + std::to_string(key.size) + "x" +
                    std::to_string(key.size));
  }
  if (key.alpha == 0.0) return img;
  GrayF delta(img.width(), img.height());
  for (int i = 0; i < BitMessage::kBits; ++i) {
    const double s = msg[i] ? key.alpha : -key.alpha;
    auto p = key.Pattern(i);
    for (std::size_t j = 0; j < p.size(); ++j) delta.data()[j] += s * p[j];
  }
  return AddLuminance(img, delta);
}

BitOutcome SpreadExtract(const ImageF& img, const SpreadKey& key,
                         const BitMessage& truth) {
  if (img.width() != key.size || img.height() != key.size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "spread key is for " + std::to_string(key.size) + "x" +
                    std::to_string(key.size));
  }
  const GrayF y = Luminance(img);
  const GrayF low = GaussianBlur(y, key.detect_sigma);
  std::vector<double> r(y.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = y.data()[j] - low.data()[j];
  BitMessage out;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    auto p = key.Pattern(i);
    double corr = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) corr += p[j] * r[j];
    out.set(i, corr > 0.0);
  }
  return Score(out, truth);
}

ComplexPlane InversionSpectrum(const ImageF& img, double gamma, double sigma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "detection needs gamma > 0");
  }
  const GrayF y = Luminance(img);
  const GrayF low = GaussianBlur(y, sigma);
  GrayF r(y.width(), y.height());
  for (std::size_t j = 0; j < r.size(); ++j) {
    r.data()[j] = (y.data()[j] - low.data()[j]) / gamma;
  }
  ComplexPlane spec = Fft2(r);
  const double norm = 1.0 / std::sqrt(static_cast<double>(spec.size()));
  for (Complex& v : spec.data()) v *= norm;
  return spec;
}

ImageF RingEmbed(const ImageF& img, const RingKey& key, std::uint64_t noise_seed) {
  RequireSpectralSize(img);
  RequireBinsFit(img, key.r1 + key.ref_width);
  if (key.gamma == 0.0) return img;
  const int n = img.width();
  ComplexPlane spec(n, n);
  RngStream rng(DeriveSeed(noise_seed, {"ring-carrier"}));
  for (const FreqBin& b : key.ref_bins) PutHermitian(spec, b, UnitComplexNormal(rng));
  for (std::size_t i = 0; i < key.bins.size(); ++i) {
    PutHermitian(spec, key.bins[i], key.key_values[i]);
  }
  return AddLuminance(img, CarrierFromSpectrum(spec), key.gamma);
}

PValueOutcome RingDetect(const ImageF& img, const RingKey& key) {
  RequireSpectralSize(img);
  RequireBinsFit(img, key.r1 + key.ref_width);
  const ComplexPlane spec = InversionSpectrum(img, key.gamma, key.inversion_sigma);
  double ref_power = 0.0;
  for (const FreqBin& b : key.ref_bins) ref_power += std::norm(GetBin(spec, b));
  ref_power /= static_cast<double>(key.ref_bins.size());
  if (!(ref_power >= 1e-12)) {
    throw Error(ErrorCode::kDegenerateVariance, "reference annulus has no energy");
  }
  const double half = ref_power / 2.0;
  double eta = 0.0;
  double lambda = 0.0;
  for (std::size_t i = 0; i < key.bins.size(); ++i) {
    eta += std::norm(GetBin(spec, key.bins[i]) - key.key_values[i]);
    lambda += std::norm(key.key_values[i]);
  }
  PValueOutcome out;
  out.eta = eta / half;
  out.lambda = lambda / half;
  out.dof = static_cast<int>(2 * key.bins.size());
  out.p_value = Ncx2Cdf(out.eta, out.dof, out.lambda);
  return out;
}

ImageF LatentBitEmbed(const ImageF& img, const BitMessage& msg,
                      const LatentBitKey& key, std::uint64_t noise_seed) {
  RequireSpectralSize(img);
  RequireBinsFit(img, key.r1);
  if (key.gamma == 0.0) return img;
  const int n = img.width();
  ComplexPlane spec(n, n);
  RngStream rng(DeriveSeed(noise_seed, {"latentbit-carrier"}));
  for (const FreqBin& b : key.filler_bins) PutHermitian(spec, b, UnitComplexNormal(rng));
  for (int i = 0; i < BitMessage::kBits; ++i) {
    const double sign = msg[i] ? 1.0 : -1.0;
    for (int j = 0; j < LatentBitKey::kGroupSize; ++j) {
      PutHermitian(spec, key.groups[i][j], sign * key.values[i][j]);
    }
  }
  return AddLuminance(img, CarrierFromSpectrum(spec), key.gamma);
}

BitOutcome LatentBitExtract(const ImageF& img, const LatentBitKey& key,
                            const BitMessage& truth) {
  RequireSpectralSize(img);
  RequireBinsFit(img, key.r1);
  // gamma only scales the residual, so a zero-gamma key still decodes.
  const double gamma = key.gamma > 0.0 ? key.gamma : 1.0;
  const ComplexPlane spec = InversionSpectrum(img, gamma, key.inversion_sigma);
  BitMessage out;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    double s = 0.0;
    for (int j = 0; j < LatentBitKey::kGroupSize; ++j) {
      s += (GetBin(spec, key.groups[i][j]) * std::conj(key.values[i][j])).real();
    }
    out.set(i, s > 0.0);
  }
  return Score(out, truth);
}

ImageF Embed(const WatermarkKey& key, const ImageF& img, const BitMessage& msg,
             std::uint64_t noise_seed) {
  return std::visit(
      [&](const auto& k) -> ImageF {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DwtDctKey>) return DwtDctEmbed(img, msg, k);
        else if constexpr (std::is_same_v<T, SpreadKey>) return SpreadEmbed(img, msg, k);
        else if constexpr (std::is_same_v<T, RingKey>) return RingEmbed(img, k, noise_seed);
        else return LatentBitEmbed(img, msg, k, noise_seed);
      },
      key);
}

DetectionOutcome Detect(const WatermarkKey& key, const ImageF& img,
                        const BitMessage& truth) {
  return std::visit(
      [&](const auto& k) -> DetectionOutcome {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DwtDctKey>) return DwtDctExtract(img, k, truth);
        else if constexpr (std::is_same_v<T, SpreadKey>) return SpreadExtract(img, k, truth);
        else if constexpr (std::is_same_v<T, RingKey>) return RingDetect(img, k);
        else return LatentBitExtract(img, k, truth);
      },
      key);
}

}  // namespace wmlab
