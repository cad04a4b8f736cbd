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

#ifndef WMLAB_CODECS_HPP_
#define WMLAB_CODECS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wmlab/imagecore.hpp"
#include "wmlab/rng.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {

class BitMessage {
 public:
  static constexpr int kBits = 32;

  BitMessage() = default;
  explicit BitMessage(const std::array<bool, kBits>& bits) : bits_(bits) {}
  /// Parses a 32-character string of '0'/'1'; InvalidParameter otherwise.
  static BitMessage FromString(std::string_view text);
  static BitMessage Random(RngStream& rng);

  std::string ToString() const;
  bool operator[](int i) const { return bits_[i]; }
  void set(int i, bool v) { bits_[i] = v; }
  int CountMatches(const BitMessage& other) const;

  bool operator==(const BitMessage&) const = default;

 private:
  std::array<bool, kBits> bits_{};
};

struct BitOutcome {
  BitMessage extracted;
  double bit_accuracy = 0.0;
};

struct PValueOutcome {
  double eta = 0.0;
  double p_value = 1.0;
  double lambda = 0.0;
  int dof = 0;
};

using DetectionOutcome = std::variant<BitOutcome, PValueOutcome>;

/// Frequency-bin coordinate with signed indices (u horizontal, v vertical).
struct FreqBin {
  int u = 0;
  int v = 0;
  bool operator==(const FreqBin&) const = default;
};

/// Half-plane bins (v > 0, or v == 0 and u > 0) with radius in [r0, r1),
/// skipping bins with |u| <= 1 or |v| <= 1. Ordered by v then u.
std::vector<FreqBin> AnnulusBins(double r0, double r1);

struct LlCoord {
  int u = 0;  // column frequency
  int v = 0;  // row frequency
  bool operator==(const LlCoord&) const = default;
};

struct DwtDctKey {
  std::uint64_t seed = 0;
  double delta = 0.04;
  int band_lo = 14;
  int band_hi = 24;
  std::vector<std::pair<LlCoord, LlCoord>> pairs;

  static DwtDctKey Create(std::uint64_t seed, double delta = 0.04,
                          int band_lo = 14, int band_hi = 24);
};

struct SpreadKey {
  std::uint64_t seed = 0;
  double alpha = 0.004;
  int size = 256;
  double detect_sigma = 2.0;
  // 32 patterns of size*size entries in {-1,+1}, concatenated.
  std::vector<std::int8_t> patterns;

  static SpreadKey Create(std::uint64_t seed, double alpha = 0.004,
                          int size = 256);
  std::span<const std::int8_t> Pattern(int i) const;
};

struct RingKey {
  std::uint64_t seed = 0;
  double r0 = 16.0;
  double r1 = 20.0;
  double ref_width = 2.0;
  double gamma = 0.08;
  double inversion_sigma = 2.0;
  std::vector<FreqBin> bins;
  std::vector<FreqBin> ref_bins;
  std::vector<Complex> key_values;

  static RingKey Create(std::uint64_t seed, double r0 = 16.0, double r1 = 20.0,
                        double gamma = 0.08, double inversion_sigma = 2.0,
                        double ref_width = 2.0);
};

struct LatentBitKey {
  static constexpr int kGroupSize = 8;

  std::uint64_t seed = 0;
  double r0 = 24.0;
  double r1 = 34.0;
  double gamma = 0.08;
  double inversion_sigma = 2.0;
  // groups[i] holds kGroupSize bins with matching values[i].
  std::vector<std::array<FreqBin, kGroupSize>> groups;
  std::vector<std::array<Complex, kGroupSize>> values;
  // Annulus bins outside every group; filled with carrier noise on embed.
  std::vector<FreqBin> filler_bins;

  static LatentBitKey Create(std::uint64_t seed, double r0 = 24.0,
                             double r1 = 34.0, double gamma = 0.08,
                             double inversion_sigma = 2.0);
};

// Codec families.
enum class CodecKind { kDwtDct, kSpread, kRing, kLatentBit };

std::string_view CodecName(CodecKind kind);
/// Accepts "dwtdct", "spread", "ring", "latentbit"; InvalidParameter else.
CodecKind ParseCodecKind(std::string_view name);

using WatermarkKey = std::variant<DwtDctKey, SpreadKey, RingKey, LatentBitKey>;

CodecKind KindOf(const WatermarkKey& key);
bool IsBitCodec(CodecKind kind);

/// Builds a key from a seed plus textual parameter overrides, e.g.
/// {"delta", "0.05"}. Unknown names raise InvalidParameter.
WatermarkKey MakeKey(CodecKind kind, std::uint64_t seed,
                     const std::map<std::string, std::string>& params = {});
std::map<std::string, std::string> KeyParams(const WatermarkKey& key);

/// Versioned text form: "wmlab-key 1" header then `name = value` lines.
std::string KeyToText(const WatermarkKey& key);
WatermarkKey KeyFromText(std::string_view text);

ImageF DwtDctEmbed(const ImageF& img, const BitMessage& msg, const DwtDctKey& key);
BitOutcome DwtDctExtract(const ImageF& img, const DwtDctKey& key,
                         const BitMessage& truth);

ImageF SpreadEmbed(const ImageF& img, const BitMessage& msg, const SpreadKey& key);
BitOutcome SpreadExtract(const ImageF& img, const SpreadKey& key,
                         const BitMessage& truth);

ImageF RingEmbed(const ImageF& img, const RingKey& key, std::uint64_t noise_seed);
PValueOutcome RingDetect(const ImageF& img, const RingKey& key);

ImageF LatentBitEmbed(const ImageF& img, const BitMessage& msg,
                      const LatentBitKey& key, std::uint64_t noise_seed);
BitOutcome LatentBitExtract(const ImageF& img, const LatentBitKey& key,
                            const BitMessage& truth);

/// Dispatch over the key variant; `msg` is ignored by the ring codec.
ImageF Embed(const WatermarkKey& key, const ImageF& img, const BitMessage& msg,
             std::uint64_t noise_seed);
DetectionOutcome Detect(const WatermarkKey& key, const ImageF& img,
                        const BitMessage& truth);

/// Unitary spectrum of (luma - blur(luma, sigma)) / gamma.
ComplexPlane InversionSpectrum(const ImageF& img, double gamma, double sigma);

/// Non-central chi-squared CDF by Poisson mixture of central terms.
double Ncx2Cdf(double x, int dof, double lambda);

}  // namespace wmlab

#endif  // WMLAB_CODECS_HPP_
