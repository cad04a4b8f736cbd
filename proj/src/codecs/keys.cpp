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
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wmlab/codecs.hpp"
#include "wmlab/error.hpp"

namespace wmlab {
namespace {

constexpr std::string_view kKeyHeader = "wmlab-key 1";

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& name, const std::string& text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidParameter,
                "parameter " + name + ": not a number: '" + text + "'");
  }
  return v;
}

long long ParseInt(const std::string& name, const std::string& text) {
  long long v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidParameter,
                "parameter " + name + ": not an integer: '" + text + "'");
  }
  return v;
}

std::uint64_t ParseU64(const std::string& text) {
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kMalformedFile, "bad seed '" + text + "'");
  }
  return v;
}

void RequirePositive(const char* name, double v) {
  if (!(v > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, std::string(name) + " must be > 0");
  }
}

void RequireNonNegative(const char* name, double v) {
  if (!(v >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, std::string(name) + " must be >= 0");
  }
}

template <typename T>
void Shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.Below(i)]);
  }
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

BitMessage BitMessage::FromString(std::string_view text) {
  if (text.size() != kBits) {
    throw Error(ErrorCode::kInvalidParameter,
                "bit message must have 32 characters, got " +
                    std::to_string(text.size()));
  }
  BitMessage m;
  for (int i = 0; i < kBits; ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw Error(ErrorCode::kInvalidParameter, "bit message must be 0/1 only");
    }
    m.bits_[i] = text[i] == '1';
  }
  return m;
}

BitMessage BitMessage::Random(RngStream& rng) {
  BitMessage m;
  for (int i = 0; i < kBits; ++i) m.bits_[i] = (rng.NextU64() >> 63) != 0;
  return m;
}

std::string BitMessage::ToString() const {
  std::string s(kBits, '0');
  for (int i = 0; i < kBits; ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

int BitMessage::CountMatches(const BitMessage& other) const {
  int n = 0;
  for (int i = 0; i < kBits; ++i) n += bits_[i] == other.bits_[i];
  return n;
}

std::vector<FreqBin> AnnulusBins(double r0, double r1) {
  std::vector<FreqBin> bins;
  const int rmax = static_cast<int>(std::ceil(r1)) + 1;
  for (int v = 0; v <= rmax; ++v) {
    for (int u = -rmax; u <= rmax; ++u) {
      if (v == 0 && u <= 0) continue;
      if (std::abs(u) <= 1 || std::abs(v) <= 1) continue;
      const double r = std::hypot(static_cast<double>(u), static_cast<double>(v));
      if (r >= r0 && r < r1) bins.push_back({u, v});
    }
  }
  return bins;
}

DwtDctKey DwtDctKey::Create(std::uint64_t seed, double delta, int band_lo,
                            int band_hi) {
  RequireNonNegative("delta", delta);
  if (band_lo < 1 || band_hi < band_lo) {
    throw Error(ErrorCode::kInvalidParameter, "bad DWT/DCT band");
  }
  std::vector<LlCoord> cand;
  for (int v = 0; v <= band_hi; ++v) {
    for (int u = 0; u <= band_hi; ++u) {
      if (u + v >= band_lo && u + v <= band_hi) cand.push_back({u, v});
    }
  }
  if (cand.size() < 2 * BitMessage::kBits) {
    throw Error(ErrorCode::kInvalidParameter, "DWT/DCT band too narrow");
  }
  RngStream rng(DeriveSeed(seed, {"dwtdct-pairs"}));
  Shuffle(cand, rng);
  DwtDctKey key;
  key.seed = seed;
  key.delta = delta;
  key.band_lo = band_lo;
  key.band_hi = band_hi;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    key.pairs.emplace_back(cand[2 * i], cand[2 * i + 1]);
  }
  return key;
}

SpreadKey SpreadKey::Create(std::uint64_t seed, double alpha, int size) {
  RequireNonNegative("alpha", alpha);
  if (size < 64) throw Error(ErrorCode::kImageTooSmall, "spread size must be >= 64");
  SpreadKey key;
  key.seed = seed;
  key.alpha = alpha;
  key.size = size;
  const std::size_t n = static_cast<std::size_t>(size) * size;
  key.patterns.resize(n * BitMessage::kBits);
  RngStream rng(DeriveSeed(seed, {"spread-patterns"}));
  std::size_t i = 0;
  while (i < key.patterns.size()) {
    std::uint64_t word = rng.NextU64();
    for (int b = 0; b < 64 && i < key.patterns.size(); ++b, ++i) {
      key.patterns[i] = (word >> b) & 1 ? 1 : -1;
    }
  }
  return key;
}

std::span<const std::int8_t> SpreadKey::Pattern(int i) const {
  const std::size_t n = static_cast<std::size_t>(size) * size;
  return std::span<const std::int8_t>(patterns).subspan(i * n, n);
}

RingKey RingKey::Create(std::uint64_t seed, double r0, double r1, double gamma,
                        double inversion_sigma, double ref_width) {
  RequireNonNegative("gamma", gamma);
  RequirePositive("inversion_sigma", inversion_sigma);
  RequirePositive("ref_width", ref_width);
  if (!(r0 > 1.0) || !(r1 > r0) || r0 - ref_width < 1.0) {
    throw Error(ErrorCode::kInvalidParameter, "ring radii must satisfy 1 < r0 < r1");
  }
  RingKey key;
  key.seed = seed;
  key.r0 = r0;
  key.r1 = r1;
  key.ref_width = ref_width;
  key.gamma = gamma;
  key.inversion_sigma = inversion_sigma;
  key.bins = AnnulusBins(r0, r1);
  key.ref_bins = AnnulusBins(r0 - ref_width, r0);
  auto outer = AnnulusBins(r1, r1 + ref_width);
  key.ref_bins.insert(key.ref_bins.end(), outer.begin(), outer.end());
  RngStream rng(DeriveSeed(seed, {"ring-key"}));
  key.key_values.reserve(key.bins.size());
  for (std::size_t i = 0; i < key.bins.size(); ++i) {
    const double re = rng.Normal() / std::numbers::sqrt2;
    const double im = rng.Normal() / std::numbers::sqrt2;
    key.key_values.emplace_back(re, im);
  }
  return key;
}

LatentBitKey LatentBitKey::Create(std::uint64_t seed, double r0, double r1,
                                  double gamma, double inversion_sigma) {
  RequireNonNegative("gamma", gamma);
  RequirePositive("inversion_sigma", inversion_sigma);
  if (!(r0 > 1.0) || !(r1 > r0)) {
    throw Error(ErrorCode::kInvalidParameter, "latent radii must satisfy 1 < r0 < r1");
  }
  std::vector<FreqBin> bins = AnnulusBins(r0, r1);
  if (bins.size() < static_cast<std::size_t>(BitMessage::kBits) * kGroupSize) {
    throw Error(ErrorCode::kInvalidParameter, "latent annulus too small for 256 bins");
  }
  RngStream rng(DeriveSeed(seed, {"latentbit-key"}));
  Shuffle(bins, rng);
  LatentBitKey key;
  key.seed = seed;
  key.r0 = r0;
  key.r1 = r1;
  key.gamma = gamma;
  key.inversion_sigma = inversion_sigma;
  std::size_t next = 0;
  for (int i = 0; i < BitMessage::kBits; ++i) {
    std::array<FreqBin, kGroupSize> g;
    std::array<Complex, kGroupSize> vals;
    for (int j = 0; j < kGroupSize; ++j) {
      g[j] = bins[next++];
      vals[j] = std::polar(1.0, rng.Uniform(0.0, 2.0 * std::numbers::pi));
    }
    key.groups.push_back(g);
    key.values.push_back(vals);
  }
  key.filler_bins.assign(bins.begin() + next, bins.end());
  // Keep the filler in canonical order so it is independent of the shuffle.
  std::sort(key.filler_bins.begin(), key.filler_bins.end(),
            [](const FreqBin& a, const FreqBin& b) {
              return a.v != b.v ? a.v < b.v : a.u < b.u;
            });
  return key;
}

std::string_view CodecName(CodecKind kind) {
  switch (kind) {
    case CodecKind::kDwtDct: return "dwtdct";
    case CodecKind::kSpread: return "spread";
    case CodecKind::kRing: return "ring";
    case CodecKind::kLatentBit: return "latentbit";
  }
  return "unknown";
}

CodecKind ParseCodecKind(std::string_view name) {
  for (CodecKind k : {CodecKind::kDwtDct, CodecKind::kSpread, CodecKind::kRing,
                      CodecKind::kLatentBit}) {
    if (CodecName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown codec '" + std::string(name) + "'");
}

CodecKind KindOf(const WatermarkKey& key) {
  return static_cast<CodecKind>(key.index());
}

bool IsBitCodec(CodecKind kind) { return kind != CodecKind::kRing; }

WatermarkKey MakeKey(CodecKind kind, std::uint64_t seed,
                     const std::map<std::string, std::string>& params) {
  std::map<std::string, std::string> rest = params;
  auto take_d = [&](const char* name, double def) {
    auto it = rest.find(name);
    if (it == rest.end()) return def;
    const double v = ParseDouble(name, it->second);
    rest.erase(it);
    return v;
  };
  auto take_i = [&](const char* name, long long def) {
    auto it = rest.find(name);
    if (it == rest.end()) return def;
    const long long v = ParseInt(name, it->second);
    rest.erase(it);
    return v;
  };
  WatermarkKey key;
  switch (kind) {
    case CodecKind::kDwtDct: {
      const double delta = take_d("delta", 0.04);
      const int lo = static_cast<int>(take_i("band_lo", 14));
      const int hi = static_cast<int>(take_i("band_hi", 24));
      key = DwtDctKey::Create(seed, delta, lo, hi);
      break;
    }
    case CodecKind::kSpread: {
      const double alpha = take_d("alpha", 0.004);
      const int size = static_cast<int>(take_i("size", 256));
      key = SpreadKey::Create(seed, alpha, size);
      break;
    }
    case CodecKind::kRing: {
      const double r0 = take_d("r0", 16.0);
      const double r1 = take_d("r1", 20.0);
      const double gamma = take_d("gamma", 0.08);
      const double sigma = take_d("inversion_sigma", 2.0);
      const double ref = take_d("ref_width", 2.0);
      key = RingKey::Create(seed, r0, r1, gamma, sigma, ref);
      break;
    }
    case CodecKind::kLatentBit: {
      const double r0 = take_d("r0", 24.0);
      const double r1 = take_d("r1", 34.0);
      const double gamma = take_d("gamma", 0.08);
      const double sigma = take_d("inversion_sigma", 2.0);
      key = LatentBitKey::Create(seed, r0, r1, gamma, sigma);
      break;
    }
  }
  if (!rest.empty()) {
    throw Error(ErrorCode::kInvalidParameter,
                "unknown parameter '" + rest.begin()->first + "' for codec " +
                    std::string(CodecName(kind)));
  }
  return key;
}

std::map<std::string, std::string> KeyParams(const WatermarkKey& key) {
  std::map<std::string, std::string> p;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DwtDctKey>) {
          p["delta"] = FormatDouble(k.delta);
          p["band_lo"] = std::to_string(k.band_lo);
          p["band_hi"] = std::to_string(k.band_hi);
        } else if constexpr (std::is_same_v<T, SpreadKey>) {
          p["alpha"] = FormatDouble(k.alpha);
          p["size"] = std::to_string(k.size);
        } else if constexpr (std::is_same_v<T, RingKey>) {
          p["r0"] = FormatDouble(k.r0);
          p["r1"] = FormatDouble(k.r1);
          p["gamma"] = FormatDouble(k.gamma);
          p["inversion_sigma"] = FormatDouble(k.inversion_sigma);
          p["ref_width"] = FormatDouble(k.ref_width);
        } else {
          p["r0"] = FormatDouble(k.r0);
          p["r1"] = FormatDouble(k.r1);
          p["gamma"] = FormatDouble(k.gamma);
          p["inversion_sigma"] = FormatDouble(k.inversion_sigma);
        }
      },
      key);
  return p;
}

std::string KeyToText(const WatermarkKey& key) {
  std::ostringstream out;
  out << kKeyHeader << "\n";
  out << "codec = " << CodecName(KindOf(key)) << "\n";
  out << "seed = " << std::visit([](const auto& k) { return k.seed; }, key) << "\n";
  for (const auto& [name, value] : KeyParams(key)) {
    out << name << " = " << value << "\n";
  }
  return out.str();
}

WatermarkKey KeyFromText(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || Trim(line) != kKeyHeader) {
    throw Error(ErrorCode::kMalformedFile, "missing 'wmlab-key 1' header");
  }
  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kMalformedFile, "key line without '=': " + t);
    }
    fields[Trim(std::string_view(t).substr(0, eq))] =
        Trim(std::string_view(t).substr(eq + 1));
  }
  auto codec = fields.find("codec");
  auto seed = fields.find("seed");
  if (codec == fields.end() || seed == fields.end()) {
    throw Error(ErrorCode::kMalformedFile, "key file needs codec and seed");
  }
  const CodecKind kind = ParseCodecKind(codec->second);
  const std::uint64_t s = ParseU64(seed->second);
  fields.erase("codec");
  fields.erase("seed");
  try {
    return MakeKey(kind, s, fields);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidParameter) {
      throw Error(ErrorCode::kMalformedFile, e.what());
    }
    throw;
  }
}

}  // namespace wmlab
