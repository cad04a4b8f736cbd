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
#include <map>
#include <mutex>
#include <numbers>

#include "wmlab/error.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {
namespace {

// Half-sample symmetric index fold: ... b a | a b c ... c | c b ...
int Reflect(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Applies out = M * in along rows (axis 0: transform each row of length w)
// or columns, where M is n x n row-major.
GrayF ApplyRows(const GrayF& in, const std::vector<double>& m, bool transpose) {
  const int w = in.width();
  const int h = in.height();
  GrayF out(w, h);
  std::vector<double> tmp(w);
  for (int y = 0; y < h; ++y) {
    for (int k = 0; k < w; ++k) {
      double s = 0.0;
      for (int x = 0; x < w; ++x) {
        s += (transpose ? m[static_cast<std::size_t>(x) * w + k]
                        : m[static_cast<std::size_t>(k) * w + x]) *
             in.at(x, y);
      }
      tmp[k] = s;
    }
    for (int k = 0; k < w; ++k) out.at(k, y) = tmp[k];
  }
  return out;
}

GrayF ApplyCols(const GrayF& in, const std::vector<double>& m, bool transpose) {
  const int w = in.width();
  const int h = in.height();
  GrayF out(w, h);
  std::vector<double> col(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = in.at(x, y);
    for (int k = 0; k < h; ++k) {
      double s = 0.0;
      for (int y = 0; y < h; ++y) {
        s += (transpose ? m[static_cast<std::size_t>(y) * h + k]
                        : m[static_cast<std::size_t>(k) * h + y]) *
             col[y];
      }
      out.at(x, k) = s;
    }
  }
  return out;
}

std::vector<double> BuildDct(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int x = 0; x < n; ++x) {
      m[static_cast<std::size_t>(k) * n + x] =
          scale * std::cos(std::numbers::pi * (x + 0.5) * k / n);
    }
  }
  return m;
}

}  // namespace

const std::vector<double>& DctMatrix(int n) {
  static std::mutex mu;
  static auto* cache = new std::map<int, std::vector<double>>();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(n);
  if (it == cache->end()) it = cache->emplace(n, BuildDct(n)).first;
  // std::map nodes are stable, so the reference outlives the lock.
  return it->second;
}

GrayF Dct2(const GrayF& plane) {
  return ApplyCols(ApplyRows(plane, DctMatrix(plane.width()), false),
                   DctMatrix(plane.height()), false);
}

GrayF Idct2(const GrayF& plane) {
  return ApplyCols(ApplyRows(plane, DctMatrix(plane.width()), true),
                   DctMatrix(plane.height()), true);
}

DwtPyramid HaarDwt2(const GrayF& plane) {
  const int w = plane.width();
  const int h = plane.height();
  const int hw = (w + 1) / 2;
  const int hh = (h + 1) / 2;
  DwtPyramid p{GrayF(hw, hh), GrayF(hw, hh), GrayF(hw, hh), GrayF(hw, hh), w, h};
  auto px = [&](int x, int y) {
    return plane.at(std::min(x, w - 1), std::min(y, h - 1));
  };
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      const double a = px(2 * x, 2 * y);
      const double b = px(2 * x + 1, 2 * y);
      const double c = px(2 * x, 2 * y + 1);
      const double d = px(2 * x + 1, 2 * y + 1);
      p.ll.at(x, y) = (a + b + c + d) / 2;
      p.lh.at(x, y) = (a - b + c - d) / 2;
      p.hl.at(x, y) = (a + b - c - d) / 2;
      p.hh.at(x, y) = (a - b - c + d) / 2;
    }
  }
  return p;
}

GrayF HaarIdwt2(const DwtPyramid& p) {
  const int hw = p.ll.width();
  const int hh = p.ll.height();
  for (const GrayF* band : {&p.lh, &p.hl, &p.hh}) {
    if (band->width() != hw || band->height() != hh) {
      throw Error(ErrorCode::kDimensionMismatch, "Haar subbands differ in size");
    }
  }
  const int w = p.width > 0 ? p.width : 2 * hw;
  const int h = p.height > 0 ? p.height : 2 * hh;
  if ((w + 1) / 2 != hw || (h + 1) / 2 != hh) {
    throw Error(ErrorCode::kDimensionMismatch, "Haar pyramid size inconsistent");
  }
  GrayF out(w, h);
  auto put = [&](int x, int y, double v) {
    if (x < w && y < h) out.at(x, y) = v;
  };
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < hw; ++x) {
      const double ll = p.ll.at(x, y);
      const double lh = p.lh.at(x, y);
      const double hl = p.hl.at(x, y);
      const double hhv = p.hh.at(x, y);
      put(2 * x, 2 * y, (ll + lh + hl + hhv) / 2);
      put(2 * x + 1, 2 * y, (ll - lh + hl - hhv) / 2);
      put(2 * x, 2 * y + 1, (ll + lh - hl - hhv) / 2);
      put(2 * x + 1, 2 * y + 1, (ll - lh - hl + hhv) / 2);
    }
  }
  return out;
}

std::vector<double> GaussianKernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidParameter, "blur sigma must be > 0");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayF GaussianBlur(const GrayF& plane, double sigma) {
  const std::vector<double> k = GaussianKernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = plane.width();
  const int h = plane.height();
  GrayF tmp(w, h);
  std::vector<double> line;
  line.resize(w + 2 * r);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w + 2 * r; ++i) line[i] = plane.at(Reflect(i - r, w), y);
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int j = 0; j <= 2 * r; ++j) s += k[j] * line[x + j];
      tmp.at(x, y) = s;
    }
  }
  GrayF out(w, h);
  line.resize(h + 2 * r);
  for (int x = 0; x < w; ++x) {
    for (int i = 0; i < h + 2 * r; ++i) line[i] = tmp.at(x, Reflect(i - r, h));
    for (int y = 0; y < h; ++y) {
      double s = 0.0;
      for (int j = 0; j <= 2 * r; ++j) s += k[j] * line[y + j];
      out.at(x, y) = s;
    }
  }
  return out;
}

ImageF GaussianBlur(const ImageF& img, double sigma) {
  auto ch = SplitChannels(img);
  return MergeChannels(GaussianBlur(ch[0], sigma), GaussianBlur(ch[1], sigma),
                       GaussianBlur(ch[2], sigma));
}

namespace {

struct Tap {
  int i0, i1;
  double t;
};

std::vector<Tap> Taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[i] = {i0, i1, s - i0};
  }
  return taps;
}

void RequireSize(int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) {
    throw Error(ErrorCode::kInvalidParameter, "resize target must be >= 1");
  }
}

}  // namespace

GrayF ResizeBilinear(const GrayF& plane, int new_w, int new_h) {
  RequireSize(new_w, new_h);
  if (new_w == plane.width() && new_h == plane.height()) return plane;
  const auto tx = Taps(plane.width(), new_w);
  const auto ty = Taps(plane.height(), new_h);
  GrayF out(new_w, new_h);
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      const Tap& a = tx[x];
      const Tap& b = ty[y];
      const double top = plane.at(a.i0, b.i0) * (1 - a.t) + plane.at(a.i1, b.i0) * a.t;
      const double bot = plane.at(a.i0, b.i1) * (1 - a.t) + plane.at(a.i1, b.i1) * a.t;
      out.at(x, y) = top * (1 - b.t) + bot * b.t;
    }
  }
  return out;
}

ImageF ResizeBilinear(const ImageF& img, int new_w, int new_h) {
  RequireSize(new_w, new_h);
  if (new_w == img.width() && new_h == img.height()) return img;
  auto ch = SplitChannels(img);
  return MergeChannels(ResizeBilinear(ch[0], new_w, new_h),
                       ResizeBilinear(ch[1], new_w, new_h),
                       ResizeBilinear(ch[2], new_w, new_h));
}

std::vector<int> JpegLumaTable(int quality) {
  if (quality < 1 || quality > 100) {
    throw Error(ErrorCode::kInvalidParameter, "jpeg quality must be in 1..100");
  }
  static constexpr std::array<int, 64> kBase = {
      16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
      14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
      18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::vector<int> table(64);
  for (int i = 0; i < 64; ++i) {
    const long v = std::lround(kBase[i] * scale / 100.0);
    table[i] = static_cast<int>(std::clamp(v, 1L, 255L));
  }
  return table;
}

ImageF JpegProxy(const ImageF& img, int quality) {
  const std::vector<int> q = JpegLumaTable(quality);
  const std::vector<double>& m = DctMatrix(8);
  const GrayF y = Luminance(img);
  const int w = y.width();
  const int h = y.height();
  GrayF delta(w, h);
  std::array<double, 64> blk{}, tmp{}, coef{};
  for (int by = 0; by < h; by += 8) {
    for (int bx = 0; bx < w; bx += 8) {
      // Partial edge blocks are completed by edge replication.
      for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) {
          blk[j * 8 + i] =
              y.at(std::min(bx + i, w - 1), std::min(by + j, h - 1)) * 255.0 - 128.0;
        }
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
          coef[k * 8 + i] = std::round(s / q[k * 8 + i]) * q[k * 8 + i];
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
          const int x = bx + i;
          const int yy = by + j;
          if (x < w && yy < h) {
            delta.at(x, yy) = (s + 128.0) / 255.0 - y.at(x, yy);
          }
        }
      }
    }
  }
  return AddLuminance(img, delta);
}

}  // namespace wmlab
