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
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "wmlab/error.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/rng.hpp"
#include "wmlab/transforms.hpp"

namespace wmlab {
namespace {

using testing::RandomImage;

ImageF Shifted(const ImageF& img, double d) {
  ImageF out = img;
  for (double& v : out.data()) v += d;
  return out;
}

// Straightforward SSIM with the same window, written without shortcuts.
double ReferenceSsim(const ImageF& a, const ImageF& b) {
  const GrayF x = Luminance(a), y = Luminance(b);
  double w[11][11], norm = 0.0;
  for (int j = 0; j < 11; ++j) {
    for (int i = 0; i < 11; ++i) {
      w[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      norm += w[j][i];
    }
  }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  int count = 0;
  for (int oy = 0; oy + 11 <= x.height(); ++oy) {
    for (int ox = 0; ox + 11 <= x.width(); ++ox) {
      double mx = 0, my = 0;
      for (int j = 0; j < 11; ++j) {
        for (int i = 0; i < 11; ++i) {
          mx += w[j][i] / norm * x.at(ox + i, oy + j);
          my += w[j][i] / norm * y.at(ox + i, oy + j);
        }
      }
      double vx = 0, vy = 0, cxy = 0;
      for (int j = 0; j < 11; ++j) {
        for (int i = 0; i < 11; ++i) {
          const double dx = x.at(ox + i, oy + j) - mx, dy = y.at(ox + i, oy + j) - my;
          vx += w[j][i] / norm * dx * dx;
          vy += w[j][i] / norm * dy * dy;
          cxy += w[j][i] / norm * dx * dy;
        }
      }
      total += (2 * mx * my + c1) * (2 * cxy + c2) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / count;
}

TEST(MseTest, Basics) {
  const ImageF a = RandomImage(1, 16, 16, 0.2, 0.8);
  EXPECT_EQ(Mse(a, a), 0.0);
  EXPECT_NEAR(Mse(a, Shifted(a, 0.1)), 0.01, 1e-12);
  const ImageF b = RandomImage(2, 16, 16);
  EXPECT_EQ(Mse(a, b), Mse(b, a));
}

TEST(PsnrTest, Basics) {
  const ImageF a = RandomImage(1, 16, 16, 0.2, 0.8);
  EXPECT_NEAR(Psnr(a, Shifted(a, 0.1)), 20.0, 1e-9);
  EXPECT_EQ(Psnr(a, a), kPsnrIdentical);
  EXPECT_TRUE(std::isinf(Psnr(a, a)));
  const double p1 = Psnr(a, Shifted(a, 0.1));
  const double p2 = Psnr(a, Shifted(a, 0.05));
  EXPECT_NEAR(p2 - p1, 20.0 * std::log10(2.0), 1e-9);
}

TEST(SsimTest, IdenticalIsOne) {
  const ImageF a = RandomImage(3, 32, 32);
  EXPECT_EQ(Ssim(a, a), 1.0);
}

TEST(SsimTest, InvertedContrastIsNegative) {
  ImageF a(32, 32);
  RngStream rng(4);
  for (double& v : a.data()) v = 0.5 + 0.3 * (rng.Uniform() - 0.5);
  ImageF inv = a;
  for (double& v : inv.data()) v = 1.0 - v;
  EXPECT_LT(Ssim(a, inv), 0.0);
}

TEST(SsimTest, SymmetricAndMatchesReference) {
  const ImageF a = RandomImage(5, 24, 20);
  const ImageF b = GaussianBlur(a, 1.0);
  EXPECT_NEAR(Ssim(a, b), Ssim(b, a), 1e-12);
  EXPECT_NEAR(Ssim(a, b), ReferenceSsim(a, b), 1e-9);
}

TEST(SsimTest, SizeMismatchRejected) {
  try {
    Ssim(ImageF(16, 16), ImageF(16, 17));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(MssimTest, AllTrueEqualsSsim) {
  const ImageF a = RandomImage(6, 20, 20);
  const ImageF b = RandomImage(7, 20, 20);
  EXPECT_EQ(Mssim(a, b, BinaryMask(20, 20, true)), Ssim(a, b));
}

TEST(MssimTest, AgreementOnMaskGivesOne) {
  const ImageF a = RandomImage(8, 24, 24);
  BinaryMask m(24, 24);
  for (int y = 4; y < 18; ++y) {
    for (int x = 6; x < 20; ++x) m.set(x, y, true);
  }
  EXPECT_EQ(Mssim(a, a, m), 1.0);
  const ImageF b = Composite(a, RandomImage(9, 24, 24), m);
  EXPECT_NEAR(Mssim(a, b, m), 1.0, 1e-12);
}

TEST(MssimTest, EmptyMaskRejected) {
  const ImageF a = RandomImage(8, 16, 16);
  try {
    Mssim(a, a, BinaryMask(16, 16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMask);
  }
}

TEST(QualityTest, MssimPresentOnlyWithMask) {
  const ImageF a = RandomImage(10, 16, 16);
  const ImageF b = RandomImage(11, 16, 16);
  EXPECT_FALSE(Quality(a, b).mssim.has_value());
  const BinaryMask m(16, 16, true);
  const QualityReport q = Quality(a, b, &m);
  ASSERT_TRUE(q.mssim.has_value());
  EXPECT_EQ(*q.mssim, q.ssim);
}

TEST(SummarizeTest, Basics) {
  const std::vector<double> one = {0.5};
  const Aggregate a = Summarize(one);
  EXPECT_EQ(a.mean, 0.5);
  EXPECT_EQ(a.std, 0.0);
  EXPECT_EQ(a.ci95_halfwidth, 0.0);
  const std::vector<double> two = {0.0, 1.0};
  const Aggregate b = Summarize(two);
  EXPECT_EQ(b.mean, 0.5);
  EXPECT_NEAR(b.std, std::numbers::sqrt2 / 2.0, 1e-12);
  EXPECT_EQ(b.median, 0.5);
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> many(1000);
  for (double& v : many) v = u(gen);
  EXPECT_NEAR(Summarize(many).mean, 0.5, 0.05);
}

}  // namespace
}  // namespace wmlab
