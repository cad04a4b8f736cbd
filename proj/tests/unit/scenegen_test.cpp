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

#include "gtest/gtest.h"
#include "wmlab/error.hpp"
#include "wmlab/scenegen.hpp"

namespace wmlab {
namespace {

TEST(SceneGenTest, SameSeedIsBitIdentical) {
  const Scene a = GenerateScene(42, 128);
  const Scene b = GenerateScene(42, 128);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.gt_mask, b.gt_mask);
  EXPECT_EQ(a.descriptor, b.descriptor);
}

TEST(SceneGenTest, DifferentSeedsDiffer) {
  const Scene a = GenerateScene(1, 256);
  const Scene b = GenerateScene(2, 256);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.image.pixel_count(); ++i) {
    bool diff = false;
    for (int c = 0; c < 3; ++c) {
      diff = diff || std::abs(a.image.data()[3 * i + c] - b.image.data()[3 * i + c]) > 1.0 / 255;
    }
    differing += diff;
  }
  EXPECT_GE(static_cast<double>(differing) / a.image.pixel_count(), 0.10);
}

TEST(SceneGenTest, MaskCoverageWithinBounds) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Scene scene = GenerateScene(s, 256);
    const double cov = MaskCoverage(scene.gt_mask);
    EXPECT_GE(cov, 0.05) << "seed " << s;
    EXPECT_LE(cov, 0.60) << "seed " << s;
  }
}

TEST(SceneGenTest, PixelsInUnitRange) {
  const Scene scene = GenerateScene(9, 64);
  for (double v : scene.image.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(SceneGenTest, TooSmallRejected) {
  try {
    GenerateScene(0, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

TEST(DescribeTest, ReadsDescriptorThrough) {
  Scene scene = GenerateScene(5, 64);
  scene.descriptor = {"fox", "meadow", "watercolor", 5};
  const auto words = DescribeScene(scene);
  EXPECT_EQ(words[0], "fox");
  EXPECT_EQ(words[1], "meadow");
  EXPECT_EQ(words[2], "watercolor");
  // Pixel content does not matter.
  scene.image = ImageF(64, 64, 0.5);
  EXPECT_EQ(DescribeScene(scene), words);
  EXPECT_EQ(DescribeScene(scene), words);
}

TEST(DescribeTest, WordsComeFromTheLists) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SceneDescriptor d = DescribeSeed(s);
    auto in = [](auto list, const std::string& w) {
      for (auto x : list) {
        if (x == w) return true;
      }
      return false;
    };
    EXPECT_TRUE(in(ObjectWords(), d.object_name));
    EXPECT_TRUE(in(BackgroundWords(), d.background_name));
    EXPECT_TRUE(in(StyleWords(), d.style_name));
    EXPECT_EQ(d, GenerateScene(s, 64).descriptor);
  }
}

TEST(NoiseTest, ValueNoiseRangeAndDeterminism) {
  RngStream a(3), b(3);
  const GrayF n1 = ValueNoise(a, 64, 4);
  const GrayF n2 = ValueNoise(b, 64, 4);
  EXPECT_EQ(n1, n2);
  for (double v : n1.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

}  // namespace
}  // namespace wmlab
