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
#include <functional>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "wmlab/attacks.hpp"
#include "wmlab/codecs.hpp"
#include "wmlab/error.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/scenegen.hpp"

namespace wmlab {
namespace {

using testing::MaxAbsDiff;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wmlab::Error thrown";
  return ErrorCode::kIoError;
}

BinaryMask Rect(int w, int h, int x0, int y0, int x1, int y1) {
  BinaryMask m(w, h);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) m.set(x, y, true);
  }
  return m;
}

double Iou(const BinaryMask& a, const BinaryMask& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni ? static_cast<double>(inter) / uni : 0.0;
}

TEST(SpecTest, ParseAndCanonicalForm) {
  for (const char* text :
       {"identity", "blur:sigma=1.5", "jpeg:quality=30", "resize:factor=0.25",
        "noise:sigma=0.01", "regen:strength=0.02,steps=2",
        "rinse:cycles=4,strength=0.005,steps=3", "semregen:tau=0.4,tau_max=0.9"}) {
    const AttackSpec spec = ParseAttackSpec(text);
    EXPECT_EQ(AttackSpecToString(ParseAttackSpec(AttackSpecToString(spec))),
              AttackSpecToString(spec))
        << text;
  }
  const auto sem = std::get<SemanticAttack>(
      ParseAttackSpec("semregen:tau=0.5,backend=exec:python3 adapter.py --mode=a,b"));
  EXPECT_EQ(sem.external_command, "python3 adapter.py --mode=a,b");
  EXPECT_EQ(std::get<BlurAttack>(ParseAttackSpec("blur:sigma=1.0")).sigma, 1.0);
}

TEST(SpecTest, Rejections) {
  for (const char* text : {"", "sharpen", "blur:sigma=-1", "jpeg:quality=0", "jpeg:quality=x",
                           "blur:radius=2", "semregen:tau=0.9,tau_max=0.5", "rinse:cycles=0"}) {
    EXPECT_EQ(CodeOf([&] { ParseAttackSpec(text); }), ErrorCode::kInvalidParameter) << text;
  }
}

TEST(DistortionTest, ZeroNoiseAndUnitResizeAreIdentity) {
  const ImageF img = testing::RandomImage(1, 32, 32);
  RngStream rng(1);
  EXPECT_EQ(ApplyDistortion(img, NoiseAttack{0.0}, rng), img);
  EXPECT_LE(MaxAbsDiff(ApplyDistortion(img, ResizeAttack{1.0}, rng).data(), img.data()), 1e-6);
}

TEST(DistortionTest, BlurRaisesRingPValue) {
  const WatermarkKey key = MakeKey(CodecKind::kRing, 2);
  const auto& rk = std::get<RingKey>(key);
  double clean = 0.0, blurred = 0.0;
  for (int s = 0; s < 20; ++s) {
    const ImageF marked = Embed(key, GenerateScene(s, 256).image, BitMessage(), s);
    RngStream rng(s);
    clean += RingDetect(marked, rk).p_value;
    blurred += RingDetect(ApplyDistortion(marked, BlurAttack{1.0}, rng), rk).p_value;
  }
  EXPECT_GT(blurred / 20, clean / 20);
}

TEST(RegenTest, ZeroStrengthIsIdentity) {
  const ImageF img = testing::RandomImage(2, 40, 24, 0.1, 0.9);
  RngStream rng(3);
  EXPECT_LE(MaxAbsDiff(RegenProxy(img, 0.0, 3, rng).data(), img.data()), 1e-6);
}

TEST(RegenTest, StrongRegenHurtsSpreadAndStaysInRange) {
  const WatermarkKey key = MakeKey(CodecKind::kSpread, 2, {{"size", "128"}});
  double acc = 0.0;
  for (int s = 0; s < 20; ++s) {
    RngStream mrng(s);
    const BitMessage msg = BitMessage::Random(mrng);
    const ImageF marked = Embed(key, GenerateScene(s, 128).image, msg, 0);
    RngStream rng(100 + s);
    const ImageF out = RegenProxy(marked, 0.1, 10, rng);
    for (double v : out.data()) {
      ASSERT_GE(v, -0.1);
      ASSERT_LE(v, 1.1);
    }
    acc += std::get<BitOutcome>(Detect(key, out, msg)).bit_accuracy;
  }
  EXPECT_LT(acc / 20, 1.0);
}

TEST(RinseTest, OneCycleIsRegenAndDeterministic) {
  const ImageF img = GenerateScene(4, 64).image;
  RngStream a(7), b(7), c(7);
  const ImageF r1 = Rinse(img, 1, 0.02, 2, a);
  EXPECT_EQ(r1, RegenProxy(img, 0.02, 2, b));
  EXPECT_EQ(Rinse(img, 1, 0.02, 2, c), r1);
}

TEST(AccumulateTest, SingleCandidate) {
  const BinaryMask m = Rect(10, 10, 0, 0, 10, 3);  // coverage 0.3
  const AccumulatedMask acc = AccumulateMasks({m}, 0.5, 0.85);
  EXPECT_EQ(acc.foreground, m);
  EXPECT_FALSE(acc.fallback_used);
}

TEST(AccumulateTest, StopsBeforeExceedingTau) {
  const BinaryMask a = Rect(10, 10, 0, 0, 10, 3);
  const BinaryMask b = Rect(10, 10, 0, 5, 10, 8);
  const AccumulatedMask acc = AccumulateMasks({a, b}, 0.5, 0.85);
  EXPECT_EQ(acc.foreground, a);
  EXPECT_FALSE(acc.fallback_used);
}

TEST(AccumulateTest, OversizedFirstCandidateTriggersFallback) {
  const BinaryMask big = Rect(10, 10, 0, 0, 10, 9);  // coverage 0.9
  const AccumulatedMask acc = AccumulateMasks({big}, 0.5, 0.8);
  EXPECT_EQ(acc.foreground, big);
  EXPECT_TRUE(acc.fallback_used);
}

TEST(AccumulateTest, Errors) {
  EXPECT_EQ(CodeOf([] { AccumulateMasks({}, 0.5, 0.85); }), ErrorCode::kEmptyCandidates);
  EXPECT_EQ(CodeOf([] { AccumulateMasks({BinaryMask(4, 4, true)}, 0.9, 0.5); }),
            ErrorCode::kInvalidParameter);
}

TEST(SegmentTest, ConstantImageHasNoCandidates) {
  EXPECT_TRUE(BuiltinSegment(ImageF(64, 64, 0.4)).empty());
}

TEST(SegmentTest, DeterministicAndAccurate) {
  int good = 0;
  for (int s = 0; s < 10; ++s) {
    const Scene scene = GenerateScene(s, 128);
    const auto a = BuiltinSegment(scene.image);
    const auto b = BuiltinSegment(scene.image);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
    if (!a.empty()) good += Iou(a[0], scene.gt_mask) >= 0.5;
  }
  EXPECT_GE(good, 7);
}

TEST(OtsuTest, SplitsTwoClusters) {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) v.push_back(0.1 + 0.001 * i);
  for (int i = 0; i < 50; ++i) v.push_back(0.8 + 0.001 * i);
  const auto t = OtsuThreshold(v);
  ASSERT_TRUE(t.has_value());
  // Threshold is a bin edge, so it may sit up to one bin below the low cluster's top.
  const double bin = (0.849 - 0.1) / 256.0;
  EXPECT_GE(*t, 0.149 - bin);
  EXPECT_LT(*t, 0.8);
  const std::vector<double> flat(10, 0.3);
  EXPECT_FALSE(OtsuThreshold(flat).has_value());
}

TEST(EllipseTest, CoverageNearQuarter) {
  const BinaryMask e = CenteredEllipse(256, 256);
  EXPECT_NEAR(MaskCoverage(e), 0.25, 0.01);
  EXPECT_TRUE(e.at(128, 128));
  EXPECT_FALSE(e.at(0, 0));
}

TEST(InpaintTest, EmptyRegionIsIdentity) {
  const ImageF img = GenerateScene(1, 64).image;
  RngStream rng(1);
  EXPECT_EQ(BuiltinInpaint(img, BinaryMask(64, 64), rng), img);
}

TEST(InpaintTest, ConstantImageStaysConstant) {
  const ImageF img(64, 64, 0.37);
  RngStream rng(2);
  const ImageF out = BuiltinInpaint(img, Rect(64, 64, 10, 10, 40, 50), rng);
  for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-4);
}

TEST(InpaintTest, RemovesMostRingCarrierFromBackground) {
  const WatermarkKey key = MakeKey(CodecKind::kRing, 3);
  for (int s = 0; s < 5; ++s) {
    const Scene scene = GenerateScene(s, 256);
    const ImageF marked = Embed(key, scene.image, BitMessage(), s);
    const BinaryMask region = InvertMask(scene.gt_mask);
    ASSERT_GE(MaskCoverage(region), 0.5);
    RngStream rng(s);
    const ImageF out = BuiltinInpaint(marked, region, rng);
    // Least-squares amplitude of the carrier left inside the region.
    const GrayF y0 = Luminance(scene.image), y1 = Luminance(marked), y2 = Luminance(out);
    double cc = 0.0, rc = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (!region[i]) continue;
      const double c = y1.data()[i] - y0.data()[i];
      cc += c * c;
      rc += (y2.data()[i] - y0.data()[i]) * c;
    }
    const double amplitude = rc / cc;
    EXPECT_LE(amplitude * amplitude, 0.2) << "seed " << s;
  }
}

// Records what the pipeline asks of each stage.
class RecordingBackends : public StageBackends {
 public:
  explicit RecordingBackends(std::vector<BinaryMask> masks) : masks_(std::move(masks)) {}
  std::array<std::string, 3> Caption(const ImageF&) override {
    return {"a red fox", "a snowy forest", "watercolor"};
  }
  std::vector<BinaryMask> Segment(const ImageF&, const std::string& phrase) override {
    phrase_ = phrase;
    return masks_;
  }
  std::string Summarize(const std::string& request,
                        const std::array<std::string, 3>&) override {
    request_ = request;
    return "Snowy forest in watercolor.";
  }
  ImageF Inpaint(const ImageF& img, const BinaryMask& region, const std::string&) override {
    region_ = region;
    return ImageF(img.width(), img.height(), 0.0);
  }
  std::vector<BinaryMask> masks_;
  std::string phrase_, request_;
  BinaryMask region_;
};

TEST(SemanticTest, StagesWiredInOrder) {
  const ImageF img = GenerateScene(2, 64).image;
  const BinaryMask fg = Rect(64, 64, 16, 16, 48, 40);
  RecordingBackends be({fg});
  const AttackResult r = SemanticRegen(img, be, 0.5, 0.85);
  EXPECT_EQ(be.phrase_, "a red fox");
  EXPECT_EQ(be.request_, BuildSummarizeRequest({"a red fox", "a snowy forest", "watercolor"}));
  EXPECT_EQ(be.request_.rfind(kSummarizeInstruction, 0), 0u);
  EXPECT_EQ(r.prompt_used, "Snowy forest in watercolor.");
  EXPECT_EQ(be.region_, InvertMask(fg));
  EXPECT_EQ(r.preserved_mask, fg);
  EXPECT_FALSE(r.fallback_used);
  EXPECT_EQ(r.image, Composite(img, ImageF(64, 64, 0.0), fg));
  ASSERT_EQ(r.stage_log.size(), 4u);
  EXPECT_EQ(r.stage_log[0].stage, "caption");
  EXPECT_EQ(r.stage_log[3].stage, "inpaint");
}

TEST(SemanticTest, OversizedForegroundSwapsRoles) {
  const ImageF img = GenerateScene(2, 64).image;
  const BinaryMask fg = Rect(64, 64, 0, 0, 64, 60);
  RecordingBackends be({fg});
  const AttackResult r = SemanticRegen(img, be, 0.5, 0.85);
  EXPECT_TRUE(r.fallback_used);
  EXPECT_EQ(be.region_, fg);
  EXPECT_EQ(r.preserved_mask, InvertMask(fg));
}

TEST(SemanticTest, EmptySegmentationUsesEllipse) {
  const ImageF img = GenerateScene(2, 64).image;
  RecordingBackends be({});
  const AttackResult r = SemanticRegen(img, be, 0.5, 0.85);
  EXPECT_EQ(r.preserved_mask, CenteredEllipse(64, 64));
}

TEST(SemanticTest, FullFrameRegionRejected) {
  const ImageF img = GenerateScene(2, 64).image;
  RecordingBackends be({BinaryMask(64, 64, true)});
  EXPECT_EQ(CodeOf([&] { SemanticRegen(img, be, 0.5, 0.85); }), ErrorCode::kFullMask);
}

TEST(SemanticTest, BuiltinPreservesForegroundExactly) {
  for (int s = 0; s < 5; ++s) {
    const Scene scene = GenerateScene(s, 128);
    RngStream rng(s);
    AttackContext ctx;
    ctx.descriptor = scene.descriptor;
    const AttackResult r = RunAttack(SemanticAttack{}, scene.image, rng, ctx);
    ASSERT_EQ(r.image.width(), 128);
    ASSERT_EQ(r.image.height(), 128);
    EXPECT_NEAR(Mssim(scene.image, r.image, r.preserved_mask), 1.0, 1e-6);
    for (std::size_t i = 0; i < r.preserved_mask.size(); ++i) {
      if (!r.preserved_mask[i]) continue;
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(r.image.data()[3 * i + c], scene.image.data()[3 * i + c]);
      }
    }
    EXPECT_NE(r.prompt_used.find(scene.descriptor.background_name), std::string::npos);
    // Deterministic in the rng seed.
    RngStream again(s);
    EXPECT_EQ(RunAttack(SemanticAttack{}, scene.image, again, ctx).image, r.image);
  }
}

TEST(Base64Test, KnownVectorsAndErrors) {
  auto enc = [](std::string s) {
    return Base64Encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
  const auto dec = Base64Decode("Zm9vYg==");
  EXPECT_EQ(std::string(dec.begin(), dec.end()), "foob");
  EXPECT_EQ(CodeOf([] { Base64Decode("Zm9"); }), ErrorCode::kInvalidParameter);
  EXPECT_EQ(CodeOf([] { Base64Decode("Zm=v"); }), ErrorCode::kInvalidParameter);
}

}  // namespace
}  // namespace wmlab
