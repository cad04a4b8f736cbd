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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wmlab/attacks.hpp"
#include "wmlab/codecs.hpp"
#include "wmlab/harness.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/scenegen.hpp"
#include "wmlab/transforms.hpp"
#include "wmlab/wmlab.h"

namespace {

using namespace wmlab;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void Run(const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_budget = secs <= budget_s;
  const bool pass = o.pass && in_budget;
  if (!pass) ++g_failures;
  std::printf("%s %-28s %s (%.1fs of %.0fs budget%s)\n", pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.c_str(), secs, budget_s, in_budget ? "" : ", over budget");
  std::fflush(stdout);
}

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

GrayF RandomPlane(std::mt19937_64& gen, int w, int h) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GrayF p(w, h);
  for (double& v : p.data()) v = u(gen);
  return p;
}

double Rms(const GrayF& a, const GrayF& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

ImageF RandomImage(std::mt19937_64& gen, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageF img(w, h);
  for (double& v : img.data()) v = u(gen);
  return img;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

RngStream AttackRng(std::uint64_t seed, std::string_view label) {
  return RngStream(DeriveSeed(seed, {"acceptance", label}));
}

constexpr std::uint64_t kKeySeed = 1;
constexpr int kSize = 256;

Outcome TransformRoundTrips() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> dim(8, 64);
  double worst_dct = 0, worst_dwt = 0, worst_fft = 0;
  for (int i = 0; i < 50; ++i) {
    const GrayF p = RandomPlane(gen, dim(gen), dim(gen));
    worst_dct = std::max(worst_dct, Rms(Idct2(Dct2(p)), p));
    worst_dwt = std::max(worst_dwt, Rms(HaarIdwt2(HaarDwt2(p)), p));
    worst_fft = std::max(worst_fft, Rms(Ifft2(Fft2(p)), p));
  }
  const double worst = std::max({worst_dct, worst_dwt, worst_fft});
  char buf[160];
  std::snprintf(buf, sizeof buf, "max RMS dct=%.2e dwt=%.2e fft=%.2e (limit 1e-6)", worst_dct,
                worst_dwt, worst_fft);
  return {worst < 1e-6, buf};
}

Outcome CodecRoundTrips() {
  const WatermarkKey ring = MakeKey(CodecKind::kRing, kKeySeed);
  std::vector<WatermarkKey> bit_keys = {
      MakeKey(CodecKind::kDwtDct, kKeySeed),
      MakeKey(CodecKind::kSpread, kKeySeed, {{"size", std::to_string(kSize)}}),
      MakeKey(CodecKind::kLatentBit, kKeySeed)};
  int imperfect = 0, ring_hits = 0;
  for (int s = 0; s < 50; ++s) {
    const Scene scene = GenerateScene(static_cast<std::uint64_t>(s), kSize);
    RngStream rng(DeriveSeed(s, {"acceptance", "message"}));
    const BitMessage msg = BitMessage::Random(rng);
    for (const auto& key : bit_keys) {
      const ImageF marked = Embed(key, scene.image, msg, DeriveSeed(s, {"noise"}));
      const auto d = std::get<BitOutcome>(Detect(key, marked, msg));
      if (d.extracted.CountMatches(msg) != 32) ++imperfect;
    }
    const ImageF marked = Embed(ring, scene.image, msg, DeriveSeed(s, {"noise"}));
    ring_hits += RingDetect(marked, std::get<RingKey>(ring)).p_value < 1e-4;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "imperfect bit extractions=%d/150, ring p<1e-4 on %d/50",
                imperfect, ring_hits);
  return {imperfect == 0 && ring_hits >= 48, buf};
}

Outcome NullCalibration() {
  BenchConfig cfg;
  cfg.base_seed = 100000;
  cfg.image_size = kSize;
  const CalibrationRecord rec = CalibrateNull(cfg, 500);
  bool ok = rec.mean_p >= 0.45 && rec.mean_p <= 0.55 && rec.frac_below_005 >= 0.02 &&
            rec.frac_below_005 <= 0.09;
  std::string detail = Fmt("ring mean p=%.3f", rec.mean_p) +
                       Fmt(" frac<0.05=%.3f", rec.frac_below_005);
  for (const auto& [kind, acc] : rec.bit_null_accuracy) {
    ok = ok && acc >= 0.44 && acc <= 0.56;
    detail += " " + std::string(CodecName(kind)) + Fmt("=%.3f", acc);
  }
  return {ok && rec.bit_null_accuracy.size() == 3, detail};
}

Outcome Ncx2Oracle() {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n(0.0, 1.0);
  const int dof = 4;
  const double lambda = 3.0;
  const double shift = std::sqrt(lambda / dof);
  std::vector<double> draws(100000);
  for (double& d : draws) {
    d = 0.0;
    for (int k = 0; k < dof; ++k) {
      const double z = n(gen) + shift;
      d += z * z;
    }
  }
  std::sort(draws.begin(), draws.end());
  double worst = 0.0;
  for (double x : {2.0, 5.0, 8.0, 12.0, 20.0}) {
    const double emp =
        static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) /
        draws.size();
    worst = std::max(worst, std::abs(emp - Ncx2Cdf(x, dof, lambda)));
  }
  return {worst <= 0.01, Fmt("max |cdf - empirical| = %.4f (limit 0.01)", worst)};
}

Outcome MssimIdentities() {
  std::mt19937_64 gen(5);
  int exact = 0, agree = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ImageF a = RandomImage(gen, 48, 40);
    const ImageF b = RandomImage(gen, 48, 40);
    exact += Mssim(a, b, BinaryMask(48, 40, true)) == Ssim(a, b);
  }
  for (int i = 0; i < 20; ++i) {
    const Scene scene = GenerateScene(500 + i, 64);
    ImageF other = RandomImage(gen, 64, 64);
    // Agree on the mask, arbitrary outside it.
    const ImageF b = Composite(scene.image, other, scene.gt_mask);
    const double m = Mssim(scene.image, b, scene.gt_mask);
    worst = std::max(worst, std::abs(m - 1.0));
    agree += std::abs(m - 1.0) <= 1e-6;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "all-true equal %d/20, agreeing-on-mask %d/20 (max dev %.1e)",
                exact, agree, worst);
  return {exact == 20 && agree == 20, buf};
}

Outcome SemanticPreservation() {
  int ok = 0;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Scene scene = GenerateScene(s, kSize);
    RngStream rng = AttackRng(s, "preserve");
    AttackContext ctx;
    ctx.descriptor = scene.descriptor;
    const AttackResult r = RunAttack(SemanticAttack{}, scene.image, rng, ctx);
    const double m = Mssim(scene.image, r.image, r.preserved_mask);
    worst = std::max(worst, std::abs(m - 1.0));
    ok += std::abs(m - 1.0) <= 1e-6;
  }
  return {ok == 20, Fmt("%.0f/20 scenes at mssim 1", ok) + Fmt(" (max dev %.1e)", worst)};
}

struct OrderingData {
  std::vector<double> none, blur, rinse, semantic;
  std::vector<double> dwtdct_semantic;
};

const OrderingData& Ordering() {
  static const OrderingData data = [] {
    OrderingData d;
    const WatermarkKey ring = MakeKey(CodecKind::kRing, kKeySeed);
    const WatermarkKey dwt = MakeKey(CodecKind::kDwtDct, kKeySeed);
    const auto& rk = std::get<RingKey>(ring);
    for (int s = 0; s < 50; ++s) {
      const Scene scene = GenerateScene(s, kSize);
      AttackContext ctx;
      ctx.descriptor = scene.descriptor;
      const ImageF marked = Embed(ring, scene.image, BitMessage(), DeriveSeed(s, {"noise"}));
      d.none.push_back(RingDetect(marked, rk).p_value);
      RngStream r1 = AttackRng(s, "blur");
      d.blur.push_back(RingDetect(RunAttack(BlurAttack{1.0}, marked, r1).image, rk).p_value);
      RngStream r2 = AttackRng(s, "rinse");
      d.rinse.push_back(
          RingDetect(RunAttack(RinseAttack{.cycles = 4, .steps = 3}, marked, r2).image, rk).p_value);
      RngStream r3 = AttackRng(s, "semantic");
      d.semantic.push_back(
          RingDetect(RunAttack(SemanticAttack{}, marked, r3, ctx).image, rk).p_value);

      RngStream mrng(DeriveSeed(s, {"acceptance", "message"}));
      const BitMessage msg = BitMessage::Random(mrng);
      const ImageF bits = Embed(dwt, scene.image, msg, 0);
      RngStream r4 = AttackRng(s, "semantic-bits");
      const ImageF attacked = RunAttack(SemanticAttack{}, bits, r4, ctx).image;
      d.dwtdct_semantic.push_back(std::get<BitOutcome>(Detect(dwt, attacked, msg)).bit_accuracy);
    }
    return d;
  }();
  return data;
}

Outcome PValueOrdering() {
  const OrderingData& d = Ordering();
  const double sem = Mean(d.semantic), rin = Mean(d.rinse), blur = Mean(d.blur),
               none = Mean(d.none);
  char buf[200];
  std::snprintf(buf, sizeof buf, "mean p semantic=%.3g rinse=%.3g blur=%.3g none=%.3g", sem,
                rin, blur, none);
  return {sem > rin && rin > blur && blur > none && sem > 0.05, buf};
}

Outcome BitRemoval() {
  const double acc = Mean(Ordering().dwtdct_semantic);
  return {acc < 0.75, Fmt("dwtdct mean bit accuracy after semantic = %.3f (limit < 0.75)", acc)};
}

Outcome RinseMonotone() {
  const WatermarkKey dwt = MakeKey(CodecKind::kDwtDct, kKeySeed);
  std::vector<double> means;
  for (int steps = 1; steps <= 3; ++steps) {
    std::vector<double> acc;
    for (int s = 0; s < 20; ++s) {
      const Scene scene = GenerateScene(s, kSize);
      RngStream mrng(DeriveSeed(s, {"acceptance", "message"}));
      const BitMessage msg = BitMessage::Random(mrng);
      const ImageF marked = Embed(dwt, scene.image, msg, 0);
      RngStream r = AttackRng(s, "rinse-ladder");
      const ImageF out = RunAttack(RinseAttack{.cycles = 4, .steps = steps}, marked, r).image;
      acc.push_back(std::get<BitOutcome>(Detect(dwt, out, msg)).bit_accuracy);
    }
    means.push_back(Mean(acc));
  }
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i) inversions += means[i] > means[i - 1];
  char buf[160];
  std::snprintf(buf, sizeof buf, "dwtdct accuracy steps1..3 = %.3f %.3f %.3f, inversions=%d",
                means[0], means[1], means[2], inversions);
  return {inversions <= 1, buf};
}

Outcome BenchDeterminism() {
  const auto dir = std::filesystem::temp_directory_path() / "wmlab_acceptance_bench";
  std::filesystem::create_directories(dir);
  const auto cfg_path = dir / "bench.cfg";
  {
    std::ofstream f(cfg_path);
    f << "wmlab-config 1\n"
         "image_size = 128\n"
         "seed_count = 10\n"
         "base_seed = 7\n"
         "watermarks = dwtdct,spread,ring,latentbit\n"
         "attack.0 = identity\n"
         "attack.1 = blur:sigma=1\n"
         "attack.2 = jpeg:quality=50\n"
         "attack.3 = rinse:cycles=2,steps=2\n"
         "attack.4 = semregen:tau=0.5\n"
      << "output_dir = " << (dir / "out").string() << "\n";
  }
  std::string reports[2];
  const int workers[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    wm_report* rep = nullptr;
    if (wm_bench_run_file(cfg_path.c_str(), workers[i], &rep) != WM_OK) {
      return {false, std::string("bench failed: ") + wm_last_error()};
    }
    char* json = nullptr;
    const wm_status st = wm_report_json(rep, 0, &json);
    wm_report_free(rep);
    if (st != WM_OK) return {false, std::string("report failed: ") + wm_last_error()};
    reports[i] = json;
    wm_string_free(json);
  }
  const bool same = reports[0] == reports[1];
  return {same, std::string("1 vs 4 workers structured reports ") +
                    (same ? "identical" : "differ") + Fmt(" (%.0f bytes)", reports[0].size())};
}

Outcome SegmentationQuality() {
  int good = 0;
  for (int s = 0; s < 50; ++s) {
    const Scene scene = GenerateScene(s, kSize);
    const auto cands = BuiltinSegment(scene.image);
    if (cands.empty()) continue;
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < scene.gt_mask.size(); ++i) {
      inter += cands[0][i] && scene.gt_mask[i];
      uni += cands[0][i] || scene.gt_mask[i];
    }
    good += uni > 0 && static_cast<double>(inter) / uni >= 0.5;
  }
  return {good >= 40, Fmt("top-1 IoU >= 0.5 on %.0f/50 seeds (need 40)", good)};
}

}  // namespace

int main() {
  std::printf("wmlab acceptance suite (%s)\n", wm_version());
  Run("transform-round-trips", 10, TransformRoundTrips);
  Run("codec-round-trips", 120, CodecRoundTrips);
  Run("null-calibration", 300, NullCalibration);
  Run("ncx2-oracle", 30, Ncx2Oracle);
  Run("mssim-identities", 60, MssimIdentities);
  Run("semantic-preservation", 120, SemanticPreservation);
  Run("ring-pvalue-ordering", 600, PValueOrdering);
  Run("dwtdct-semantic-removal", 600, BitRemoval);
  Run("rinse-monotonicity", 300, RinseMonotone);
  Run("bench-determinism", 300, BenchDeterminism);
  Run("segmentation-quality", 120, SegmentationQuality);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
