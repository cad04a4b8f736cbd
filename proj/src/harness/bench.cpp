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
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wmlab/error.hpp"
#include "wmlab/harness.hpp"
#include "wmlab/scenegen.hpp"

namespace wmlab {
namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// independent, so scheduling never changes the results.
template <typename F>
void ParallelFor(int n, int workers, F&& fn) {
  const int threads = std::max(1, std::min(workers, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (int i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double DetectionScore(const DetectionOutcome& d) {
  if (const auto* p = std::get_if<PValueOutcome>(&d)) return p->p_value;
  return std::get<BitOutcome>(d).bit_accuracy;
}

}  // namespace

std::size_t BenchReport::FailedCount() const {
  std::size_t n = 0;
  for (const BenchCell& c : cells) n += c.agg.failed;
  return n;
}

bool IsRemoved(const CellAggregates& agg) {
  if (agg.count == 0) return false;
  if (agg.ave_p) return *agg.ave_p > kPValueRemoved;
  if (agg.ave_bitacc) return *agg.ave_bitacc < kBitAccRemoved;
  return false;
}

CellAggregates ComputeAggregates(const std::vector<SeedRecord>& records) {
  CellAggregates agg;
  std::vector<double> scores, mssim, mssim_pres, ssim, psnr, mse, mmse, mpsnr;
  bool pvalue = false;
  for (const SeedRecord& r : records) {
    if (r.failed) {
      ++agg.failed;
      continue;
    }
    ++agg.count;
    pvalue = std::holds_alternative<PValueOutcome>(r.detection);
    scores.push_back(DetectionScore(r.detection));
    mssim.push_back(r.quality.mssim.value_or(0.0));
    if (r.mssim_preserved) mssim_pres.push_back(*r.mssim_preserved);
    ssim.push_back(r.quality.ssim);
    psnr.push_back(r.quality.psnr);
    mse.push_back(r.quality.mse);
    mmse.push_back(r.masked_mse);
    mpsnr.push_back(r.masked_psnr);
  }
  if (agg.count == 0) return agg;
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  if (pvalue) {
    agg.ave_p = mean(scores);
    agg.median_p = Summarize(scores).median;
  } else {
    agg.ave_bitacc = mean(scores);
  }
  agg.ave_mssim = mean(mssim);
  if (!mssim_pres.empty()) agg.ave_mssim_preserved = mean(mssim_pres);
  agg.ave_ssim = mean(ssim);
  agg.ave_psnr = mean(psnr);
  agg.ave_mse = mean(mse);
  agg.ave_masked_mse = mean(mmse);
  agg.ave_masked_psnr = mean(mpsnr);
  agg.removed = IsRemoved(agg);
  return agg;
}

BenchReport RunBench(const BenchConfig& cfg) {
  ValidateConfig(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t nw = cfg.watermarks.size();
  const std::size_t na = cfg.attacks.size();
  std::vector<WatermarkKey> keys;
  for (CodecKind k : cfg.watermarks) keys.push_back(BenchKey(cfg, k));
  std::vector<std::string> attack_ids;
  for (const AttackSpec& a : cfg.attacks) attack_ids.push_back(AttackSpecToString(a));

  // grid[w][a][seed]
  std::vector<std::vector<std::vector<SeedRecord>>> grid(
      nw, std::vector<std::vector<SeedRecord>>(na, std::vector<SeedRecord>(cfg.seed_count)));

  ParallelFor(cfg.seed_count, cfg.workers, [&](int s) {
    const std::uint64_t scene_seed = cfg.base_seed + static_cast<std::uint64_t>(s);
    const std::uint64_t seed_root = DeriveSeed(cfg.base_seed, scene_seed);
    auto fail_all = [&](std::size_t w_from, std::size_t w_to, const std::string& msg) {
      for (std::size_t w = w_from; w < w_to; ++w) {
        for (std::size_t a = 0; a < na; ++a) {
          SeedRecord& r = grid[w][a][s];
          r.seed_index = s;
          r.scene_seed = scene_seed;
          r.failed = true;
          r.error = msg;
        }
      }
    };
    Scene scene;
    try {
      scene = GenerateScene(scene_seed, cfg.image_size);
    } catch (const Error& e) {
      fail_all(0, nw, e.what());
      return;
    }
    AttackContext ctx;
    ctx.descriptor = scene.descriptor;
    ctx.stage_timeout = cfg.stage_timeout;
    for (std::size_t w = 0; w < nw; ++w) {
      const std::string_view wname = CodecName(cfg.watermarks[w]);
      RngStream msg_rng(DeriveSeed(seed_root, {wname, "message"}));
      const BitMessage msg = BitMessage::Random(msg_rng);
      ImageF marked;
      try {
        marked = Embed(keys[w], scene.image, msg, DeriveSeed(seed_root, {wname, "carrier"}));
      } catch (const Error& e) {
        fail_all(w, w + 1, e.what());
        continue;
      }
      for (std::size_t a = 0; a < na; ++a) {
        SeedRecord& r = grid[w][a][s];
        r.seed_index = s;
        r.scene_seed = scene_seed;
        try {
          RngStream rng(DeriveSeed(seed_root, {wname, attack_ids[a]}));
          AttackResult res = RunAttack(cfg.attacks[a], marked, rng, ctx);
          r.detection = Detect(keys[w], res.image, msg);
          r.quality = Quality(marked, res.image, &scene.gt_mask);
          r.masked_mse = Mse(ApplyMask(marked, scene.gt_mask),
                             ApplyMask(res.image, scene.gt_mask));
          r.masked_psnr = PsnrFromMse(r.masked_mse);
          if (std::holds_alternative<SemanticAttack>(cfg.attacks[a])) {
            r.preserved_coverage = MaskCoverage(res.preserved_mask);
            if (res.preserved_mask.CountTrue() > 0) {
              r.mssim_preserved = Mssim(marked, res.image, res.preserved_mask);
            }
          }
          r.stage_log = std::move(res.stage_log);
        } catch (const Error& e) {
          r.failed = true;
          r.error = e.what();
        }
      }
    }
  });

  BenchReport report;
  report.config = cfg;
  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t a = 0; a < na; ++a) {
      BenchCell cell;
      cell.watermark = cfg.watermarks[w];
      cell.attack_id = attack_ids[a];
      cell.records = std::move(grid[w][a]);
      cell.agg = ComputeAggregates(cell.records);
      report.cells.push_back(std::move(cell));
    }
  }
  // Canonical order: watermark id, then attack position in the config.
  std::stable_sort(report.cells.begin(), report.cells.end(),
                   [](const BenchCell& x, const BenchCell& y) {
                     return CodecName(x.watermark) < CodecName(y.watermark);
                   });
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  report.wall_seconds = dt.count();
  return report;
}

CalibrationRecord CalibrateNull(const BenchConfig& cfg, int trials) {
  if (trials < 100) {
    throw Error(ErrorCode::kConfigError, "calibration needs at least 100 trials");
  }
  {
    // Calibration runs no attacks, so an empty attack list is fine here.
    BenchConfig check = cfg;
    if (check.attacks.empty()) check.attacks = {IdentityAttack{}};
    ValidateConfig(check);
  }
  if ((cfg.image_size & (cfg.image_size - 1)) != 0) {
    throw Error(ErrorCode::kConfigError, "calibration needs a power-of-two image_size");
  }
  const WatermarkKey ring = BenchKey(cfg, CodecKind::kRing);
  std::vector<std::pair<CodecKind, WatermarkKey>> bit_keys;
  for (CodecKind k : cfg.watermarks) {
    if (IsBitCodec(k)) bit_keys.emplace_back(k, BenchKey(cfg, k));
  }
  CalibrationRecord rec;
  rec.trials = trials;
  rec.p_values.assign(trials, 0.0);
  std::vector<std::vector<double>> acc(bit_keys.size(), std::vector<double>(trials));
  ParallelFor(trials, cfg.workers, [&](int t) {
    const std::uint64_t scene_seed = cfg.base_seed + static_cast<std::uint64_t>(t);
    const Scene scene = GenerateScene(scene_seed, cfg.image_size);
    rec.p_values[t] = RingDetect(scene.image, std::get<RingKey>(ring)).p_value;
    RngStream rng(DeriveSeed(DeriveSeed(cfg.base_seed, scene_seed), {"null-message"}));
    const BitMessage truth = BitMessage::Random(rng);
    for (std::size_t k = 0; k < bit_keys.size(); ++k) {
      const DetectionOutcome d = Detect(bit_keys[k].second, scene.image, truth);
      acc[k][t] = std::get<BitOutcome>(d).bit_accuracy;
    }
  });
  double sum = 0.0;
  int below = 0;
  for (double p : rec.p_values) {
    sum += p;
    below += p < 0.05;
    rec.histogram[std::min(19, static_cast<int>(p * 20.0))] += 1;
  }
  rec.mean_p = sum / trials;
  rec.frac_below_005 = static_cast<double>(below) / trials;
  rec.warning = rec.mean_p < 0.45 || rec.mean_p > 0.55 || rec.frac_below_005 < 0.02 ||
                rec.frac_below_005 > 0.09;
  for (std::size_t k = 0; k < bit_keys.size(); ++k) {
    rec.bit_null_accuracy[bit_keys[k].first] = Summarize(acc[k]).mean;
  }
  return rec;
}

}  // namespace wmlab
