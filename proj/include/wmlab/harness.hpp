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

#ifndef WMLAB_HARNESS_HPP_
#define WMLAB_HARNESS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmlab/attacks.hpp"
#include "wmlab/codecs.hpp"
#include "wmlab/metrics.hpp"

namespace wmlab {

inline constexpr std::string_view kToolVersion = "wmlab 1.0.0";
inline constexpr double kPValueRemoved = 0.05;
inline constexpr double kBitAccRemoved = 24.0 / 32.0;

struct BenchConfig {
  int image_size = 256;
  int seed_count = 100;
  std::uint64_t base_seed = 0;
  std::uint64_t key_seed = 1;
  std::vector<CodecKind> watermarks = {CodecKind::kDwtDct, CodecKind::kSpread,
                                       CodecKind::kRing, CodecKind::kLatentBit};
  std::vector<AttackSpec> attacks;
  std::map<CodecKind, std::map<std::string, std::string>> codec_params;
  std::string output_dir = "wmlab-out";
  int workers = 1;
  std::chrono::milliseconds stage_timeout = kDefaultStageTimeout;
};

/// Attack list used when a config names none.
std::vector<AttackSpec> DefaultAttacks();

/// Versioned flat text: "wmlab-config 1" then `key = value` lines.
/// Problems raise ConfigError.
BenchConfig ParseConfig(std::string_view text);
BenchConfig LoadConfig(const std::string& path);
std::string ConfigToText(const BenchConfig& config);
void ValidateConfig(const BenchConfig& config);

/// Keys used by the bench for each codec.
WatermarkKey BenchKey(const BenchConfig& config, CodecKind kind);

struct SeedRecord {
  int seed_index = 0;
  std::uint64_t scene_seed = 0;
  bool failed = false;
  std::string error;
  DetectionOutcome detection;
  QualityReport quality;  // mssim over the scene's ground-truth mask
  double masked_mse = 0.0;
  double masked_psnr = 0.0;
  std::optional<double> mssim_preserved;
  double preserved_coverage = 0.0;
  std::vector<StageTiming> stage_log;
};

struct CellAggregates {
  std::size_t count = 0;
  std::size_t failed = 0;
  std::optional<double> ave_p;
  std::optional<double> median_p;
  std::optional<double> ave_bitacc;
  double ave_mssim = 0.0;
  std::optional<double> ave_mssim_preserved;
  double ave_ssim = 0.0;
  double ave_psnr = 0.0;
  double ave_mse = 0.0;
  double ave_masked_mse = 0.0;
  double ave_masked_psnr = 0.0;
  bool removed = false;
};

struct BenchCell {
  CodecKind watermark = CodecKind::kRing;
  std::string attack_id;
  std::vector<SeedRecord> records;
  CellAggregates agg;
};

struct BenchReport {
  BenchConfig config;
  std::string tool_version{kToolVersion};
  std::vector<BenchCell> cells;
  double wall_seconds = 0.0;

  std::size_t FailedCount() const;
};

/// Success criterion: p > 0.05 for p-value cells, bitacc < 24/32 otherwise.
bool IsRemoved(const CellAggregates& agg);
CellAggregates ComputeAggregates(const std::vector<SeedRecord>& records);

/// Runs the whole (seed x watermark x attack) grid. Results do not depend
/// on config.workers.
BenchReport RunBench(const BenchConfig& config);

struct CalibrationRecord {
  int trials = 0;
  std::vector<double> p_values;
  std::array<int, 20> histogram{};
  double mean_p = 0.0;
  double frac_below_005 = 0.0;
  bool warning = false;
  // Mean null accuracy of every bit codec in the config.
  std::map<CodecKind, double> bit_null_accuracy;
};

CalibrationRecord CalibrateNull(const BenchConfig& config, int trials);
nlohmann::json CalibrationToJson(const CalibrationRecord& rec);

/// Full structured report. Wall-clock data sits under "timing" only.
nlohmann::json ReportToJson(const BenchReport& report);
/// Same without the "timing" member; stable across runs and worker counts.
nlohmann::json ReportToJsonDeterministic(const BenchReport& report);
/// Parses a structured report and checks stored aggregates against the
/// records (1e-12); MalformedFile on any disagreement.
BenchReport ReportFromJson(const nlohmann::json& j);

std::string ReportToCsv(const BenchReport& report);
std::string ReportToMarkdown(const BenchReport& report);
std::string ReportToSvg(const BenchReport& report);

/// Writes report.{csv,json,md,svg} for the requested formats ("csv",
/// "structured", "markdown", "svg") into `dir`. IoError on failure.
std::vector<std::string> EmitReport(const BenchReport& report,
                                    const std::vector<std::string>& formats,
                                    const std::string& dir);

}  // namespace wmlab

#endif  // WMLAB_HARNESS_HPP_
