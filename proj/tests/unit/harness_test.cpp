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

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "wmlab/error.hpp"
#include "wmlab/harness.hpp"

namespace wmlab {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wmlab::Error thrown";
  return ErrorCode::kIoError;
}

BenchConfig SmallConfig(const std::string& attacks_text) {
  return ParseConfig(
      "wmlab-config 1\n"
      "# small grid\n"
      "image_size = 128\n"
      "seed_count = 4\n"
      "base_seed = 3\n"
      "watermarks = dwtdct, spread, ring, latentbit\n" +
      attacks_text);
}

SeedRecord PRecord(double p) {
  SeedRecord r;
  r.detection = PValueOutcome{0.0, p, 0.0, 2};
  r.quality.mssim = 1.0;
  return r;
}

SeedRecord BitRecord(double acc) {
  SeedRecord r;
  r.detection = BitOutcome{BitMessage(), acc};
  r.quality.mssim = 1.0;
  return r;
}

// Report with one semantic-attack row holding hand-made aggregates.
BenchReport HandMadeReport(double ring_p, double bit_acc) {
  BenchReport rep;
  rep.config.attacks = {SemanticAttack{}};
  rep.config.watermarks = {CodecKind::kRing, CodecKind::kDwtDct};
  rep.config.seed_count = 1;
  const std::string id = AttackSpecToString(SemanticAttack{});
  BenchCell ring{CodecKind::kRing, id, {PRecord(ring_p)}, {}};
  BenchCell bits{CodecKind::kDwtDct, id, {BitRecord(bit_acc)}, {}};
  for (BenchCell* c : {&ring, &bits}) c->agg = ComputeAggregates(c->records);
  rep.cells = {bits, ring};
  return rep;
}

TEST(ConfigTest, ParsesAndRoundTrips) {
  const BenchConfig cfg = SmallConfig(
      "attack.0 = blur:sigma=1\n"
      "attack.1 = rinse:cycles=4,strength=0.005,steps=2\n"
      "codec.dwtdct.delta = 0.05\n"
      "workers = 3\n");
  EXPECT_EQ(cfg.image_size, 128);
  EXPECT_EQ(cfg.seed_count, 4);
  EXPECT_EQ(cfg.workers, 3);
  ASSERT_EQ(cfg.attacks.size(), 2u);
  EXPECT_EQ(cfg.codec_params.at(CodecKind::kDwtDct).at("delta"), "0.05");
  const BenchConfig back = ParseConfig(ConfigToText(cfg));
  EXPECT_EQ(ConfigToText(back), ConfigToText(cfg));
}

TEST(ConfigTest, DefaultsFillAttacks) {
  const BenchConfig cfg = ParseConfig("wmlab-config 1\n");
  EXPECT_EQ(cfg.image_size, 256);
  EXPECT_EQ(cfg.seed_count, 100);
  EXPECT_EQ(cfg.attacks.size(), DefaultAttacks().size());
}

TEST(ConfigTest, Rejections) {
  for (const char* text :
       {"", "wmlab-config 2\n", "wmlab-config 1\nimage_size = big\n",
        "wmlab-config 1\nseed_count = 0\n", "wmlab-config 1\nfrobnicate = 1\n",
        "wmlab-config 1\nwatermarks = ring\nimage_size = 100\n",
        "wmlab-config 1\nattack.0 = sharpen\n", "wmlab-config 1\ncodec.ring.bogus = 1\n",
        "wmlab-config 1\nwatermarks = stegastamp\n"}) {
    EXPECT_EQ(CodeOf([&] { ParseConfig(text); }), ErrorCode::kConfigError) << text;
  }
  // Non-power-of-two sizes are fine for codecs without a Fourier carrier.
  EXPECT_NO_THROW(ParseConfig("wmlab-config 1\nwatermarks = dwtdct\nimage_size = 100\n"));
}

TEST(BenchTest, IdentityGridIsPerfect) {
  const BenchReport rep = RunBench(SmallConfig("attack.0 = identity\n"));
  ASSERT_EQ(rep.cells.size(), 4u);
  for (const BenchCell& c : rep.cells) {
    ASSERT_EQ(c.records.size(), 4u);
    EXPECT_EQ(c.agg.failed, 0u);
    if (IsBitCodec(c.watermark)) {
      EXPECT_EQ(*c.agg.ave_bitacc, 1.0) << CodecName(c.watermark);
    } else {
      EXPECT_LT(*c.agg.ave_p, 1e-3);
    }
  }
  EXPECT_EQ(rep.FailedCount(), 0u);
}

TEST(BenchTest, CellsSortedAndAggregatesRecomputable) {
  const BenchReport rep =
      RunBench(SmallConfig("attack.0 = jpeg:quality=50\nattack.1 = semregen:tau=0.5\n"));
  ASSERT_EQ(rep.cells.size(), 8u);
  for (std::size_t i = 1; i < rep.cells.size(); ++i) {
    EXPECT_LE(CodecName(rep.cells[i - 1].watermark), CodecName(rep.cells[i].watermark));
  }
  for (const BenchCell& c : rep.cells) {
    double sum = 0.0;
    for (const SeedRecord& r : c.records) sum += r.quality.ssim;
    EXPECT_NEAR(c.agg.ave_ssim, sum / c.records.size(), 1e-12);
    const bool semantic = c.attack_id.rfind("semregen", 0) == 0;
    EXPECT_EQ(c.agg.ave_mssim_preserved.has_value(), semantic);
    if (semantic) EXPECT_NEAR(*c.agg.ave_mssim_preserved, 1.0, 1e-6);
  }
}

TEST(BenchTest, BackendFailureMarksCellsNotRun) {
  BenchConfig cfg = SmallConfig("attack.0 = identity\n");
  SemanticAttack broken;
  broken.external_command = std::string(WMLAB_STUB_BACKEND) + " --mode malformed";
  cfg.attacks.push_back(broken);
  cfg.watermarks = {CodecKind::kDwtDct};
  const BenchReport rep = RunBench(cfg);
  ASSERT_EQ(rep.cells.size(), 2u);
  EXPECT_EQ(rep.FailedCount(), 4u);
  for (const BenchCell& c : rep.cells) {
    if (c.attack_id == "identity") {
      EXPECT_EQ(c.agg.failed, 0u);
    } else {
      EXPECT_EQ(c.agg.failed, 4u);
      EXPECT_NE(c.records[0].error.find("caption"), std::string::npos);
    }
  }
  EXPECT_NE(ReportToMarkdown(rep).find("failed"), std::string::npos);
}

TEST(BenchTest, WorkerCountDoesNotChangeResults) {
  BenchConfig cfg = SmallConfig("attack.0 = noise:sigma=0.02\nattack.1 = semregen\n");
  cfg.workers = 1;
  const std::string one = ReportToJsonDeterministic(RunBench(cfg)).dump();
  cfg.workers = 3;
  EXPECT_EQ(ReportToJsonDeterministic(RunBench(cfg)).dump(), one);
}

TEST(CalibrationTest, TrialsMinimumAndRecordShape) {
  BenchConfig cfg = SmallConfig("attack.0 = identity\n");
  EXPECT_EQ(CodeOf([&] { CalibrateNull(cfg, 50); }), ErrorCode::kConfigError);
  const CalibrationRecord rec = CalibrateNull(cfg, 100);
  EXPECT_EQ(rec.p_values.size(), 100u);
  int total = 0;
  for (int h : rec.histogram) total += h;
  EXPECT_EQ(total, 100);
  EXPECT_EQ(rec.bit_null_accuracy.size(), 3u);
  const auto j = CalibrationToJson(rec);
  EXPECT_EQ(j.at("trials"), 100);
}

TEST(RemovalTest, ThresholdsFromTheSuccessCriteria) {
  EXPECT_TRUE(HandMadeReport(0.10, 0.70).cells[1].agg.removed);   // p 0.10 > 0.05
  EXPECT_TRUE(HandMadeReport(0.10, 0.70).cells[0].agg.removed);   // 0.70 < 0.75
  EXPECT_FALSE(HandMadeReport(0.05, 0.76).cells[0].agg.removed);  // 0.76 >= 0.75
  EXPECT_FALSE(HandMadeReport(0.05, 0.76).cells[1].agg.removed);  // p == 0.05
  EXPECT_FALSE(HandMadeReport(0.05, 0.75).cells[0].agg.removed);  // exactly 24/32
}

TEST(ReportTest, MarkdownFlagsRemovedCells) {
  const std::string md = ReportToMarkdown(HandMadeReport(0.10, 0.70));
  EXPECT_NE(md.find("0.1 **removed**"), std::string::npos) << md;
  EXPECT_NE(md.find("0.7 **removed**"), std::string::npos) << md;
  const std::string kept = ReportToMarkdown(HandMadeReport(0.01, 0.76));
  EXPECT_EQ(kept.find("**removed**"), std::string::npos) << kept;
  EXPECT_NE(kept.find("0.76"), std::string::npos);
  EXPECT_NE(md.find("## Masked SSIM"), std::string::npos);
  EXPECT_NE(md.find("## Image quality"), std::string::npos);
}

// Minimal RFC-4180 reader for the check below.
std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(field);
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      rows.back().push_back(field);
      field.clear();
      rows.emplace_back();
      ++i;
    } else {
      field += c;
    }
  }
  rows.pop_back();
  return rows;
}

TEST(ReportTest, FormatsAgreeAndJsonRoundTrips) {
  const BenchReport rep = RunBench(SmallConfig(
      "attack.0 = rinse:cycles=2,strength=0.005,steps=2\nattack.1 = blur:sigma=1\n"));
  const auto rows = ParseCsv(ReportToCsv(rep));
  ASSERT_EQ(rows.size(), rep.cells.size() + 1);
  const auto& head = rows[0];
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(head.begin(), head.end(), name) - head.begin());
  };
  const nlohmann::json j = ReportToJson(rep);
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const auto& row = rows[i + 1];
    ASSERT_EQ(row.size(), head.size());
    EXPECT_EQ(row[col("attack")], rep.cells[i].attack_id);
    const auto& agg = j["cells"][i]["aggregates"];
    EXPECT_EQ(std::stod(row[col("ave_mssim")]), agg["ave_mssim"].get<double>());
    EXPECT_EQ(std::stod(row[col("ave_ssim")]), rep.cells[i].agg.ave_ssim);
  }
  EXPECT_NE(ReportToCsv(rep).find("\"rinse:cycles=2,"), std::string::npos);

  const BenchReport back = ReportFromJson(j);
  EXPECT_EQ(ReportToJsonDeterministic(back).dump(), ReportToJsonDeterministic(rep).dump());
  nlohmann::json tampered = j;
  tampered["cells"][0]["aggregates"]["ave_ssim"] =
      tampered["cells"][0]["aggregates"]["ave_ssim"].get<double>() + 1e-9;
  EXPECT_EQ(CodeOf([&] { ReportFromJson(tampered); }), ErrorCode::kMalformedFile);
  EXPECT_TRUE(j.contains("timing"));
  EXPECT_FALSE(ReportToJsonDeterministic(rep).contains("timing"));
}

TEST(ReportTest, SvgHasOneSeriesPerAttack) {
  const BenchReport rep = HandMadeReport(0.10, 0.70);
  const std::string svg = ReportToSvg(rep);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(svg.find(AttackSpecToString(SemanticAttack{})), std::string::npos);
}

TEST(ReportTest, EmitWritesFilesAndReportsIoErrors) {
  const auto dir = testing::TempDir("emit");
  const auto files =
      EmitReport(HandMadeReport(0.1, 0.7), {"csv", "structured", "markdown", "svg"},
                 dir.string());
  EXPECT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(CodeOf([&] {
              EmitReport(HandMadeReport(0.1, 0.7), {"csv"}, (dir / "blocker" / "sub").string());
            }),
            ErrorCode::kIoError);
  EXPECT_EQ(CodeOf([&] { EmitReport(HandMadeReport(0.1, 0.7), {"pdf"}, dir.string()); }),
            ErrorCode::kInvalidParameter);
}

}  // namespace
}  // namespace wmlab
