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
#include <filesystem>
#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "wmlab/error.hpp"
#include "wmlab/harness.hpp"
#include "wmlab/io.hpp"

namespace wmlab {
namespace {

using json = nlohmann::json;

// JSON has no infinities; identical-image PSNR is written as "inf".
json Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double FromNum(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorCode::kMalformedFile, "bad number '" + s + "'");
  }
  return j.get<double>();
}

json OptNum(const std::optional<double>& v) { return v ? Num(*v) : json(nullptr); }

std::optional<double> FromOpt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return FromNum(j);
}

json ConfigEcho(const BenchConfig& cfg) {
  json attacks = json::array();
  for (const AttackSpec& a : cfg.attacks) attacks.push_back(AttackSpecToString(a));
  json wms = json::array();
  for (CodecKind k : cfg.watermarks) wms.push_back(std::string(CodecName(k)));
  json params = json::object();
  for (const auto& [kind, p] : cfg.codec_params) {
    params[std::string(CodecName(kind))] = p;
  }
  return {{"image_size", cfg.image_size},   {"seed_count", cfg.seed_count},
          {"base_seed", cfg.base_seed},     {"key_seed", cfg.key_seed},
          {"watermarks", wms},              {"attacks", attacks},
          {"codec_params", params},
          {"stage_timeout_ms", cfg.stage_timeout.count()}};
}

json RecordToJson(const SeedRecord& r) {
  json j = {{"seed_index", r.seed_index}, {"scene_seed", r.scene_seed}, {"failed", r.failed}};
  if (r.failed) {
    j["error"] = r.error;
    return j;
  }
  if (const auto* p = std::get_if<PValueOutcome>(&r.detection)) {
    j["detection"] = {{"kind", "pvalue"},
                      {"p_value", Num(p->p_value)},
                      {"eta", Num(p->eta)},
                      {"lambda", Num(p->lambda)},
                      {"dof", p->dof}};
  } else {
    const auto& b = std::get<BitOutcome>(r.detection);
    j["detection"] = {{"kind", "bits"},
                      {"extracted", b.extracted.ToString()},
                      {"bit_accuracy", Num(b.bit_accuracy)}};
  }
  j["mse"] = Num(r.quality.mse);
  j["psnr"] = Num(r.quality.psnr);
  j["ssim"] = Num(r.quality.ssim);
  j["mssim"] = OptNum(r.quality.mssim);
  j["masked_mse"] = Num(r.masked_mse);
  j["masked_psnr"] = Num(r.masked_psnr);
  j["mssim_preserved"] = OptNum(r.mssim_preserved);
  j["preserved_coverage"] = Num(r.preserved_coverage);
  return j;
}

SeedRecord RecordFromJson(const json& j) {
  SeedRecord r;
  r.seed_index = j.at("seed_index").get<int>();
  r.scene_seed = j.at("scene_seed").get<std::uint64_t>();
  r.failed = j.at("failed").get<bool>();
  if (r.failed) {
    r.error = j.value("error", "");
    return r;
  }
  const json& d = j.at("detection");
  if (d.at("kind") == "pvalue") {
    PValueOutcome p;
    p.p_value = FromNum(d.at("p_value"));
    p.eta = FromNum(d.at("eta"));
    p.lambda = FromNum(d.at("lambda"));
    p.dof = d.at("dof").get<int>();
    r.detection = p;
  } else {
    BitOutcome b;
    b.extracted = BitMessage::FromString(d.at("extracted").get<std::string>());
    b.bit_accuracy = FromNum(d.at("bit_accuracy"));
    r.detection = b;
  }
  r.quality.mse = FromNum(j.at("mse"));
  r.quality.psnr = FromNum(j.at("psnr"));
  r.quality.ssim = FromNum(j.at("ssim"));
  r.quality.mssim = FromOpt(j.at("mssim"));
  r.masked_mse = FromNum(j.at("masked_mse"));
  r.masked_psnr = FromNum(j.at("masked_psnr"));
  r.mssim_preserved = FromOpt(j.at("mssim_preserved"));
  r.preserved_coverage = FromNum(j.at("preserved_coverage"));
  return r;
}

json AggToJson(const CellAggregates& a) {
  return {{"count", a.count},
          {"failed", a.failed},
          {"ave_p", OptNum(a.ave_p)},
          {"median_p", OptNum(a.median_p)},
          {"ave_bitacc", OptNum(a.ave_bitacc)},
          {"ave_mssim", Num(a.ave_mssim)},
          {"ave_mssim_preserved", OptNum(a.ave_mssim_preserved)},
          {"ave_ssim", Num(a.ave_ssim)},
          {"ave_psnr", Num(a.ave_psnr)},
          {"ave_mse", Num(a.ave_mse)},
          {"ave_masked_mse", Num(a.ave_masked_mse)},
          {"ave_masked_psnr", Num(a.ave_masked_psnr)},
          {"removed", a.removed}};
}

bool Close(double a, double b) {
  if (std::isinf(a) || std::isinf(b) || std::isnan(a) || std::isnan(b)) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
  }
  return std::abs(a - b) <= 1e-12;
}

bool Close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || Close(*a, *b);
}

void CheckAggregates(const BenchCell& cell, const json& stored) {
  const CellAggregates& a = cell.agg;
  auto opt = [&](const char* k) { return FromOpt(stored.at(k)); };
  auto num = [&](const char* k) { return FromNum(stored.at(k)); };
  const bool ok = stored.at("count").get<std::size_t>() == a.count &&
                  stored.at("failed").get<std::size_t>() == a.failed &&
                  Close(opt("ave_p"), a.ave_p) && Close(opt("median_p"), a.median_p) &&
                  Close(opt("ave_bitacc"), a.ave_bitacc) &&
                  Close(num("ave_mssim"), a.ave_mssim) &&
                  Close(opt("ave_mssim_preserved"), a.ave_mssim_preserved) &&
                  Close(num("ave_ssim"), a.ave_ssim) && Close(num("ave_psnr"), a.ave_psnr) &&
                  Close(num("ave_mse"), a.ave_mse) &&
                  Close(num("ave_masked_mse"), a.ave_masked_mse) &&
                  Close(num("ave_masked_psnr"), a.ave_masked_psnr) &&
                  stored.at("removed").get<bool>() == a.removed;
  if (!ok) {
    throw Error(ErrorCode::kMalformedFile,
                "stored aggregates disagree with records for " +
                    std::string(CodecName(cell.watermark)) + " / " + cell.attack_id);
  }
}

std::string Fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvNum(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return Num(*v).dump();
}

// Attack ids and watermarks in first-seen order of the report.
std::vector<std::string> AttackOrder(const BenchReport& r) {
  std::vector<std::string> out;
  for (const AttackSpec& a : r.config.attacks) out.push_back(AttackSpecToString(a));
  return out;
}

std::vector<CodecKind> WatermarkOrder(const BenchReport& r) {
  std::vector<CodecKind> out;
  for (const BenchCell& c : r.cells) {
    if (std::find(out.begin(), out.end(), c.watermark) == out.end()) {
      out.push_back(c.watermark);
    }
  }
  return out;
}

const BenchCell* FindCell(const BenchReport& r, CodecKind w, const std::string& a) {
  for (const BenchCell& c : r.cells) {
    if (c.watermark == w && c.attack_id == a) return &c;
  }
  return nullptr;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

json ReportToJsonDeterministic(const BenchReport& report) {
  json cells = json::array();
  for (const BenchCell& c : report.cells) {
    json recs = json::array();
    for (const SeedRecord& r : c.records) recs.push_back(RecordToJson(r));
    cells.push_back({{"watermark", std::string(CodecName(c.watermark))},
                     {"attack", c.attack_id},
                     {"aggregates", AggToJson(c.agg)},
                     {"records", recs}});
  }
  return {{"format", "wmlab-report"},
          {"version", 1},
          {"tool_version", report.tool_version},
          {"config", ConfigEcho(report.config)},
          {"cells", cells}};
}

json ReportToJson(const BenchReport& report) {
  json j = ReportToJsonDeterministic(report);
  json stages = json::array();
  for (const BenchCell& c : report.cells) {
    std::map<std::string, double> totals;
    for (const SeedRecord& r : c.records) {
      for (const StageTiming& t : r.stage_log) totals[t.stage] += t.seconds;
    }
    stages.push_back({{"watermark", std::string(CodecName(c.watermark))},
                      {"attack", c.attack_id},
                      {"stage_seconds", totals}});
  }
  j["timing"] = {{"wall_seconds", report.wall_seconds},
                 {"workers", report.config.workers},
                 {"output_dir", report.config.output_dir},
                 {"cells", stages}};
  return j;
}

BenchReport ReportFromJson(const json& j) {
  try {
    if (j.at("format") != "wmlab-report" || j.at("version") != 1) {
      throw Error(ErrorCode::kMalformedFile, "not a wmlab report");
    }
    BenchReport rep;
    rep.tool_version = j.at("tool_version").get<std::string>();
    const json& c = j.at("config");
    rep.config.image_size = c.at("image_size").get<int>();
    rep.config.seed_count = c.at("seed_count").get<int>();
    rep.config.base_seed = c.at("base_seed").get<std::uint64_t>();
    rep.config.key_seed = c.at("key_seed").get<std::uint64_t>();
    rep.config.stage_timeout = std::chrono::milliseconds(c.at("stage_timeout_ms").get<long>());
    rep.config.watermarks.clear();
    for (const auto& w : c.at("watermarks")) {
      rep.config.watermarks.push_back(ParseCodecKind(w.get<std::string>()));
    }
    for (const auto& a : c.at("attacks")) {
      rep.config.attacks.push_back(ParseAttackSpec(a.get<std::string>()));
    }
    for (const auto& [name, params] : c.at("codec_params").items()) {
      rep.config.codec_params[ParseCodecKind(name)] =
          params.get<std::map<std::string, std::string>>();
    }
    if (j.contains("timing")) {
      rep.wall_seconds = j["timing"].value("wall_seconds", 0.0);
      rep.config.workers = j["timing"].value("workers", 1);
      rep.config.output_dir = j["timing"].value("output_dir", rep.config.output_dir);
    }
    for (const json& cj : j.at("cells")) {
      BenchCell cell;
      cell.watermark = ParseCodecKind(cj.at("watermark").get<std::string>());
      cell.attack_id = cj.at("attack").get<std::string>();
      for (const json& rj : cj.at("records")) cell.records.push_back(RecordFromJson(rj));
      cell.agg = ComputeAggregates(cell.records);
      CheckAggregates(cell, cj.at("aggregates"));
      rep.cells.push_back(std::move(cell));
    }
    return rep;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("report: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformedFile) throw;
    throw Error(ErrorCode::kMalformedFile, e.what());
  }
}

std::string ReportToCsv(const BenchReport& report) {
  std::ostringstream out;
  out << "watermark,attack,count,failed,ave_p,median_p,ave_bitacc,ave_mssim,"
         "ave_mssim_preserved,ave_ssim,ave_psnr,ave_mse,ave_masked_mse,"
         "ave_masked_psnr,removed\r\n";
  for (const BenchCell& c : report.cells) {
    const CellAggregates& a = c.agg;
    out << CodecName(c.watermark) << "," << CsvField(c.attack_id) << "," << a.count << ","
        << a.failed << "," << CsvNum(a.ave_p) << "," << CsvNum(a.median_p) << ","
        << CsvNum(a.ave_bitacc) << "," << CsvNum(a.ave_mssim) << ","
        << CsvNum(a.ave_mssim_preserved) << "," << CsvNum(a.ave_ssim) << ","
        << CsvNum(a.ave_psnr) << "," << CsvNum(a.ave_mse) << "," << CsvNum(a.ave_masked_mse)
        << "," << CsvNum(a.ave_masked_psnr) << "," << (a.removed ? "true" : "false")
        << "\r\n";
  }
  return out.str();
}

std::string ReportToMarkdown(const BenchReport& report) {
  const auto attacks = AttackOrder(report);
  const auto wms = WatermarkOrder(report);
  std::ostringstream out;
  out << "# wmlab benchmark report\n\n";
  out << "Seeds: " << report.config.seed_count << ", image size: " << report.config.image_size
      << ". Removal criteria: p > 0.05 (ring), bit accuracy < 24/32 = 0.75 (bit codecs).\n\n";

  auto header = [&](const std::string& first) {
    out << "| " << first << " |";
    for (CodecKind w : wms) {
      out << " " << CodecName(w) << (IsBitCodec(w) ? " (Ave Bit Acc)" : " (Ave p-value)")
          << " |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < wms.size(); ++i) out << "---|";
    out << "\n";
  };

  out << "## Removal success\n\n";
  header("Attack");
  for (const std::string& a : attacks) {
    out << "| " << a << " |";
    for (CodecKind w : wms) {
      const BenchCell* c = FindCell(report, w, a);
      if (!c || c->agg.count == 0) {
        out << " failed |";
        continue;
      }
      const double v = c->agg.ave_p ? *c->agg.ave_p : *c->agg.ave_bitacc;
      out << " " << Fixed(v, 3) << (c->agg.removed ? " **removed**" : "");
      if (c->agg.failed) out << " (" << c->agg.failed << " failed)";
      out << " |";
    }
    out << "\n";
  }

  out << "\n## Masked SSIM (ground-truth foreground)\n\n";
  out << "| Attack |";
  for (CodecKind w : wms) out << " " << CodecName(w) << " (Ave mSSIM) |";
  out << "\n|---|";
  for (std::size_t i = 0; i < wms.size(); ++i) out << "---|";
  out << "\n";
  for (const std::string& a : attacks) {
    out << "| " << a << " |";
    for (CodecKind w : wms) {
      const BenchCell* c = FindCell(report, w, a);
      if (!c || c->agg.count == 0) {
        out << " failed |";
        continue;
      }
      out << " " << Fixed(c->agg.ave_mssim, 4);
      if (c->agg.ave_mssim_preserved) {
        out << " (preserved " << Fixed(*c->agg.ave_mssim_preserved, 4) << ")";
      }
      out << " |";
    }
    out << "\n";
  }

  out << "\n## Image quality before and after masking\n\n";
  out << "| Attack | MSE | SSIM | PSNR | masked MSE | mSSIM | masked PSNR |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const std::string& a : attacks) {
    double mse = 0, ssim = 0, psnr = 0, mmse = 0, mssim = 0, mpsnr = 0;
    int n = 0;
    for (CodecKind w : wms) {
      const BenchCell* c = FindCell(report, w, a);
      if (!c || c->agg.count == 0) continue;
      mse += c->agg.ave_mse;
      ssim += c->agg.ave_ssim;
      psnr += c->agg.ave_psnr;
      mmse += c->agg.ave_masked_mse;
      mssim += c->agg.ave_mssim;
      mpsnr += c->agg.ave_masked_psnr;
      ++n;
    }
    if (n == 0) {
      out << "| " << a << " | failed | | | | | |\n";
      continue;
    }
    out << "| " << a << " | " << Fixed(mse / n, 4) << " | " << Fixed(ssim / n, 4) << " | "
        << Fixed(psnr / n, 4) << " | " << Fixed(mmse / n, 4) << " | " << Fixed(mssim / n, 4)
        << " | " << Fixed(mpsnr / n, 4) << " |\n";
  }
  return out.str();
}

std::string ReportToSvg(const BenchReport& report) {
  constexpr int kW = 720, kH = 480, kLeft = 70, kRight = 220, kTop = 30, kBottom = 60;
  constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                     "#bcbd22", "#17becf"};
  const auto attacks = AttackOrder(report);
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW
      << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    const double x = kLeft + v * pw;
    const double y = kTop + (1 - v) * ph;
    out << "<text x=\"" << x << "\" y=\"" << kTop + ph + 15
        << "\" text-anchor=\"middle\">" << Fixed(v, 2) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << Fixed(v, 2) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 20
      << "\" text-anchor=\"middle\">x: average mSSIM (image quality)</text>\n";
  out << "<text x=\"15\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << kTop + ph / 2
      << ")\">y: removal success (ave p for ring, 1 - ave bit acc otherwise)</text>\n";
  for (std::size_t ai = 0; ai < attacks.size(); ++ai) {
    const char* color = kColors[ai % 10];
    for (const BenchCell& c : report.cells) {
      if (c.attack_id != attacks[ai] || c.agg.count == 0) continue;
      const double yv = c.agg.ave_p ? *c.agg.ave_p : 1.0 - *c.agg.ave_bitacc;
      const double x = kLeft + std::clamp(c.agg.ave_mssim, 0.0, 1.0) * pw;
      const double y = kTop + (1 - std::clamp(yv, 0.0, 1.0)) * ph;
      out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color
          << "\"><title>" << XmlEscape(std::string(CodecName(c.watermark)) + " / " + c.attack_id)
          << "</title></circle>\n";
    }
    const double ly = kTop + 10 + 16 * ai;
    out << "<circle cx=\"" << kW - kRight + 15 << "\" cy=\"" << ly << "\" r=\"4\" fill=\""
        << color << "\"/>\n";
    out << "<text x=\"" << kW - kRight + 25 << "\" y=\"" << ly + 4 << "\">"
        << XmlEscape(attacks[ai]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::string> EmitReport(const BenchReport& report,
                                    const std::vector<std::string>& formats,
                                    const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  for (const std::string& f : formats) {
    std::string path;
    if (f == "csv") {
      path = dir + "/report.csv";
      WriteTextFile(path, ReportToCsv(report));
    } else if (f == "structured" || f == "json") {
      path = dir + "/report.json";
      WriteTextFile(path, ReportToJson(report).dump(1) + "\n");
    } else if (f == "markdown" || f == "md") {
      path = dir + "/report.md";
      WriteTextFile(path, ReportToMarkdown(report));
    } else if (f == "svg") {
      path = dir + "/report.svg";
      WriteTextFile(path, ReportToSvg(report));
    } else {
      throw Error(ErrorCode::kInvalidParameter, "unknown report format '" + f + "'");
    }
    written.push_back(path);
  }
  return written;
}

json CalibrationToJson(const CalibrationRecord& rec) {
  json bits = json::object();
  for (const auto& [k, v] : rec.bit_null_accuracy) bits[std::string(CodecName(k))] = v;
  return {{"trials", rec.trials},         {"mean_p", rec.mean_p},
          {"frac_below_0.05", rec.frac_below_005}, {"warning", rec.warning},
          {"histogram", rec.histogram},   {"bit_null_accuracy", bits},
          {"p_values", rec.p_values}};
}

}  // namespace wmlab
