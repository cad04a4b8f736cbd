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

// Command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "wmlab/wmlab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitIo = 3;

struct CliFailure {
  int exit_code;
};

int ExitCodeFor(wm_status s) {
  switch (s) {
    case WM_ERR_IO:
    case WM_ERR_MALFORMED_FILE:
    case WM_ERR_UNSUPPORTED_FORMAT:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

void Check(wm_status s) {
  if (s == WM_OK) return;
  std::cerr << "wmlab: " << wm_last_error() << "\n";
  throw CliFailure{ExitCodeFor(s)};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Image = std::unique_ptr<wm_image, Deleter<wm_image, wm_image_free>>;
using Mask = std::unique_ptr<wm_mask, Deleter<wm_mask, wm_mask_free>>;
using Key = std::unique_ptr<wm_key, Deleter<wm_key, wm_key_free>>;
using Report = std::unique_ptr<wm_report, Deleter<wm_report, wm_report_free>>;
using CString = std::unique_ptr<char, Deleter<char, wm_string_free>>;

Image LoadImage(const std::string& path) {
  wm_image* img = nullptr;
  Check(wm_image_read_png(path.c_str(), &img));
  return Image(img);
}

// Loads the key file, or creates and stores a fresh key when it is absent.
Key LoadOrCreateKey(const std::string& codec, const std::string& path, std::uint64_t seed,
                    int size) {
  wm_key* key = nullptr;
  if (std::filesystem::exists(path)) {
    Check(wm_key_load(path.c_str(), &key));
    Key owned(key);
    const char* name = nullptr;
    Check(wm_key_codec(key, &name));
    if (codec != name) {
      std::cerr << "wmlab: key file holds a " << name << " key, not " << codec << "\n";
      throw CliFailure{kExitConfig};
    }
    return owned;
  }
  Check(wm_key_create(codec.c_str(), seed, size, &key));
  Key owned(key);
  Check(wm_key_save(key, path.c_str()));
  return owned;
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Watermark robustness lab"};
  app.set_version_flag("--version", std::string(wm_version()));
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int size = 256;
  std::string out;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Seed for keys, noise and attacks");
    sub->add_option("--size", size, "Image size for generated content");
    sub->add_option("--out", out, "Output path or directory");
  };

  std::string codec, in_path, key_path, message, truth, spec, other_path, mask_path,
      config_path, formats = "csv,structured,markdown,svg";
  int workers = 0, trials = 500;
  long timeout_ms = 0;
  std::uint64_t scene_seed = 0;

  auto* embed = app.add_subcommand("embed", "Embed a watermark");
  embed->add_option("codec", codec)->required();
  embed->add_option("input", in_path)->required();
  embed->add_option("key", key_path)->required();
  embed->add_option("--message", message, "32 bits as 0/1 characters");
  common(embed);

  auto* detect = app.add_subcommand("detect", "Detect a watermark");
  detect->add_option("codec", codec)->required();
  detect->add_option("input", in_path)->required();
  detect->add_option("key", key_path)->required();
  detect->add_option("--truth", truth, "Embedded bits for accuracy");
  common(detect);

  auto* attack = app.add_subcommand("attack", "Apply an attack");
  attack->add_option("spec", spec)->required();
  attack->add_option("input", in_path)->required();
  attack->add_option("--timeout-ms", timeout_ms, "Per-stage backend timeout");
  common(attack);

  auto* metric = app.add_subcommand("metric", "Image quality metrics");
  metric->add_option("a", in_path)->required();
  metric->add_option("b", other_path)->required();
  metric->add_option("--mask", mask_path);
  common(metric);

  auto* scenegen = app.add_subcommand("scenegen", "Dump a procedural scene");
  scenegen->add_option("SEED", scene_seed, "Scene seed")->required();
  common(scenegen);

  auto* bench = app.add_subcommand("bench", "Run the benchmark grid");
  bench->add_option("config", config_path)->required();
  bench->add_option("--workers", workers);
  bench->add_option("--formats", formats, "Comma list of csv,structured,markdown,svg");
  common(bench);

  auto* calibrate = app.add_subcommand("calibrate", "Null calibration of the ring detector");
  calibrate->add_option("config", config_path)->required();
  calibrate->add_option("--trials", trials);
  calibrate->add_option("--workers", workers);
  common(calibrate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (embed->parsed()) {
      Key key = LoadOrCreateKey(codec, key_path, seed, size);
      Image img = LoadImage(in_path);
      wm_image* marked = nullptr;
      Check(wm_embed(key.get(), img.get(), message.empty() ? nullptr : message.c_str(), seed,
                     &marked));
      Image owned(marked);
      Check(wm_image_write_png(marked, (out.empty() ? "out.png" : out).c_str()));
    } else if (detect->parsed()) {
      Key key = LoadOrCreateKey(codec, key_path, seed, size);
      Image img = LoadImage(in_path);
      wm_detection d{};
      Check(wm_detect(key.get(), img.get(), truth.empty() ? nullptr : truth.c_str(), &d));
      if (d.is_pvalue) {
        std::cout << "p_value " << FormatDouble(d.p_value) << "\neta " << FormatDouble(d.eta)
                  << "\nlambda " << FormatDouble(d.lambda) << "\ndof " << d.dof << "\n";
      } else {
        std::cout << "bits " << d.extracted << "\n";
        if (!truth.empty()) std::cout << "bit_accuracy " << FormatDouble(d.bit_accuracy) << "\n";
      }
    } else if (attack->parsed()) {
      Image img = LoadImage(in_path);
      wm_image* result = nullptr;
      wm_mask* preserved = nullptr;
      char* prompt = nullptr;
      Check(wm_attack(spec.c_str(), img.get(), seed, timeout_ms, &result, &preserved, &prompt));
      Image r(result);
      Mask m(preserved);
      CString p(prompt);
      const std::string path = out.empty() ? "attacked.png" : out;
      Check(wm_image_write_png(result, path.c_str()));
      if (p && *p) std::cout << "prompt " << p.get() << "\n";
    } else if (metric->parsed()) {
      Image a = LoadImage(in_path);
      Image b = LoadImage(other_path);
      Mask mask;
      if (!mask_path.empty()) {
        wm_mask* m = nullptr;
        Check(wm_mask_read_png(mask_path.c_str(), &m));
        mask.reset(m);
      }
      wm_quality q{};
      Check(wm_metric(a.get(), b.get(), mask.get(), &q));
      std::cout << "mse " << FormatDouble(q.mse) << "\npsnr " << FormatDouble(q.psnr)
                << "\nssim " << FormatDouble(q.ssim) << "\n";
      if (q.has_mssim) std::cout << "mssim " << FormatDouble(q.mssim) << "\n";
    } else if (scenegen->parsed()) {
      wm_image* img = nullptr;
      wm_mask* mask = nullptr;
      char* desc = nullptr;
      Check(wm_scene_generate(scene_seed, size, &img, &mask, &desc));
      Image i(img);
      Mask m(mask);
      CString d(desc);
      const std::filesystem::path dir = out.empty() ? "." : out;
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      const std::string stem = "scene_" + std::to_string(scene_seed);
      Check(wm_image_write_png(img, (dir / (stem + ".png")).c_str()));
      Check(wm_mask_write_png(mask, (dir / (stem + "_mask.png")).c_str()));
      std::ofstream txt(dir / (stem + ".txt"));
      txt << d.get() << "\n";
      if (!txt) {
        std::cerr << "wmlab: cannot write descriptor\n";
        return kExitIo;
      }
    } else if (bench->parsed()) {
      wm_report* report = nullptr;
      Check(wm_bench_run_file(config_path.c_str(), workers, &report));
      Report r(report);
      const std::string dir = out.empty() ? wm_report_output_dir(report) : out;
      Check(wm_report_emit(report, formats.c_str(), dir.empty() ? "." : dir.c_str()));
      size_t failed = 0;
      Check(wm_report_failed(report, &failed));
      if (failed > 0) {
        std::cerr << "wmlab: " << failed << " records failed\n";
        return kExitPartial;
      }
    } else if (calibrate->parsed()) {
      char* json = nullptr;
      int warning = 0;
      Check(wm_calibrate_file(config_path.c_str(), trials, workers, &json, &warning));
      CString j(json);
      if (out.empty()) {
        std::cout << j.get() << "\n";
      } else {
        std::ofstream f(out);
        f << j.get() << "\n";
        if (!f) {
          std::cerr << "wmlab: cannot write " << out << "\n";
          return kExitIo;
        }
      }
      if (warning) std::cerr << "wmlab: null calibration outside expected range\n";
    }
  } catch (const CliFailure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
