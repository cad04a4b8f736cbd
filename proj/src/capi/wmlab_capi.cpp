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

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "wmlab/attacks.hpp"
#include "wmlab/codecs.hpp"
#include "wmlab/error.hpp"
#include "wmlab/harness.hpp"
#include "wmlab/io.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/scenegen.hpp"
#include "wmlab/wmlab.h"

struct wm_image {
  wmlab::ImageF img;
};
struct wm_mask {
  wmlab::BinaryMask mask;
};
struct wm_key {
  wmlab::CodecKind kind;
  std::uint64_t seed;
  std::map<std::string, std::string> params;
  wmlab::WatermarkKey key;
};
struct wm_report {
  wmlab::BenchReport report;
};

namespace {

thread_local std::string g_last_error;

wm_status Fail(wm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps exceptions escaping `fn` onto status codes.
template <typename F>
wm_status Guard(F&& fn) {
  try {
    g_last_error.clear();
    fn();
    return WM_OK;
  } catch (const wmlab::Error& e) {
    return Fail(static_cast<wm_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(WM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(WM_ERR_INTERNAL, e.what());
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

wmlab::BitMessage MessageOrZero(const char* bits) {
  return bits ? wmlab::BitMessage::FromString(bits) : wmlab::BitMessage();
}

#define WM_REQUIRE(cond)                                             \
  do {                                                               \
    if (!(cond)) return Fail(WM_ERR_NULL_ARGUMENT, "null argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* wm_version(void) { return wmlab::kToolVersion.data(); }

const char* wm_last_error(void) { return g_last_error.c_str(); }

const char* wm_status_name(wm_status status) {
  switch (status) {
    case WM_OK: return "Ok";
    case WM_ERR_NULL_ARGUMENT: return "NullArgument";
    case WM_ERR_INTERNAL: return "Internal";
    default:
      if (status >= WM_ERR_MALFORMED_FILE && status <= WM_ERR_IO) {
        return wmlab::ErrorCodeName(static_cast<wmlab::ErrorCode>(status)).data();
      }
      return "Unknown";
  }
}

void wm_string_free(char* s) { std::free(s); }

wm_status wm_image_read_png(const char* path, wm_image** out) {
  WM_REQUIRE(path && out);
  return Guard([&] { *out = new wm_image{wmlab::ReadPng(path)}; });
}

wm_status wm_image_write_png(const wm_image* img, const char* path) {
  WM_REQUIRE(img && path);
  return Guard([&] { wmlab::WritePng(path, img->img); });
}

wm_status wm_image_size(const wm_image* img, int* width, int* height) {
  WM_REQUIRE(img && width && height);
  *width = img->img.width();
  *height = img->img.height();
  return WM_OK;
}

void wm_image_free(wm_image* img) { delete img; }

wm_status wm_mask_read_png(const char* path, wm_mask** out) {
  WM_REQUIRE(path && out);
  return Guard([&] { *out = new wm_mask{wmlab::ReadMaskPng(path)}; });
}

wm_status wm_mask_write_png(const wm_mask* mask, const char* path) {
  WM_REQUIRE(mask && path);
  return Guard([&] { wmlab::WriteMaskPng(path, mask->mask); });
}

wm_status wm_mask_coverage(const wm_mask* mask, double* out) {
  WM_REQUIRE(mask && out);
  *out = wmlab::MaskCoverage(mask->mask);
  return WM_OK;
}

void wm_mask_free(wm_mask* mask) { delete mask; }

wm_status wm_scene_generate(uint64_t seed, int size, wm_image** image, wm_mask** mask,
                            char** descriptor) {
  WM_REQUIRE(image && mask);
  return Guard([&] {
    wmlab::Scene scene = wmlab::GenerateScene(seed, size);
    if (descriptor) {
      const auto words = wmlab::DescribeScene(scene);
      *descriptor = Dup(words[0] + "\n" + words[1] + "\n" + words[2]);
    }
    *image = new wm_image{std::move(scene.image)};
    *mask = new wm_mask{std::move(scene.gt_mask)};
  });
}

wm_status wm_key_create(const char* codec, uint64_t seed, int image_size, wm_key** out) {
  WM_REQUIRE(codec && out);
  return Guard([&] {
    const wmlab::CodecKind kind = wmlab::ParseCodecKind(codec);
    std::map<std::string, std::string> params;
    if (kind == wmlab::CodecKind::kSpread && image_size > 0) {
      params["size"] = std::to_string(image_size);
    }
    wmlab::WatermarkKey key = wmlab::MakeKey(kind, seed, params);
    *out = new wm_key{kind, seed, wmlab::KeyParams(key), std::move(key)};
  });
}

wm_status wm_key_set_param(wm_key* key, const char* name, const char* value) {
  WM_REQUIRE(key && name && value);
  return Guard([&] {
    auto params = key->params;
    params[name] = value;
    key->key = wmlab::MakeKey(key->kind, key->seed, params);
    key->params = wmlab::KeyParams(key->key);
  });
}

wm_status wm_key_load(const char* path, wm_key** out) {
  WM_REQUIRE(path && out);
  return Guard([&] {
    wmlab::WatermarkKey key = wmlab::KeyFromText(wmlab::ReadTextFile(path));
    const auto kind = wmlab::KindOf(key);
    const auto seed = std::visit([](const auto& k) { return k.seed; }, key);
    *out = new wm_key{kind, seed, wmlab::KeyParams(key), std::move(key)};
  });
}

wm_status wm_key_save(const wm_key* key, const char* path) {
  WM_REQUIRE(key && path);
  return Guard([&] { wmlab::WriteTextFile(path, wmlab::KeyToText(key->key)); });
}

wm_status wm_key_codec(const wm_key* key, const char** codec) {
  WM_REQUIRE(key && codec);
  *codec = wmlab::CodecName(key->kind).data();
  return WM_OK;
}

void wm_key_free(wm_key* key) { delete key; }

wm_status wm_embed(const wm_key* key, const wm_image* in, const char* message,
                   uint64_t noise_seed, wm_image** out) {
  WM_REQUIRE(key && in && out);
  return Guard([&] {
    *out = new wm_image{wmlab::Embed(key->key, in->img, MessageOrZero(message), noise_seed)};
  });
}

wm_status wm_detect(const wm_key* key, const wm_image* img, const char* truth,
                    wm_detection* out) {
  WM_REQUIRE(key && img && out);
  return Guard([&] {
    const auto d = wmlab::Detect(key->key, img->img, MessageOrZero(truth));
    *out = wm_detection{};
    if (const auto* p = std::get_if<wmlab::PValueOutcome>(&d)) {
      out->is_pvalue = 1;
      out->p_value = p->p_value;
      out->eta = p->eta;
      out->lambda = p->lambda;
      out->dof = p->dof;
    } else {
      const auto& b = std::get<wmlab::BitOutcome>(d);
      out->bit_accuracy = b.bit_accuracy;
      const std::string s = b.extracted.ToString();
      std::memcpy(out->extracted, s.c_str(), s.size() + 1);
    }
  });
}

wm_status wm_attack(const char* spec, const wm_image* in, uint64_t seed, long timeout_ms,
                    wm_image** out, wm_mask** preserved, char** prompt_used) {
  WM_REQUIRE(spec && in && out);
  return Guard([&] {
    const wmlab::AttackSpec parsed = wmlab::ParseAttackSpec(spec);
    wmlab::RngStream rng(seed);
    wmlab::AttackContext ctx;
    if (timeout_ms > 0) ctx.stage_timeout = std::chrono::milliseconds(timeout_ms);
    wmlab::AttackResult res = wmlab::RunAttack(parsed, in->img, rng, ctx);
    char* prompt = prompt_used ? Dup(res.prompt_used) : nullptr;
    *out = new wm_image{std::move(res.image)};
    if (preserved) *preserved = new wm_mask{std::move(res.preserved_mask)};
    if (prompt_used) *prompt_used = prompt;
  });
}

wm_status wm_metric(const wm_image* a, const wm_image* b, const wm_mask* mask,
                    wm_quality* out) {
  WM_REQUIRE(a && b && out);
  return Guard([&] {
    const auto q = wmlab::Quality(a->img, b->img, mask ? &mask->mask : nullptr);
    *out = wm_quality{q.mse, q.psnr, q.ssim, q.mssim.value_or(0.0), q.mssim.has_value()};
  });
}

wm_status wm_bench_run_file(const char* config_path, int workers, wm_report** out) {
  WM_REQUIRE(config_path && out);
  return Guard([&] {
    wmlab::BenchConfig cfg = wmlab::LoadConfig(config_path);
    if (workers > 0) cfg.workers = workers;
    *out = new wm_report{wmlab::RunBench(cfg)};
  });
}

wm_status wm_report_emit(const wm_report* report, const char* formats, const char* dir) {
  WM_REQUIRE(report && formats && dir);
  return Guard([&] {
    std::vector<std::string> list;
    std::istringstream in(formats);
    std::string f;
    while (std::getline(in, f, ',')) {
      if (!f.empty()) list.push_back(f);
    }
    wmlab::EmitReport(report->report, list, dir);
  });
}

wm_status wm_report_json(const wm_report* report, int include_timing, char** out) {
  WM_REQUIRE(report && out);
  return Guard([&] {
    const auto j = include_timing ? wmlab::ReportToJson(report->report)
                                  : wmlab::ReportToJsonDeterministic(report->report);
    *out = Dup(j.dump(1));
  });
}

wm_status wm_report_failed(const wm_report* report, size_t* failed_records) {
  WM_REQUIRE(report && failed_records);
  *failed_records = report->report.FailedCount();
  return WM_OK;
}

const char* wm_report_output_dir(const wm_report* report) {
  return report ? report->report.config.output_dir.c_str() : "";
}

void wm_report_free(wm_report* report) { delete report; }

wm_status wm_calibrate_file(const char* config_path, int trials, int workers, char** json,
                            int* warning) {
  WM_REQUIRE(config_path && json);
  return Guard([&] {
    wmlab::BenchConfig cfg = wmlab::LoadConfig(config_path);
    if (workers > 0) cfg.workers = workers;
    const auto rec = wmlab::CalibrateNull(cfg, trials);
    *json = Dup(wmlab::CalibrationToJson(rec).dump(1));
    if (warning) *warning = rec.warning ? 1 : 0;
  });
}

}  // extern "C"
