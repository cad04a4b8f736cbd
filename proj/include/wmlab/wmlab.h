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

/* C interface to the wmlab watermark-robustness library. All functions
 * return a wm_status; on failure wm_last_error() describes the problem for
 * the calling thread. Objects are opaque and released with their _free
 * function. Strings returned through char** are released with
 * wm_string_free. */
#ifndef WMLAB_WMLAB_H_
#define WMLAB_WMLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(WMLAB_BUILDING_LIBRARY)
#define WMLAB_API __attribute__((visibility("default")))
#else
#define WMLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wm_status {
  WM_OK = 0,
  WM_ERR_MALFORMED_FILE = 1,
  WM_ERR_UNSUPPORTED_FORMAT = 2,
  WM_ERR_DIMENSION_MISMATCH = 3,
  WM_ERR_INVALID_PARAMETER = 4,
  WM_ERR_IMAGE_TOO_SMALL = 5,
  WM_ERR_NON_SQUARE = 6,
  WM_ERR_DEGENERATE_VARIANCE = 7,
  WM_ERR_EMPTY_CANDIDATES = 8,
  WM_ERR_FULL_MASK = 9,
  WM_ERR_EMPTY_MASK = 10,
  WM_ERR_EMPTY_INPUT = 11,
  WM_ERR_BACKEND_FAILURE = 12,
  WM_ERR_CONFIG = 13,
  WM_ERR_IO = 14,
  WM_ERR_NULL_ARGUMENT = 50,
  WM_ERR_INTERNAL = 99
} wm_status;

typedef struct wm_image wm_image;
typedef struct wm_mask wm_mask;
typedef struct wm_key wm_key;
typedef struct wm_report wm_report;

typedef struct wm_detection {
  int is_pvalue;      /* 1: p_value/eta/lambda/dof valid; 0: bit fields */
  double p_value;
  double eta;
  double lambda;
  int dof;
  double bit_accuracy;
  char extracted[33]; /* 32 '0'/'1' characters, NUL terminated */
} wm_detection;

typedef struct wm_quality {
  double mse;
  double psnr;        /* +inf for identical images */
  double ssim;
  double mssim;       /* valid when has_mssim */
  int has_mssim;
} wm_quality;

WMLAB_API const char* wm_version(void);
WMLAB_API const char* wm_last_error(void);
WMLAB_API const char* wm_status_name(wm_status status);
WMLAB_API void wm_string_free(char* s);

/* Images and masks. */
WMLAB_API wm_status wm_image_read_png(const char* path, wm_image** out);
WMLAB_API wm_status wm_image_write_png(const wm_image* img, const char* path);
WMLAB_API wm_status wm_image_size(const wm_image* img, int* width, int* height);
WMLAB_API void wm_image_free(wm_image* img);
WMLAB_API wm_status wm_mask_read_png(const char* path, wm_mask** out);
WMLAB_API wm_status wm_mask_write_png(const wm_mask* mask, const char* path);
WMLAB_API wm_status wm_mask_coverage(const wm_mask* mask, double* out);
WMLAB_API void wm_mask_free(wm_mask* mask);

/* Procedural scene: image, ground-truth mask and the three descriptor words
 * joined by newlines (object, background, style). */
WMLAB_API wm_status wm_scene_generate(uint64_t seed, int size, wm_image** image,
                                      wm_mask** mask, char** descriptor);

/* Keys. codec is one of "dwtdct", "spread", "ring", "latentbit".
 * image_size matters for the spread codec only. */
WMLAB_API wm_status wm_key_create(const char* codec, uint64_t seed, int image_size,
                                  wm_key** out);
WMLAB_API wm_status wm_key_set_param(wm_key* key, const char* name, const char* value);
WMLAB_API wm_status wm_key_load(const char* path, wm_key** out);
WMLAB_API wm_status wm_key_save(const wm_key* key, const char* path);
WMLAB_API wm_status wm_key_codec(const wm_key* key, const char** codec);
WMLAB_API void wm_key_free(wm_key* key);

/* message and truth are 32-character '0'/'1' strings; NULL means all zero
 * (ignored by the ring codec). */
WMLAB_API wm_status wm_embed(const wm_key* key, const wm_image* in, const char* message,
                             uint64_t noise_seed, wm_image** out);
WMLAB_API wm_status wm_detect(const wm_key* key, const wm_image* img, const char* truth,
                              wm_detection* out);

/* Attack from a compact spec string, e.g. "blur:sigma=1". preserved and
 * prompt_used may be NULL. timeout_ms <= 0 selects the default. */
WMLAB_API wm_status wm_attack(const char* spec, const wm_image* in, uint64_t seed,
                              long timeout_ms, wm_image** out, wm_mask** preserved,
                              char** prompt_used);

/* mask may be NULL. */
WMLAB_API wm_status wm_metric(const wm_image* a, const wm_image* b, const wm_mask* mask,
                              wm_quality* out);

/* Benchmark. workers <= 0 keeps the config value. */
WMLAB_API wm_status wm_bench_run_file(const char* config_path, int workers,
                                      wm_report** out);
WMLAB_API wm_status wm_report_emit(const wm_report* report, const char* formats,
                                   const char* dir);
WMLAB_API wm_status wm_report_json(const wm_report* report, int include_timing,
                                   char** out);
WMLAB_API wm_status wm_report_failed(const wm_report* report, size_t* failed_records);
WMLAB_API const char* wm_report_output_dir(const wm_report* report);
WMLAB_API void wm_report_free(wm_report* report);

/* Null calibration; writes a JSON record and the warning flag. */
WMLAB_API wm_status wm_calibrate_file(const char* config_path, int trials, int workers,
                                      char** json, int* warning);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* WMLAB_WMLAB_H_ */
