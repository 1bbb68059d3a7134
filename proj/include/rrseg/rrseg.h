/* Stable C interface to the rrseg segmentation library.
 *
 * Every object is an opaque handle created and released by the library.
 * Functions returning rrseg_status store a human-readable message for the
 * calling thread, retrievable with rrseg_last_error(). */
#ifndef RRSEG_RRSEG_H
#define RRSEG_RRSEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RRSEG_BUILDING)
#    define RRSEG_API __declspec(dllexport)
#  else
#    define RRSEG_API __declspec(dllimport)
#  endif
#else
#  define RRSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rrseg_status {
  RRSEG_OK = 0,
  RRSEG_ERR_INVALID_ARGUMENT = 1,
  RRSEG_ERR_IO = 2,
  RRSEG_ERR_DECODE = 3,
  RRSEG_ERR_DEGENERATE_SAMPLE = 4,
  RRSEG_ERR_NO_MODEL = 5,
  RRSEG_ERR_NUMERICAL = 6,
  RRSEG_ERR_UNREACHABLE_CONFIDENCE = 7,
  RRSEG_ERR_USAGE = 8,
  RRSEG_ERR_GENERATION_FAILED = 9,
  RRSEG_ERR_INTERNAL = 100
} rrseg_status;

typedef struct rrseg_image rrseg_image;
typedef struct rrseg_config rrseg_config;
typedef struct rrseg_result rrseg_result;

typedef struct rrseg_metrics {
  double precision;
  double recall;
  double f1;
  uint64_t true_positive;
  uint64_t false_positive;
  uint64_t false_negative;
} rrseg_metrics;

RRSEG_API const char* rrseg_version(void);
RRSEG_API const char* rrseg_status_string(rrseg_status status);
/* Message of the last failure on this thread; "" when none. */
RRSEG_API const char* rrseg_last_error(void);

/* Images: 8-bit, 1 or 3 interleaved channels. */
RRSEG_API rrseg_status rrseg_image_load(const char* path, rrseg_image** out);
RRSEG_API rrseg_status rrseg_image_create(int width, int height, int channels, const uint8_t* pixels,
                                          rrseg_image** out);
RRSEG_API rrseg_status rrseg_image_info(const rrseg_image* image, int* width, int* height, int* channels);
RRSEG_API const uint8_t* rrseg_image_pixels(const rrseg_image* image);
RRSEG_API void rrseg_image_free(rrseg_image* image);

/* Configuration. Keys match the `key = value` config file format. */
RRSEG_API rrseg_status rrseg_config_create(rrseg_config** out);
RRSEG_API rrseg_status rrseg_config_set(rrseg_config* config, const char* key, const char* value);
RRSEG_API rrseg_status rrseg_config_load_file(rrseg_config* config, const char* path);
RRSEG_API rrseg_status rrseg_config_apply_preset(rrseg_config* config, const char* name);
/* JSON dump; the string lives until the next call on this config or its release. */
RRSEG_API const char* rrseg_config_to_json(rrseg_config* config);
RRSEG_API void rrseg_config_free(rrseg_config* config);

RRSEG_API rrseg_status rrseg_segment(const rrseg_image* image, const rrseg_config* config, rrseg_result** out);

RRSEG_API rrseg_status rrseg_result_info(const rrseg_result* result, int* width, int* height,
                                         double* foreground_fraction);
/* width * height bytes, 1 = foreground. Owned by the result. */
RRSEG_API const uint8_t* rrseg_result_mask(const rrseg_result* result);
/* Keeps the `keep` largest 8-connected foreground components. */
RRSEG_API rrseg_status rrseg_result_keep_largest(rrseg_result* result, int keep);
/* Compares against a ground-truth mask (nonzero = foreground); metrics join the report. */
RRSEG_API rrseg_status rrseg_result_attach_truth(rrseg_result* result, const uint8_t* truth, int width, int height);
RRSEG_API rrseg_status rrseg_result_attach_truth_file(rrseg_result* result, const char* path);
RRSEG_API rrseg_status rrseg_result_metrics(const rrseg_result* result, rrseg_metrics* out);
RRSEG_API rrseg_status rrseg_result_write_mask(const rrseg_result* result, const char* path);
RRSEG_API rrseg_status rrseg_result_write_overlay(const rrseg_result* result, const rrseg_image* source,
                                                  const char* path);
RRSEG_API rrseg_status rrseg_result_write_foreground(const rrseg_result* result, const rrseg_image* source,
                                                     const char* path);
/* JSON run report. include_timing = 0 drops wall-clock fields so reports
 * of identical runs compare equal. Owned by the result. */
RRSEG_API const char* rrseg_result_report(rrseg_result* result, int include_timing);
RRSEG_API void rrseg_result_free(rrseg_result* result);

/* Generates a synthetic fixture from a JSON recipe into out_dir:
 * image.pgm, truth.pgm and manifest.json. */
RRSEG_API rrseg_status rrseg_fixture_generate(const char* recipe_path, const char* out_dir);

RRSEG_API rrseg_status rrseg_required_iterations(double inlier_ratio, int model_size, double failure_prob,
                                                 long long* out);
RRSEG_API rrseg_status rrseg_compute_metrics(const uint8_t* mask, const uint8_t* truth, size_t count,
                                             rrseg_metrics* out);

#ifdef __cplusplus
}
#endif

#endif
