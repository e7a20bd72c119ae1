#ifndef CQIQA_H
#define CQIQA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of measures written by `cqiqa_evaluate_all`.
 */
#define CQIQA_METRIC_COUNT 9

/**
 * The nine measures, in evaluation-table column order.
 */
typedef enum CqiqaMetric {
  CQIQA_METRIC_PSNR = 0,
  CQIQA_METRIC_SSIM = 1,
  CQIQA_METRIC_MSSIM = 2,
  CQIQA_METRIC_VSNR = 3,
  CQIQA_METRIC_VIFP = 4,
  CQIQA_METRIC_UQI = 5,
  CQIQA_METRIC_NQM = 6,
  CQIQA_METRIC_WSNR = 7,
  CQIQA_METRIC_SNR = 8,
} CqiqaMetric;

/**
 * Result code of every fallible call.
 */
typedef enum CqiqaStatus {
  CQIQA_STATUS_OK = 0,
  CQIQA_STATUS_NULL_POINTER = 1,
  CQIQA_STATUS_INVALID_ARGUMENT = 2,
  CQIQA_STATUS_IO = 3,
  CQIQA_STATUS_DIMENSION_MISMATCH = 4,
  CQIQA_STATUS_DEGENERATE = 5,
  CQIQA_STATUS_PANIC = 6,
} CqiqaStatus;

/**
 * Opaque 8-bit RGB image.
 */
typedef struct CqiqaImage CqiqaImage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful one. Valid until the next cqiqa call on the same thread.
 */
const char *cqiqa_last_error_message(void);

/**
 * Static, NUL-terminated display name of a measure.
 */
const char *cqiqa_metric_name(enum CqiqaMetric metric);

/**
 * Loads a PNG or BMP file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CqiqaStatus cqiqa_image_load(const char *path, struct CqiqaImage **out);

/**
 * Copies `len` bytes of interleaved RGB (`len == width * height * 3`).
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum CqiqaStatus cqiqa_image_from_rgb(size_t width,
                                      size_t height,
                                      const uint8_t *data,
                                      size_t len,
                                      struct CqiqaImage **out);

/**
 * Releases an image. NULL is ignored.
 *
 * # Safety
 * `img` must come from this library and not be used afterwards.
 */
void cqiqa_image_free(struct CqiqaImage *img);

/**
 * Width in pixels, or 0 for NULL.
 *
 * # Safety
 * `img` must be NULL or a live handle.
 */
size_t cqiqa_image_width(const struct CqiqaImage *img);

/**
 * Height in pixels, or 0 for NULL.
 *
 * # Safety
 * `img` must be NULL or a live handle.
 */
size_t cqiqa_image_height(const struct CqiqaImage *img);

/**
 * One measure on the luma plane with default parameters. Perfect
 * fidelity on the dB measures is reported as `+INFINITY`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CqiqaStatus cqiqa_metric_compute(const struct CqiqaImage *reference,
                                      const struct CqiqaImage *distorted,
                                      enum CqiqaMetric metric,
                                      double *out);

/**
 * All nine measures into `out[CQIQA_METRIC_COUNT]`, in `CqiqaMetric` order.
 *
 * # Safety
 * Handles must be live; `out` must hold `CQIQA_METRIC_COUNT` doubles.
 */
enum CqiqaStatus cqiqa_evaluate_all(const struct CqiqaImage *reference,
                                    const struct CqiqaImage *distorted,
                                    double *out);

/**
 * Spearman rank correlation of two length-`n` arrays.
 *
 * # Safety
 * `x` and `y` must hold `n` doubles; `out` must be writable.
 */
enum CqiqaStatus cqiqa_srocc(const double *x, const double *y, size_t n, double *out);

/**
 * Kendall tau-b of two length-`n` arrays.
 *
 * # Safety
 * `x` and `y` must hold `n` doubles; `out` must be writable.
 */
enum CqiqaStatus cqiqa_krocc(const double *x, const double *y, size_t n, double *out);

/**
 * Quantizes every channel to `levels` evenly spaced values (2..=256)
 * into a new image.
 *
 * # Safety
 * `img` must be live; `out` must be writable.
 */
enum CqiqaStatus cqiqa_uniform_quantize(const struct CqiqaImage *img,
                                        uint32_t levels,
                                        struct CqiqaImage **out);

/**
 * Maps a MOS on `[x_min, x_max]` linearly onto `[0, k]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CqiqaStatus cqiqa_normalize_mos(double value,
                                     double x_min,
                                     double x_max,
                                     double k,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CQIQA_H */
