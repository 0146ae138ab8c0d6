#ifndef CAFEWALL_H
#define CAFEWALL_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_PARAM = 2,
  CW_STATUS_IO = 3,
  CW_STATUS_FORMAT = 4,
  CW_STATUS_INTERNAL = 5,
} CwStatus;

/**
 * Border handling for the DoG filter.
 */
typedef enum CwBorder {
  CW_BORDER_REPLICATE = 0,
  CW_BORDER_ZERO = 1,
  CW_BORDER_MIRROR = 2,
} CwBorder;

/**
 * Orientation buckets.
 */
typedef enum CwBucket {
  CW_BUCKET_H = 0,
  CW_BUCKET_V = 1,
  CW_BUCKET_D1 = 2,
  CW_BUCKET_D2 = 3,
} CwBucket;

/**
 * Grayscale image with luminances in [0, 1].
 */
typedef struct CwImage CwImage;

/**
 * Segments detected at one scale.
 */
typedef struct CwSegments CwSegments;

typedef struct CwStimulusSpec {
  uint32_t rows;
  uint32_t cols;
  uint32_t tile_size;
  uint32_t mortar_size;
  uint32_t row_shift;
  double mortar_lum;
} CwStimulusSpec;

/**
 * Parameters for a single-scale analysis. `nhood_rho` / `nhood_theta` of 0
 * select the size-derived default neighbourhood.
 */
typedef struct CwAnalyzeParams {
  double sigma_c;
  double surround_ratio;
  double window_ratio;
  enum CwBorder border;
  bool off_center;
  double binarize_threshold;
  uint32_t num_peaks;
  uint32_t threshold;
  uint32_t nhood_rho;
  uint32_t nhood_theta;
  double fill_gap;
  double min_length;
} CwAnalyzeParams;

typedef struct CwSegment {
  uint32_t x1;
  uint32_t y1;
  uint32_t x2;
  uint32_t y2;
  double theta_deg;
  double rho;
  double length_px;
  /**
   * Endpoint angle in [0, 180).
   */
  double angle_deg;
  enum CwBucket bucket;
  /**
   * Signed deviation from the bucket reference, in [-22.5, 22.5).
   */
  double deviation_deg;
} CwSegment;

/**
 * Per-bucket statistics; the float fields are NaN when `count` is 0.
 */
typedef struct CwTiltStats {
  uint64_t count;
  double mean_abs_dev;
  double std_dev;
  double std_err;
} CwTiltStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cw_version(void);

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cw_last_error_message(void);

/**
 * Fills `out` with the default 9x14, 200 px tile, 8 px mortar pattern.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one `CwStimulusSpec`.
 */
enum CwStatus cw_stimulus_spec_default(struct CwStimulusSpec *out);

/**
 * Renders a Cafe Wall pattern into a new image handle.
 *
 * # Safety
 * `spec` must point to a valid `CwStimulusSpec`; `out` must be writable.
 */
enum CwStatus cw_generate(const struct CwStimulusSpec *spec, struct CwImage **out);

/**
 * Copies `height * width` row-major luminances into a new image handle.
 *
 * # Safety
 * `pixels` must point to `height * width` readable doubles; `out` must be
 * writable.
 */
enum CwStatus cw_image_new(size_t height, size_t width, const double *pixels, struct CwImage **out);

/**
 * Loads a PNG or PGM file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CwStatus cw_image_load(const char *path, struct CwImage **out);

/**
 * Writes the image as 8-bit PNG, or PGM when the path ends in `.pgm`.
 *
 * # Safety
 * `image` must be a live handle; `path` a NUL-terminated string.
 */
enum CwStatus cw_image_save(const struct CwImage *image, const char *path);

/**
 * # Safety
 * `image` must be NULL or a live handle.
 */
size_t cw_image_height(const struct CwImage *image);

/**
 * # Safety
 * `image` must be NULL or a live handle.
 */
size_t cw_image_width(const struct CwImage *image);

/**
 * Borrows the row-major pixel buffer; valid while the handle lives.
 *
 * # Safety
 * `image` must be a live handle; `out` and `len` must be writable.
 */
enum CwStatus cw_image_pixels(const struct CwImage *image, const double **out, size_t *len);

/**
 * # Safety
 * `image` must be NULL or a handle not yet freed.
 */
void cw_image_free(struct CwImage *image);

/**
 * Fills `out` with defaults: sigma 8, s 2, h 8, replicate border, ON
 * polarity, threshold 0, 100 peaks, 3 votes, default nhood, gap 40, length 450.
 *
 * # Safety
 * `out` must be writable.
 */
enum CwStatus cw_analyze_params_default(struct CwAnalyzeParams *out);

/**
 * DoG filter, binarise and extract segments at one scale.
 *
 * # Safety
 * `image` must be a live handle, `params` readable, `out` writable.
 */
enum CwStatus cw_analyze(const struct CwImage *image,
                         const struct CwAnalyzeParams *params,
                         struct CwSegments **out);

/**
 * # Safety
 * `segments` must be NULL or a live handle.
 */
size_t cw_segments_len(const struct CwSegments *segments);

/**
 * Copies segment `index` into `out`.
 *
 * # Safety
 * `segments` must be a live handle; `out` writable.
 */
enum CwStatus cw_segments_get(const struct CwSegments *segments,
                              size_t index,
                              struct CwSegment *out);

/**
 * Tilt statistics of one bucket.
 *
 * # Safety
 * `segments` must be a live handle; `out` writable.
 */
enum CwStatus cw_segments_stats(const struct CwSegments *segments,
                                enum CwBucket bucket,
                                struct CwTiltStats *out);

/**
 * # Safety
 * `segments` must be NULL or a handle not yet freed.
 */
void cw_segments_free(struct CwSegments *segments);

/**
 * DoG window side for the given centre sigma and window ratio, or 0 if the
 * parameters are invalid.
 */
size_t cw_window_size(double sigma_c, double window_ratio);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAFEWALL_H */
