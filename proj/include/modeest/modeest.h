/*
 * modeest: estimation of a finite-population mode under SRSWOR with
 * auxiliary information. Plain C interface over the C++ core.
 *
 * Conventions
 *   - Every fallible call returns a modeest_status; MODEEST_OK is 0 and the
 *     error values equal the CLI exit codes. The message for the most recent
 *     failure on the calling thread is available from modeest_last_error().
 *   - Handles are opaque. Release them with the matching *_free function;
 *     passing NULL to a *_free function is a no-op.
 *   - Strings returned through a char** are heap-allocated, NUL-terminated and
 *     released with modeest_string_free().
 *   - Handles are immutable after creation and may be shared across threads.
 */
#ifndef MODEEST_MODEEST_H
#define MODEEST_MODEEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MODEEST_BUILDING_LIBRARY)
#    define MODEEST_API __declspec(dllexport)
#  else
#    define MODEEST_API __declspec(dllimport)
#  endif
#else
#  define MODEEST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum modeest_status {
  MODEEST_OK = 0,
  MODEEST_ERR_USAGE = 2,    /* argument outside an operation's domain */
  MODEEST_ERR_DATA = 3,     /* malformed or degenerate input data */
  MODEEST_ERR_NUMERIC = 4,  /* model breakdown, e.g. negative first-order variance */
  MODEEST_ERR_INTERNAL = 5
} modeest_status;

typedef enum modeest_density_kind {
  MODEEST_DENSITY_GAMMA = 0, /* Gamma maximum likelihood fit */
  MODEEST_DENSITY_KDE = 1    /* Gaussian kernel, Silverman bandwidth */
} modeest_density_kind;

typedef enum modeest_format { MODEEST_FORMAT_JSON = 0, MODEEST_FORMAT_CSV = 1 } modeest_format;

typedef struct modeest_population modeest_population;
typedef struct modeest_theory modeest_theory;

MODEEST_API const char* modeest_version(void);
MODEEST_API const char* modeest_last_error(void);
MODEEST_API void modeest_string_free(char* s);

/* ---- populations ------------------------------------------------------- */

typedef struct modeest_generator_config {
  size_t population_size;
  double gamma_shape;
  double gamma_scale;
  double intercept;
  double slope;
  double noise_sd;
  uint64_t seed;
} modeest_generator_config;

/* N=5000, Gamma(10, 0.667), y = 0.75 + 0.87 x + 0.5 z, seed 0. */
MODEEST_API void modeest_generator_config_default(modeest_generator_config* cfg);

MODEEST_API modeest_status modeest_population_generate(const modeest_generator_config* cfg,
                                                       modeest_population** out);
MODEEST_API modeest_status modeest_population_load_csv(const char* path, modeest_population** out);
MODEEST_API modeest_status modeest_population_from_arrays(const double* y, const double* x, size_t count,
                                                          modeest_population** out);
MODEEST_API void modeest_population_free(modeest_population* pop);
MODEEST_API size_t modeest_population_size(const modeest_population* pop);

/* Copies up to `capacity` values of each column. */
MODEEST_API modeest_status modeest_population_values(const modeest_population* pop, double* y, double* x,
                                                     size_t capacity);

/* Writes `y,x` rows. A non-NULL manifest_json is written first as a
 * "# manifest: ..." comment line, which modeest_population_load_csv skips. */
MODEEST_API modeest_status modeest_population_write_csv(const modeest_population* pop, const char* path,
                                                        const char* manifest_json);

/* FNV-1a 64-bit hash of a file's bytes. */
MODEEST_API modeest_status modeest_file_digest(const char* path, uint64_t* out);

/* ---- summaries --------------------------------------------------------- */

typedef struct modeest_variable_summary {
  double min;
  double lower_quartile;
  double median;
  double mean;
  double upper_quartile;
  double max;
} modeest_variable_summary;

MODEEST_API modeest_status modeest_summarize(const modeest_population* pop, modeest_variable_summary* y,
                                             modeest_variable_summary* x);

/* ---- population theory ------------------------------------------------- */

typedef struct modeest_population_theory {
  size_t N;
  double mean_y, mean_x;
  double var_y, var_x, cov_yx, corr_yx;
  double median_y, median_x;
  double mode_y, mode_x;
  double density_y, density_x;
  double s_yMy, s_xMx, s_yMx, s_xMy;
  double p11, p12, p21, p22;
  double mode_ratio;
} modeest_population_theory;

/* kde_bandwidth <= 0 selects Silverman's rule; ignored for the Gamma method. */
MODEEST_API modeest_status modeest_theory_compute(const modeest_population* pop, modeest_density_kind density,
                                                  double kde_bandwidth, modeest_theory** out);
MODEEST_API void modeest_theory_free(modeest_theory* theory);
MODEEST_API modeest_status modeest_theory_get(const modeest_theory* theory, modeest_population_theory* out);

/* Population-optimal characterizing scalars (independent of n). */
MODEEST_API modeest_status modeest_theory_optimal_scalars(const modeest_theory* theory, double* l1, double* k1);

typedef struct modeest_mode_moments {
  size_t n;
  double f;
  double var_mode_y, var_mode_x, cov_modes;
  double rho;  /* NaN when a variance is zero */
  double cv_y, cv_x;
} modeest_mode_moments;

MODEEST_API modeest_status modeest_theory_mode_moments(const modeest_theory* theory, size_t n,
                                                       modeest_mode_moments* out);

/* ---- studies ----------------------------------------------------------- */

typedef struct modeest_study_options {
  const size_t* sample_sizes;
  size_t sample_size_count;
  size_t replications;
  uint64_t seed;
  double alpha;
  int l1_optimal; /* nonzero: use the population optimum, ignore l1 */
  double l1;
  int k1_optimal;
  double k1;
  unsigned threads; /* 0 or 1: single-threaded. Never changes results. */
} modeest_study_options;

/* replications 10000, alpha 0.05, both scalars optimal, seed 0, 1 thread. */
MODEEST_API void modeest_study_options_default(modeest_study_options* opts);

/* Each report is rendered as a versioned JSON document or as CSV; manifest_json
 * (an object, or NULL for {}) is embedded verbatim. */
MODEEST_API modeest_status modeest_summary_report(const modeest_population* pop, modeest_format format,
                                                  const char* manifest_json, char** out);
MODEEST_API modeest_status modeest_theory_report(const modeest_theory* theory, const modeest_study_options* opts,
                                                 modeest_format format, const char* manifest_json, char** out);
MODEEST_API modeest_status modeest_simulate_report(const modeest_population* pop, const modeest_theory* theory,
                                                   const modeest_study_options* opts, modeest_format format,
                                                   const char* manifest_json, char** out);
MODEEST_API modeest_status modeest_coverage_report(const modeest_population* pop, const modeest_theory* theory,
                                                   const modeest_study_options* opts, modeest_format format,
                                                   const char* manifest_json, char** out);

/* Uses opts->sample_sizes[0], replications, seed and threads. 0 and the
 * optimum are added to the grid. */
MODEEST_API modeest_status modeest_sweep_report(const modeest_population* pop, const modeest_theory* theory,
                                                const modeest_study_options* opts, const double* grid,
                                                size_t grid_count, modeest_format format, const char* manifest_json,
                                                char** out);

/* Renders the charts for a JSON report into out_dir. Nothing is written
 * unless every chart renders. `written` (optional) receives the file names,
 * one per line. */
MODEEST_API modeest_status modeest_render_report(const char* report_json, const char* out_dir, char** written);

#ifdef __cplusplus
}
#endif

#endif /* MODEEST_MODEEST_H */
