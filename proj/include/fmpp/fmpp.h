#ifndef FMPP_H
#define FMPP_H

/* fmpp - functional marked point pattern analysis.
 *
 * C API for the fmpp shared library. All heap-allocated objects are returned
 * as opaque handles and must be released with the matching *_destroy call.
 * Functions return FMPP_OK on success; on failure they return an error code
 * and leave output parameters untouched. fmpp_last_error_message() gives a
 * human-readable description of the most recent failure on the calling
 * thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FMPP_BUILD)
#    define FMPP_API __declspec(dllexport)
#  else
#    define FMPP_API __declspec(dllimport)
#  endif
#else
#  define FMPP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fmpp_status {
  FMPP_OK = 0,
  FMPP_ERR_INVALID_ARGUMENT = 1,
  FMPP_ERR_IO = 2,
  FMPP_ERR_PARSE = 3,
  /* pattern ingestion */
  FMPP_ERR_MISSING_CURVE = 4,
  FMPP_ERR_GRID_MISMATCH = 5,
  FMPP_ERR_DUPLICATE_ID = 6,
  FMPP_ERR_POINT_OUTSIDE_WINDOW = 7,
  FMPP_ERR_COINCIDENT_POINTS = 8,
  /* geometry */
  FMPP_ERR_EMPTY_EROSION = 9,
  FMPP_ERR_ZERO_ARC = 10,
  FMPP_ERR_UNSUPPORTED = 11,
  /* test functions */
  FMPP_ERR_ARITY_MISMATCH = 12,
  FMPP_ERR_NONPOSITIVE_KL_INPUT = 13,
  FMPP_ERR_MISSING_AUX_SCALAR = 14,
  /* intensity */
  FMPP_ERR_TOO_FEW_POINTS = 15,
  FMPP_ERR_OUTSIDE_WINDOW = 16,
  /* summaries */
  FMPP_ERR_EMPTY_PATTERN = 17,
  FMPP_ERR_EMPTY_CONDITIONING_SET = 18,
  FMPP_ERR_NON_FINITE_CONTRAST = 19,
  /* simulation */
  FMPP_ERR_RATE_OVERFLOW = 20,
  FMPP_ERR_CHOLESKY_FAILURE = 21,
  FMPP_ERR_PROBLEM_TOO_LARGE = 22,
  FMPP_ERR_NONPOSITIVE_DT = 23,
  /* plotting / misc */
  FMPP_ERR_EMPTY_SERIES = 24,
  FMPP_ERR_INTERNAL = 25
} fmpp_status;

/* Stable identifier for a status code ("ok", "empty-erosion", ...). */
FMPP_API const char* fmpp_status_name(fmpp_status s);

/* Message describing the last error raised on this thread; empty string if
 * none. The pointer stays valid until the next failing fmpp_* call on the
 * same thread. */
FMPP_API const char* fmpp_last_error_message(void);

FMPP_API const char* fmpp_version(void);

/* ------------------------------------------------------------------ */
/* Opaque handles                                                      */
/* ------------------------------------------------------------------ */

typedef struct fmpp_window fmpp_window;       /* observation window W      */
typedef struct fmpp_pattern fmpp_pattern;     /* marked point pattern      */
typedef struct fmpp_intensity fmpp_intensity; /* fitted intensity model    */
typedef struct fmpp_query fmpp_query;         /* K-estimator configuration */
typedef struct fmpp_kresult fmpp_kresult;     /* estimated K-function      */
typedef struct fmpp_envelope fmpp_envelope;   /* envelope test result      */

/* ------------------------------------------------------------------ */
/* Windows                                                             */
/* ------------------------------------------------------------------ */

FMPP_API fmpp_status fmpp_window_rect(double xmin, double xmax, double ymin,
                                      double ymax, fmpp_window** out);

/* Strictly convex polygon, vertices counter-clockwise as x0,y0,x1,y1,... */
FMPP_API fmpp_status fmpp_window_polygon(const double* xy, size_t n_vertices,
                                         fmpp_window** out);

/* Textual form, e.g. "rect(0,1,0,1)" or "poly(0,0 1,0 0.5,1)". */
FMPP_API fmpp_status fmpp_window_parse(const char* spec, fmpp_window** out);

FMPP_API fmpp_status fmpp_window_area(const fmpp_window* w, double* out);
FMPP_API fmpp_status fmpp_window_bbox(const fmpp_window* w, double* xmin,
                                      double* xmax, double* ymin,
                                      double* ymax);
FMPP_API void fmpp_window_destroy(fmpp_window* w);

/* ------------------------------------------------------------------ */
/* Patterns                                                            */
/* ------------------------------------------------------------------ */

/* Load a pattern from the two CSV files. points CSV header:
 * id,x,y[,label][,scalar]; curves CSV header: id,t,value (long form).
 * The window is copied, not adopted. */
FMPP_API fmpp_status fmpp_pattern_load_csv(const char* points_path,
                                           const char* curves_path,
                                           const fmpp_window* w,
                                           fmpp_pattern** out);

/* Build a pattern from flat arrays. curve_values is n_points x grid_len,
 * row-major. labels/scalars may be NULL (no auxiliary marks). */
FMPP_API fmpp_status fmpp_pattern_from_arrays(
    const fmpp_window* w, const double* x, const double* y, size_t n_points,
    const int* labels, const double* scalars, const double* time_grid,
    size_t grid_len, const double* curve_values, fmpp_pattern** out);

/* Load only the points CSV, attaching all-zero curves on the given time
 * grid. Used to build patterns whose functional marks are constructed
 * afterwards (see fmpp_lisa). */
FMPP_API fmpp_status fmpp_pattern_load_points_csv(const char* points_path,
                                                  const fmpp_window* w,
                                                  const double* time_grid,
                                                  size_t grid_len,
                                                  fmpp_pattern** out);

FMPP_API fmpp_status fmpp_pattern_save_csv(const fmpp_pattern* p,
                                           const char* points_path,
                                           const char* curves_path);

FMPP_API size_t fmpp_pattern_size(const fmpp_pattern* p);
FMPP_API size_t fmpp_pattern_grid_len(const fmpp_pattern* p);
FMPP_API fmpp_status fmpp_pattern_grid(const fmpp_pattern* p, double* out,
                                       size_t cap);

/* Subset by a mark-set spec; see fmpp_query_set_mark_set for the syntax. */
FMPP_API fmpp_status fmpp_pattern_restrict(const fmpp_pattern* p,
                                           const char* mark_set,
                                           fmpp_pattern** out);

FMPP_API void fmpp_pattern_destroy(fmpp_pattern* p);

/* ------------------------------------------------------------------ */
/* Intensity models                                                    */
/* ------------------------------------------------------------------ */

/* spec: "homog" | "kernel" | "kernel:<bandwidth>" | "grid:<csv path>".
 * Appending "+labels" (e.g. "kernel+labels") adds per-label kernel factors
 * for the discrete auxiliary mark; otherwise label frequencies are spatially
 * constant. */
FMPP_API fmpp_status fmpp_intensity_fit(const fmpp_pattern* p,
                                        const char* spec,
                                        fmpp_intensity** out);

/* Ground intensity at a location (label < 0 means no auxiliary factor). */
FMPP_API fmpp_status fmpp_intensity_eval(const fmpp_intensity* m, double x,
                                         double y, int label, double* out);

FMPP_API void fmpp_intensity_destroy(fmpp_intensity* m);

/* ------------------------------------------------------------------ */
/* K-function queries                                                  */
/* ------------------------------------------------------------------ */

FMPP_API fmpp_status fmpp_query_new(int order, fmpp_query** out); /* order 2|3 */
FMPP_API void fmpp_query_destroy(fmpp_query* q);

FMPP_API fmpp_status fmpp_query_set_rgrid(fmpp_query* q, const double* r,
                                          size_t n);

/* Test function spec, e.g. "one", "lp:2", "sup", "kl", "inner", "deriv:1",
 * "vario", "aux-prod", "aux-vario", sums "vario+aux-prod" and
 * "max(lp:2,aux-vario)". */
FMPP_API fmpp_status fmpp_query_set_test_function(fmpp_query* q,
                                                  const char* spec);

/* slot 0 is the conditioning mark set, slots 1..order-1 the neighbour sets.
 * Syntax: "all" | "label-in:1,2" | "scalar-in:lo,hi" |
 * "sup-above:c" | "sup-below:c" | "int-above:c" | "int-below:c";
 * aux and functional predicates combine with "&". */
FMPP_API fmpp_status fmpp_query_set_mark_set(fmpp_query* q, int slot,
                                             const char* spec);

/* Structuring element template for neighbour i (0-based):
 * "ball" | "sector:<phi>,<psi>" | "box:<ax>,<ay>" (half-widths ax*r, ay*r). */
FMPP_API fmpp_status fmpp_query_set_elem(fmpp_query* q, int i,
                                         const char* spec);

/* "minus" | "trans" | "iso" | "none" */
FMPP_API fmpp_status fmpp_query_set_correction(fmpp_query* q,
                                               const char* name);

/* "raw" | "hamilton" | "ground" */
FMPP_API fmpp_status fmpp_query_set_normalization(fmpp_query* q,
                                                  const char* name);

/* ------------------------------------------------------------------ */
/* Estimation                                                          */
/* ------------------------------------------------------------------ */

/* n_threads <= 0 picks a default. */
FMPP_API fmpp_status fmpp_estimate_k(const fmpp_pattern* p,
                                     const fmpp_query* q,
                                     const fmpp_intensity* m, int n_threads,
                                     fmpp_kresult** out);

FMPP_API size_t fmpp_kresult_size(const fmpp_kresult* k);
FMPP_API double fmpp_kresult_r(const fmpp_kresult* k, size_t i);
/* NaN when the value is unavailable at that r (e.g. empty erosion). */
FMPP_API double fmpp_kresult_value(const fmpp_kresult* k, size_t i);
FMPP_API int fmpp_kresult_available(const fmpp_kresult* k, size_t i);
FMPP_API long long fmpp_kresult_count(const fmpp_kresult* k, size_t i);
FMPP_API double fmpp_kresult_normalizer(const fmpp_kresult* k, size_t i);
/* 1 when the conditioning mark set selected no points. */
FMPP_API int fmpp_kresult_empty_conditioning(const fmpp_kresult* k);
/* Data-quality metric: contributing tuples whose intensity hit the
 * evaluation floor. */
FMPP_API long long fmpp_kresult_floored_tuples(const fmpp_kresult* k);
FMPP_API fmpp_status fmpp_kresult_write_csv(const fmpp_kresult* k,
                                            const char* path);
FMPP_API void fmpp_kresult_destroy(fmpp_kresult* k);

/* Minimum-contrast fit of a parametric K model against an estimate.
 * model(ctx, r, theta) evaluates the model curve. theta has dim entries;
 * lo/hi bound the search box. Contrast integrates
 * |K(r;theta)^q_exp - Khat(r)^q_exp|^p_exp over [r_min, r_max]. */
typedef double (*fmpp_model_fn)(void* ctx, double r, const double* theta);
FMPP_API fmpp_status fmpp_min_contrast(const fmpp_kresult* k,
                                       fmpp_model_fn model, void* ctx,
                                       int dim, const double* lo,
                                       const double* hi, double p_exp,
                                       double q_exp, double r_min,
                                       double r_max, double* theta_out,
                                       double* contrast_out);

/* ------------------------------------------------------------------ */
/* Envelopes                                                           */
/* ------------------------------------------------------------------ */

/* null_model: "poisson" (relocate ground, marks kept in order; append
 * ":inhom" to redraw locations from the fitted intensity) | "relabel"
 * (permute mark assignments). intensity_spec as in fmpp_intensity_fit;
 * it is refitted on every replicate. transform: "identity" | "cbrt". */
FMPP_API fmpp_status fmpp_run_envelope(const fmpp_pattern* p,
                                       const fmpp_query* q,
                                       const char* intensity_spec,
                                       const char* null_model, int n_sim,
                                       uint64_t seed, const char* transform,
                                       int n_threads, fmpp_envelope** out);

FMPP_API size_t fmpp_envelope_size(const fmpp_envelope* e);
FMPP_API double fmpp_envelope_r(const fmpp_envelope* e, size_t i);
FMPP_API double fmpp_envelope_stat(const fmpp_envelope* e, size_t i);
FMPP_API double fmpp_envelope_lo(const fmpp_envelope* e, size_t i);
FMPP_API double fmpp_envelope_hi(const fmpp_envelope* e, size_t i);
FMPP_API double fmpp_envelope_mean(const fmpp_envelope* e, size_t i);
FMPP_API int fmpp_envelope_available(const fmpp_envelope* e, size_t i);
FMPP_API fmpp_status fmpp_envelope_write_csv(const fmpp_envelope* e,
                                             const char* path);
FMPP_API void fmpp_envelope_destroy(fmpp_envelope* e);

/* ------------------------------------------------------------------ */
/* Simulation                                                          */
/* ------------------------------------------------------------------ */

/* ground: "poisson:<rate>" | "binomial:<n>" |
 *         "lgcp:mu=..,sig2=..,phi=..[,res=..]".
 * marks:  "brownian:sigma=..[,start=..]" |
 *         "geostat:phis=..,phit=..[,sigma=..,mean=..]" |
 *         "intdep:a=..,b=..[,sigeps=..]" |
 *         "gi:lambda=..,K=..,c=..,sigint=..,mu=..[,signoise=..,dt=..,f0=..]".
 * grid: time grid t0,t0+dt,... given as start/stop/step. */
FMPP_API fmpp_status fmpp_simulate(const fmpp_window* w, const char* ground,
                                   const char* marks, double grid_start,
                                   double grid_stop, double grid_step,
                                   uint64_t seed, fmpp_pattern** out);

/* Replace curves by local K LISA curves computed on the ground pattern:
 * curve value at h = number of other points within distance h. */
FMPP_API fmpp_status fmpp_lisa(const fmpp_pattern* p, const double* h_grid,
                               size_t n_h, fmpp_pattern** out);

/* Fraction of the window covered by the union of disks B[x_i, F_i(t)],
 * radii read off each curve at the grid time nearest to t. */
FMPP_API fmpp_status fmpp_coverage_fraction(const fmpp_pattern* p, double t,
                                            int resolution, double* out);

/* ------------------------------------------------------------------ */
/* Self test                                                           */
/* ------------------------------------------------------------------ */

/* Monte Carlo estimator checks at reduced replicate counts. Writes a
 * human-readable report into buf (truncated to cap, always NUL-terminated)
 * and the number of failed checks into n_failed. */
FMPP_API fmpp_status fmpp_selftest(int replicates, uint64_t seed, char* buf,
                                   size_t cap, int* n_failed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FMPP_H */
