/* C interface to the diffraction library: exact golden-ratio integer
 * arithmetic, point-set generators, closed-form diffraction measures, and
 * finite-patch spectral estimators. All objects are opaque handles created
 * by df_* constructors and released with the matching *_free. Functions
 * returning df_status never throw across the boundary; on failure they
 * return a nonzero code and leave a message in df_last_error(). */

#ifndef DIFFRACT_H
#define DIFFRACT_H

#include <stddef.h>
#include <stdint.h>

#ifndef DIFFRACT_API
#  if defined(_WIN32)
#    ifdef DIFFRACT_BUILD
#      define DIFFRACT_API __declspec(dllexport)
#    else
#      define DIFFRACT_API __declspec(dllimport)
#    endif
#  else
#    define DIFFRACT_API __attribute__((visibility("default")))
#  endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum df_status {
  DF_OK = 0,
  DF_ERR_INVALID = 1,  /* bad argument or unsatisfied precondition */
  DF_ERR_OVERFLOW = 2, /* exact integer arithmetic left the safe range */
  DF_ERR_RUNTIME = 3,  /* evaluation failed (including cross-check drift) */
  DF_ERR_IO = 4        /* file missing, unreadable, or malformed */
} df_status;

typedef enum df_norm { DF_NORM_DENSITY = 0, DF_NORM_BRAGG = 1 } df_norm;

typedef enum df_metric { DF_METRIC_L1REL = 0, DF_METRIC_MAXREL = 1 } df_metric;

typedef enum df_ensemble {
  DF_ENSEMBLE_BERNOULLI = 0,
  DF_ENSEMBLE_RUDIN_SHAPIRO = 1,
  DF_ENSEMBLE_RS_BERNOULLI = 2,
  DF_ENSEMBLE_RANDOM_FIBONACCI = 3
} df_ensemble;

typedef struct df_comb df_comb;         /* weighted point set on a patch */
typedef struct df_spectrum df_spectrum; /* diffraction measure component(s) */
typedef struct df_estimate df_estimate; /* periodogram values on a grid */
typedef struct df_autocorr df_autocorr; /* pair-coefficient table */
typedef struct df_distfn df_distfn;     /* cumulative distribution samples */

/* Cut-and-project data: lattice generators a+b*tau and a half-open
 * window (lo, hi] with endpoints lo_num/lo_den, hi_num/hi_den where the
 * numerators are again a+b*tau and the denominators positive integers. */
typedef struct df_cps_params {
  int64_t gen1_a, gen1_b;
  int64_t gen2_a, gen2_b;
  int64_t lo_num_a, lo_num_b, lo_den;
  int64_t hi_num_a, hi_num_b, hi_den;
} df_cps_params;

/* ---- library info and errors ---- */

DIFFRACT_API const char* df_version(void);

/* Message for the most recent failure on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread. */
DIFFRACT_API const char* df_last_error(void);

/* ---- exact arithmetic in Z[tau], elements stored as (a, b) = a+b*tau ---- */

DIFFRACT_API df_status df_golden_embed(int64_t a, int64_t b, double* out);
DIFFRACT_API df_status df_golden_star(int64_t a, int64_t b, int64_t* out_a,
                                      int64_t* out_b);
DIFFRACT_API df_status df_golden_add(int64_t xa, int64_t xb, int64_t ya,
                                     int64_t yb, int64_t* out_a, int64_t* out_b);
DIFFRACT_API df_status df_golden_sub(int64_t xa, int64_t xb, int64_t ya,
                                     int64_t yb, int64_t* out_a, int64_t* out_b);
DIFFRACT_API df_status df_golden_mul(int64_t xa, int64_t xb, int64_t ya,
                                     int64_t yb, int64_t* out_a, int64_t* out_b);
/* Exact three-way comparison by embedded value: out is -1, 0, or +1. */
DIFFRACT_API df_status df_golden_cmp(int64_t xa, int64_t xb, int64_t ya,
                                     int64_t yb, int* out);
/* Canonical text form "a+b*tau"; parse inverts it exactly. */
DIFFRACT_API df_status df_golden_to_string(int64_t a, int64_t b, char* buf,
                                           size_t buflen);
DIFFRACT_API df_status df_golden_parse(const char* text, int64_t* out_a,
                                       int64_t* out_b);

/* Decorrelated per-stream seed derived from a master seed; pure function. */
DIFFRACT_API uint64_t df_seed_stream(uint64_t master, uint64_t index);

/* ---- generators ---- */

/* Lattice-plus-motif crystal patch inside the closed ball |x| <= radius.
 * basis is column-major dim x dim; fracs holds natoms*dim fractional
 * coordinates in [0,1); weights holds natoms (re, im) pairs. */
DIFFRACT_API df_status df_gen_crystal(int dim, const double* basis,
                                      size_t natoms, const double* fracs,
                                      const double* weights, double radius,
                                      df_comb** out);

/* Model set on [lo, hi]: all lattice points whose internal image falls in
 * the window. cps == NULL selects generators 1, tau with window
 * (-1, tau-1], the Fibonacci chain. */
DIFFRACT_API df_status df_gen_model_set(const df_cps_params* cps, double lo,
                                        double hi, df_comb** out);
DIFFRACT_API void df_cps_fibonacci(df_cps_params* out);

/* Thue-Morse word of length 2^n as +-1 weights on 0..2^n-1 (0 <= n <= 24). */
DIFFRACT_API df_status df_gen_thue_morse(int n, df_comb** out);

/* Rudin-Shapiro +-1 weights on the integers lo..hi (two-sided recursion). */
DIFFRACT_API df_status df_gen_rudin_shapiro(int64_t lo, int64_t hi,
                                            df_comb** out);
DIFFRACT_API df_status df_rudin_shapiro_weight(int64_t n, int* out);

/* i.i.d. +1 (probability p) / -1 weights on lo..hi. */
DIFFRACT_API df_status df_gen_bernoulli(uint64_t seed, double p, int64_t lo,
                                        int64_t hi, df_comb** out);

/* Rudin-Shapiro sign times an independent +-1 draw per site. */
DIFFRACT_API df_status df_gen_rs_bernoulli(uint64_t seed, double p, int64_t lo,
                                           int64_t hi, df_comb** out);

/* Left endpoints of `count` random tiles of length tau (probability p)
 * or 1, starting at 0; positions are exact elements of Z[tau]. */
DIFFRACT_API df_status df_gen_random_fibonacci(uint64_t seed, double p,
                                               int64_t count, df_comb** out);

/* ---- comb accessors ---- */

DIFFRACT_API void df_comb_free(df_comb* comb);
DIFFRACT_API size_t df_comb_size(const df_comb* comb);
DIFFRACT_API int df_comb_dim(const df_comb* comb);
DIFFRACT_API double df_comb_volume(const df_comb* comb);
DIFFRACT_API int df_comb_has_exact(const df_comb* comb);
/* xyz receives dim coordinates. */
DIFFRACT_API df_status df_comb_position(const df_comb* comb, size_t i,
                                        double* xyz);
DIFFRACT_API df_status df_comb_weight(const df_comb* comb, size_t i,
                                      double* re, double* im);
/* Exact coordinates a+b*tau; fails unless the comb carries them. */
DIFFRACT_API df_status df_comb_exact(const df_comb* comb, size_t i, int64_t* a,
                                     int64_t* b);
/* lo and hi each receive dim patch bounds. */
DIFFRACT_API df_status df_comb_patch(const df_comb* comb, double* lo,
                                     double* hi);
DIFFRACT_API df_status df_comb_write_csv(const df_comb* comb, const char* path);
DIFFRACT_API df_status df_comb_read_csv(const char* path, df_comb** out);

/* ---- closed-form diffraction ---- */

/* Point spectrum of a crystal: peaks on the dual lattice within |k| <= kmax
 * with structure-factor intensities. Arguments as in df_gen_crystal. */
DIFFRACT_API df_status df_crystal_diffraction(int dim, const double* basis,
                                              size_t natoms, const double* fracs,
                                              const double* weights, double kmax,
                                              df_spectrum** out);

/* |1 + alpha e^{-2 pi i (k1 a + k2 b)}|^2, the two-atom structure factor
 * on the integer lattice in the plane. */
DIFFRACT_API df_status df_two_atom_intensity(double k1, double k2,
                                             double alpha_re, double alpha_im,
                                             double a, double b, double* out);

/* Bragg spectrum of a model set: peaks with intensity >= threshold and
 * |k| <= kmax. threshold == 0 keeps everything above a fixed relative
 * floor so the output stays finite. cps == NULL as in df_gen_model_set. */
DIFFRACT_API df_status df_model_set_spectrum(const df_cps_params* cps,
                                             double kmax, double threshold,
                                             df_spectrum** out);

/* Peak intensity of the Fibonacci chain at k = (a + b*tau)/sqrt(5). */
DIFFRACT_API df_status df_fibonacci_intensity(int64_t a, int64_t b, double* out);

/* Partial product prod_{n<depth} (1 - cos(2^{n+1} pi k)). */
DIFFRACT_API df_status df_tm_riesz_partial(double k, int depth, double* out);

/* g_n(k) = prod_{j<n} (1 - e^{-2 pi i 2^j k}). */
DIFFRACT_API df_status df_tm_exponential_sum(double k, int n, double* re,
                                             double* im);

/* Cumulative distribution of the Thue-Morse spectral mass on [0,1],
 * cross-checked between a quadrature route and a Fourier-series route;
 * fails with DF_ERR_RUNTIME if the two disagree beyond 1e-3. */
DIFFRACT_API df_status df_tm_distribution(int depth, int gridsize,
                                          df_distfn** out);

/* Constant density 1 sampled on gridsize points of [kmin, kmax]. */
DIFFRACT_API df_status df_rs_diffraction(double kmin, double kmax, int gridsize,
                                         df_spectrum** out);

/* Continuous diffraction density of the random Fibonacci tiling. */
DIFFRACT_API df_status df_random_fibonacci_density(double k, double* out);
DIFFRACT_API df_status df_random_fibonacci_spectrum(double kmin, double kmax,
                                                    int gridsize,
                                                    df_spectrum** out);

/* Same density discretized the way ensemble estimates are: value j is the
 * mean over substeps sub-frequencies of bin [kmin + j dk, kmin + (j+1) dk),
 * reported at the bin left edge. Use as the reference when comparing
 * against df_ensemble_periodogram output on the same bins. */
DIFFRACT_API df_status df_random_fibonacci_binavg(double kmin, double dk,
                                                  int bins, int substeps,
                                                  df_spectrum** out);

/* ---- spectrum accessors ---- */

DIFFRACT_API void df_spectrum_free(df_spectrum* m);
DIFFRACT_API int df_spectrum_dim(const df_spectrum* m);
DIFFRACT_API size_t df_spectrum_peak_count(const df_spectrum* m);
/* k receives dim coordinates. */
DIFFRACT_API df_status df_spectrum_peak(const df_spectrum* m, size_t i,
                                        double* k, double* intensity);
DIFFRACT_API size_t df_spectrum_density_count(const df_spectrum* m);
DIFFRACT_API df_status df_spectrum_density(const df_spectrum* m, size_t i,
                                           double* k, double* value);
/* Peaks with intensity >= threshold (> 0), in position order. */
DIFFRACT_API df_status df_spectrum_threshold(const df_spectrum* m,
                                             double threshold,
                                             df_spectrum** out);
DIFFRACT_API df_status df_spectrum_write_csv(const df_spectrum* m,
                                             const char* path);
DIFFRACT_API df_status df_spectrum_read_csv(const char* path,
                                            df_spectrum** out);

/* ---- distribution function accessors ---- */

DIFFRACT_API void df_distfn_free(df_distfn* f);
DIFFRACT_API size_t df_distfn_size(const df_distfn* f);
DIFFRACT_API df_status df_distfn_point(const df_distfn* f, size_t i, double* k,
                                       double* value);
DIFFRACT_API df_status df_distfn_method(const df_distfn* f, char* buf,
                                        size_t buflen);
/* Uniform gap between the two construction routes. */
DIFFRACT_API double df_distfn_disagreement(const df_distfn* f);
DIFFRACT_API df_status df_distfn_write_csv(const df_distfn* f, const char* path);

/* ---- finite-patch estimation ---- */

/* Pair coefficients of all displacements up to maxdist, normalized by the
 * patch volume; displacements grouped exactly when positions are exact. */
DIFFRACT_API df_status df_autocorrelation(const df_comb* comb, double maxdist,
                                          df_autocorr** out);
DIFFRACT_API void df_autocorr_free(df_autocorr* t);
DIFFRACT_API size_t df_autocorr_size(const df_autocorr* t);
/* z receives dim coordinates of the displacement. */
DIFFRACT_API df_status df_autocorr_entry(const df_autocorr* t, size_t i,
                                         double* z, double* re, double* im);
DIFFRACT_API df_status df_autocorr_write_csv(const df_autocorr* t,
                                             const char* path);

/* |sum_x w(x) e^{-2 pi i k x}|^2 at each grid value (strictly increasing),
 * divided by the patch volume (density) or its square (bragg). */
DIFFRACT_API df_status df_periodogram(const df_comb* comb, const double* grid,
                                      size_t gridlen, df_norm norm,
                                      df_estimate** out);

/* Mean periodogram over `realizations` draws; each output bin averages
 * `substeps` sub-frequencies kmin + j*dk + i*dk/substeps. Seeds derive
 * from master_seed, so reruns reproduce results bit for bit. */
DIFFRACT_API df_status df_ensemble_periodogram(df_ensemble system, double p,
                                               int64_t size, uint64_t master_seed,
                                               double kmin, double dk, int bins,
                                               int substeps, int realizations,
                                               df_norm norm, df_estimate** out);

/* Least-squares slope of log |S(k)|^2 against log volume over a growing
 * family (at least 4 combs, volumes strictly increasing). */
DIFFRACT_API df_status df_scaling_exponent(const df_comb* const* family,
                                           size_t count, double k, double* out);

/* Error of an estimate against the matching reference component on
 * [lo, hi]; bragg estimates compare at reference peaks, density ones
 * pointwise against the interpolated density. */
DIFFRACT_API df_status df_compare(const df_estimate* est, const df_spectrum* ref,
                                  double lo, double hi, df_metric metric,
                                  double* out);

/* Reinterpret an estimate as a reference measure: density values become a
 * sampled density, bragg values a list of peaks. */
DIFFRACT_API df_status df_estimate_as_reference(const df_estimate* est,
                                                df_spectrum** out);

/* ---- estimate accessors ---- */

DIFFRACT_API void df_estimate_free(df_estimate* est);
DIFFRACT_API size_t df_estimate_size(const df_estimate* est);
DIFFRACT_API df_status df_estimate_point(const df_estimate* est, size_t i,
                                         double* k, double* value);
DIFFRACT_API df_norm df_estimate_norm(const df_estimate* est);
DIFFRACT_API double df_estimate_volume(const df_estimate* est);
DIFFRACT_API int df_estimate_realizations(const df_estimate* est);
DIFFRACT_API df_status df_estimate_write_csv(const df_estimate* est,
                                             const char* path);
DIFFRACT_API df_status df_estimate_read_csv(const char* path,
                                            df_estimate** out);

/* ---- files ---- */

/* FNV-1a 64-bit digest of the file's bytes as 16 hex digits plus NUL. */
DIFFRACT_API df_status df_file_digest(const char* path, char out_hex[17]);

#ifdef __cplusplus
}
#endif

#endif /* DIFFRACT_H */
