/* C interface to the sturmian library.  All handles are opaque; every call
 * returns a sturm_status and sturm_last_error() describes the last failure
 * on the calling thread. */
#ifndef STURMIAN_H
#define STURMIAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(STURM_BUILDING)
#define STURM_API __attribute__((visibility("default")))
#else
#define STURM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  STURM_OK = 0,
  STURM_E_ARG = 1,      /* bad argument or parse failure */
  STURM_E_NUMERIC = 2,  /* non-convergence, precision exhausted, overflow */
  STURM_E_VERIFY = 3,   /* a verification suite reported failures */
  STURM_E_INTERNAL = 4
} sturm_status;

typedef struct sturm_cf sturm_cf;
typedef struct sturm_intervals sturm_intervals;
typedef struct sturm_map sturm_map;
typedef struct sturm_graph sturm_graph;

typedef struct {
  double x1, x2, x3;
} sturm_triple;

STURM_API const char* sturm_last_error(void);
STURM_API const char* sturm_version(void);
STURM_API void sturm_string_free(char* s);

/* continued fractions */
STURM_API sturm_status sturm_cf_parse(const char* spec, sturm_cf** out);
STURM_API void sturm_cf_free(sturm_cf* cf);
STURM_API sturm_status sturm_cf_describe(const sturm_cf* cf, char** out);
/* writes up to n digits; *written < n only for finite expansions */
STURM_API sturm_status sturm_cf_digits(const sturm_cf* cf, size_t n, unsigned* digits, size_t* written);
STURM_API sturm_status sturm_cf_value(const sturm_cf* cf, double* out);
STURM_API sturm_status sturm_cf_expand(double x, size_t n, unsigned* digits);
/* JSON array of {"k","p","q"} with decimal strings */
STURM_API sturm_status sturm_convergents_json(const sturm_cf* cf, size_t n, char** out);
STURM_API sturm_status sturm_three_distance(double alpha, size_t n, double* lengths, size_t cap, size_t* count);
STURM_API sturm_status sturm_covering_bound(const unsigned* alphabet, size_t len, double eps, uint64_t* n);

/* trace maps and orbits */
STURM_API sturm_status sturm_trace_map(unsigned a, sturm_triple p, sturm_triple* out);
STURM_API double sturm_fricke(sturm_triple p);
STURM_API sturm_triple sturm_spectral_line_point(double lambda, double energy);

typedef enum { STURM_ORBIT_BOUNDED = 0, STURM_ORBIT_ESCAPED = 1, STURM_ORBIT_LEFT_REGION = 2 } sturm_orbit_status;

typedef struct {
  sturm_orbit_status status;
  size_t steps;
  double max_norm;
  long long exit_index; /* -1 when the orbit never left the region */
} sturm_orbit;

/* rho <= 0 disables the survival region; bound <= 0 selects 1 + lambda */
STURM_API sturm_status sturm_orbit_classify(double lambda, double energy, const sturm_cf* cf, size_t max_steps,
                                            double escape_threshold, double rho, double bound, sturm_orbit* out);

typedef struct {
  double lambda;
  double resolution;
  size_t max_steps;
  double escape_threshold;
  unsigned threads; /* 0: STURMIAN_THREADS or hardware concurrency */
} sturm_spectrum_opts;

STURM_API void sturm_spectrum_opts_init(sturm_spectrum_opts* o);
STURM_API sturm_status sturm_spectrum(const sturm_cf* cf, const sturm_spectrum_opts* o, sturm_intervals** out,
                                      size_t* undecided);
STURM_API sturm_status sturm_survival(const sturm_cf* cf, const sturm_spectrum_opts* o, double rho, double bound,
                                      sturm_intervals** out, size_t* undecided);

/* interval sets */
STURM_API sturm_status sturm_intervals_new(const double* left, const double* right, size_t n, double gap_floor,
                                           sturm_intervals** out);
STURM_API void sturm_intervals_free(sturm_intervals* s);
STURM_API size_t sturm_intervals_size(const sturm_intervals* s);
STURM_API sturm_status sturm_intervals_get(const sturm_intervals* s, size_t i, double* left, double* right);
STURM_API double sturm_intervals_measure(const sturm_intervals* s);
/* neighbourhood of radius `dilate` (may be 0) before measuring thickness; tau < 0 encodes +infinity */
STURM_API sturm_status sturm_thickness(const sturm_intervals* s, double dilate, double* tau, double* dim_lower);
STURM_API sturm_status sturm_box_dimension(const sturm_intervals* s, const double* scales, size_t n, double* dim,
                                           double* r2);

/* torus model */
STURM_API sturm_status sturm_semiconjugacy(double x, double y, sturm_triple* out);
/* exact is "num/den" of the slope; pass NULL to skip */
STURM_API sturm_status sturm_stable_slope(const unsigned* digits, size_t n, double* slope, char** exact);

typedef struct {
  int invariant;
  double min_expansion;
  double max_expansion;
  double mu_bar;
} sturm_cone_report;

STURM_API double sturm_initial_beta(void);
STURM_API sturm_status sturm_cone_check(double beta, unsigned a, sturm_cone_report* out);

typedef struct {
  double blend_inner;
  double blend_outer;
  double projection_tol;
  double branch_window;
  double lambda_guard;
  int override_guard;
  double rho;
} sturm_map_opts;

STURM_API void sturm_map_opts_init(sturm_map_opts* o);
STURM_API sturm_status sturm_map_new(double lambda, unsigned a, const sturm_map_opts* o, sturm_map** out);
STURM_API void sturm_map_free(sturm_map* m);
STURM_API sturm_status sturm_map_eval(const sturm_map* m, double x, double y, double* ox, double* oy);

/* Property (C) over the maps for each digit in the alphabet; report as JSON */
STURM_API sturm_status sturm_property_c(double lambda, const unsigned* alphabet, size_t len, size_t grid, double delta,
                                        double beta, const sturm_map_opts* o, unsigned threads, char** json);

STURM_API sturm_status sturm_stable_manifold(double lambda, const sturm_cf* cf, size_t m, size_t depth, double tol,
                                             const sturm_map_opts* o, unsigned threads, sturm_graph** out);
STURM_API void sturm_graph_free(sturm_graph* g);
STURM_API size_t sturm_graph_size(const sturm_graph* g);
/* t: chart coordinate along V-perp; (x, y): the point in the plane */
STURM_API sturm_status sturm_graph_sample(const sturm_graph* g, size_t i, double* t, double* x, double* y);
STURM_API sturm_status sturm_graph_info(const sturm_graph* g, double* slope, size_t* depth_used, double* lipschitz,
                                        double* last_increment);

STURM_API sturm_status sturm_common_orbit(double lambda, const sturm_cf* cf, size_t n, const sturm_map_opts* o,
                                          int* equal, size_t* orbit_size, double* max_deviation);

/* runs the invariant suite; JSON {"passed": bool, "checks": [...]}; STURM_E_VERIFY on any failure */
STURM_API sturm_status sturm_verify(uint64_t seed, unsigned threads, char** json);

#ifdef __cplusplus
}
#endif

#endif
