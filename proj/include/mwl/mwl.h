#ifndef MWL_H
#define MWL_H

/* C interface to the membrane walk library.
 *
 * Conventions:
 *  - Functions returning int give 0 on success, one of the MWL_E_* codes on
 *    failure. On failure a message is copied (truncated, NUL terminated)
 *    into errbuf when errbuf is non-NULL and errbuf_len > 0.
 *  - Functions handing back a char** allocate the string with malloc; free
 *    it with mwl_string_free.
 *  - Handles from mwl_model_create are freed with mwl_model_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  MWL_OK = 0,
  MWL_E_INVALID_PMF = 1,
  MWL_E_NONZERO_MEAN = 2,
  MWL_E_ZERO_VARIANCE = 3,
  MWL_E_JUMP_OVER_MEMBRANE = 4,
  MWL_E_INVALID_PARAMETER = 5,
  MWL_E_INVALID_CONFIG = 6,
  MWL_E_BAND_TOO_SMALL = 7,
  MWL_E_NO_CONVERGENCE = 8,
  MWL_E_SINGULAR_SYSTEM = 9,
  MWL_E_DEGENERATE_DENOMINATOR = 10,
  MWL_E_GRID_BEYOND_HORIZON = 11,
  MWL_E_EMPTY_SAMPLE = 12,
  MWL_E_NON_POSITIVE_TIME = 13,
  MWL_E_IO_FAILURE = 14,
  MWL_E_INTERNAL = 15
};

typedef struct mwl_model mwl_model;

const char* mwl_version(void);

/* Stable lowercase name for an error code ("invalid_pmf", ...). */
const char* mwl_error_name(int code);

void mwl_string_free(char* s);

/* Model JSON shape:
 *   {"m": 1, "start": 0, "center": 0,
 *    "xi": [[-1, 0.5], [1, 0.5]],
 *    "eta": {"-1": [[1, 1.0]], "0": [[1, 0.75], [-1, 0.25]], "1": [[-1, 1.0]]}}
 * center and start default to 0. On failure returns NULL and stores the
 * error code in *code when code is non-NULL. */
mwl_model* mwl_model_create(const char* model_json, int* code, char* errbuf,
                            size_t errbuf_len);
void mwl_model_free(mwl_model* model);

/* *irreducible is set to 1/0; *report_json (optional, may be NULL) gets a
 * JSON object with the witness states and a reason string. */
int mwl_model_irreducible(const mwl_model* model, int* irreducible,
                          char** report_json, char* errbuf, size_t errbuf_len);

/* Exact permeability analysis. eta_eps and tol <= 0 pick the defaults
 * (1e-8, 1e-9). The result JSON carries gamma, e_plus, e_minus, pi,
 * sigma2 and a truncation report. */
int mwl_analyze(const mwl_model* model, double eta_eps, double tol,
                char** result_json, char* errbuf, size_t errbuf_len);

/* One walk of n steps; the result JSON is the excursion ledger summary
 * (martingale, boundary and membrane-visit totals plus the final position). */
int mwl_simulate(const mwl_model* model, int64_t n, uint64_t seed,
                 uint64_t stream, char** ledger_json, char* errbuf,
                 size_t errbuf_len);

/* Same walk, but also writes the visited positions to csv_path as
 * "step,position" rows (header included), one row per step 0..n. */
int mwl_simulate_dump_path(const mwl_model* model, int64_t n, uint64_t seed,
                           uint64_t stream, const char* csv_path,
                           char** ledger_json, char* errbuf,
                           size_t errbuf_len);

/* Full convergence study driven by a config JSON (see the README). The
 * report JSON is returned; files are also written when the config names an
 * output_dir. */
int mwl_run_convergence(const char* config_json, char** report_json,
                        char* errbuf, size_t errbuf_len);

/* Decomposition identity diagnostics across `paths` independent walks.
 * pairs_json selects the (s, t) increment windows as fractions of the
 * horizon, e.g. "[[0, 0.5], [0.5, 1]]"; NULL means [[0, 1]]. */
int mwl_run_diagnostics(const char* model_json, int64_t n, int64_t paths,
                        uint64_t seed, uint64_t stream_base,
                        const char* pairs_json, char** report_json,
                        char* errbuf, size_t errbuf_len);

/* Skew Brownian motion with permeability beta in [-1,1], diffusion sigma. */
int mwl_skewbm_density(double beta, double sigma, double t, double x, double y,
                       double* out, char* errbuf, size_t errbuf_len);
int mwl_skewbm_cdf(double beta, double sigma, double t, double x, double y,
                   double* out, char* errbuf, size_t errbuf_len);
int mwl_skewbm_quantile(double beta, double sigma, double t, double x, double u,
                        double* out, char* errbuf, size_t errbuf_len);

/* Markov path on a strictly increasing time grid; out must hold n_times
 * doubles. */
int mwl_skewbm_sample_path(double beta, double sigma, const double* times,
                           size_t n_times, uint64_t seed, uint64_t stream,
                           double* out, char* errbuf, size_t errbuf_len);

/* Excursion-flipping discrete approximation with n_steps walk steps; times
 * are fractions of the horizon in [0, 1]. */
int mwl_skewbm_flip_path(double beta, double sigma, int64_t n_steps,
                         const double* times, size_t n_times, uint64_t seed,
                         uint64_t stream, double* out, char* errbuf,
                         size_t errbuf_len);

#ifdef __cplusplus
}
#endif

#endif /* MWL_H */
