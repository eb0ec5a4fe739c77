/* soliton — toric H-functional toolkit, C API.
 *
 * Opaque handles plus status codes. Scalar results come back through out
 * parameters; structured results come back as JSON strings allocated by the
 * library (release them with soliton_string_free). Every call returns
 * SOLITON_OK on success; on failure the thread-local message from
 * soliton_last_error() describes what went wrong.
 */

#ifndef SOLITON_H
#define SOLITON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOLITON_API __declspec(dllexport)
#else
#define SOLITON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct soliton_germ soliton_germ;

typedef enum soliton_status {
  SOLITON_OK = 0,
  SOLITON_ERR_INVALID_ARGUMENT = 1,
  SOLITON_ERR_PARSE = 2,
  SOLITON_ERR_SPEC_INVALID = 3,
  SOLITON_ERR_REEB_VIOLATION = 4,
  SOLITON_ERR_NO_CONVERGENCE = 5,
  SOLITON_ERR_UNBOUNDED = 6,
  SOLITON_ERR_INFEASIBLE = 7,
  SOLITON_ERR_UNSUPPORTED = 8,
  SOLITON_ERR_PIPELINE = 9,
  SOLITON_ERR_INTERNAL = 10
} soliton_status;

SOLITON_API const char* soliton_version(void);

/* Thread-local message for the most recent failing call on this thread. */
SOLITON_API const char* soliton_last_error(void);

SOLITON_API void soliton_string_free(char* s);

/* ---- germ handles ------------------------------------------------------ */

/* Parse and validate a germ-spec JSON document (schema_version 1). */
SOLITON_API soliton_status soliton_germ_from_json(const char* json, soliton_germ** out);
SOLITON_API void soliton_germ_free(soliton_germ* germ);
SOLITON_API int soliton_germ_dim(const soliton_germ* germ);

/* Moment polyhedron, recession rays and Reeb cone generators as JSON. */
SOLITON_API soliton_status soliton_germ_describe(const soliton_germ* germ, char** json_out);

/* Echo the parsed spec back as canonical germ-spec JSON. */
SOLITON_API soliton_status soliton_germ_spec_json(const soliton_germ* germ, char** json_out);

/* ---- H-functional surface ---------------------------------------------- */

SOLITON_API soliton_status soliton_h_eval(const soliton_germ* germ, const double* xi, double* out);
SOLITON_API soliton_status soliton_grad_h(const soliton_germ* germ, const double* xi, double* out);
SOLITON_API soliton_status soliton_a_wt(const soliton_germ* germ, const double* xi, double* out);
SOLITON_API soliton_status soliton_futaki(const soliton_germ* germ, const double* xi0,
                                          const double* eta, double* out);
SOLITON_API soliton_status soliton_ding(const soliton_germ* germ, const double* xi0, const double* xi,
                                        double* out);
SOLITON_API soliton_status soliton_dh_cdf(const soliton_germ* germ, const double* xi, double t,
                                          double* out);
SOLITON_API soliton_status soliton_normalize_scale(const soliton_germ* germ, const double* xi,
                                                   double* out);

SOLITON_API soliton_status soliton_minimize(const soliton_germ* germ, double tol, int max_iters,
                                            double* xi0, double* h_value, double* gradient_norm,
                                            double* hessian_min_eig, int* newton_iters);

SOLITON_API soliton_status soliton_delta_toric(const soliton_germ* germ, const double* xi0, double tol,
                                               int starts, double* delta, double* argmin);

/* ---- A^n monomial valuations ------------------------------------------- */

SOLITON_API soliton_status soliton_affine_weighted_vol(int n, const double* xi, double* out);
/* a_star: critical rescale; a_norm: log discrepancy after rescaling. */
SOLITON_API soliton_status soliton_affine_normalize(int n, const double* xi, double* a_star,
                                                    double* a_norm);
/* lct of the monomial ideal with `ngens` exponent rows, as "p/q". */
SOLITON_API soliton_status soliton_lct_monomial(int n, int ngens, const long* exponents,
                                                char** lct_out);

/* ---- JSON commands (the CLI surface) ------------------------------------ */

/* {"germ":{...},"xi":[...]} or {"an":n,"xi":[...]} */
SOLITON_API soliton_status soliton_okounkov_json(const char* valuation_json, char** json_out);
SOLITON_API soliton_status soliton_slope_json(const char* valuation_json, long m_max, double tol,
                                              char** json_out);
/* ms: array of degrees, may be NULL/0; t_max <= 0 means bounded default. */
SOLITON_API soliton_status soliton_dh_profile_json(const char* valuation_json, const long* ms,
                                                   int n_ms, int with_limit, double t_max,
                                                   char** json_out);
SOLITON_API soliton_status soliton_pipeline_json(const char* request_json, char** json_out);
SOLITON_API soliton_status soliton_verify_json(const char* suite, int quick, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SOLITON_H */
