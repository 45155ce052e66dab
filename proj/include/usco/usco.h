/* C interface to the USCO solver library.
 *
 * Every function returns a usco_status. On failure the message is available
 * from usco_last_error() on the calling thread until the next call. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with usco_string_free(). Option arguments are JSON objects; NULL
 * or "" means "all defaults".
 */
#ifndef USCO_USCO_H
#define USCO_USCO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define USCO_API __declspec(dllexport)
#else
#define USCO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum usco_status {
  USCO_OK = 0,
  USCO_ERR_DOMAIN = 1,
  USCO_ERR_DIMENSION = 2,
  USCO_ERR_FEASIBILITY = 3,
  USCO_ERR_NO_SOLUTION = 4,
  USCO_ERR_PARSE = 5,
  USCO_ERR_IO = 6,
  USCO_ERR_CONVERGENCE = 7,
  USCO_ERR_CONFIG = 8,
  USCO_ERR_FORMAT = 9,
  USCO_ERR_INVALID_ARGUMENT = 10,
  USCO_ERR_INTERNAL = 11
} usco_status;

typedef struct usco_model usco_model;

USCO_API const char* usco_version(void);
USCO_API const char* usco_last_error(void);
USCO_API const char* usco_status_name(usco_status status);
USCO_API void usco_string_free(char* s);

/* family: "ssp", "ssc" or "sbm".
 * params  ssp: {"levels", "edges"} or {"dimacs": path, "undirected": bool}
 *         ssc: {"left", "right", "min_degree", "max_degree", "pair_scale", "pair_exponent"}
 *         sbm: {"n", "pair_scale", "pair_exponent"} */
USCO_API usco_status usco_gen_instance(const char* family, const char* params_json, uint64_t seed,
                                       const char* out_path);
USCO_API usco_status usco_gen_pool(const char* instance_path, const char* dist, uint64_t pool_size,
                                   uint64_t seed, int inline_payload, const char* out_path);
USCO_API usco_status usco_gen_pairs(const char* instance_path, uint64_t count, uint64_t seed,
                                    const char* out_path);

/* options: {"k", "seed", "train_size", "c_reg", "eta", "margin_factor", "tol",
 *           "max_outer_iter", "inline", "log_path"}.
 * K configurations are drawn from the pool without replacement using "seed";
 * the first train_size pairs of the file are used (default: all). */
USCO_API usco_status usco_train(const char* instance_path, const char* pool_path,
                                const char* pairs_path, const char* options_json,
                                usco_model** out_model);
USCO_API usco_status usco_model_save(const usco_model* model, const char* path);
USCO_API usco_status usco_model_load(const char* path, usco_model** out_model);
USCO_API void usco_model_free(usco_model* model);
/* {"family", "sense", "alpha", "dist", "k", "train_size", "converged", "weights"} */
USCO_API usco_status usco_model_info(const usco_model* model, char** out_json);

/* input_json uses the family's input encoding:
 *   ssp [source, target]   ssc {"targets": [...], "k": k}   sbm {"left": [...], "right": [...]}
 * The solution is written in the family's solution encoding. With perturb != 0
 * the weights are drawn from N(beta * w, I) using `seed`, then clamped at 0. */
USCO_API usco_status usco_predict(const usco_model* model, const char* input_json, int perturb,
                                  uint64_t seed, char** out_solution_json);

/* config: {"instance", "pairs", "pools": [paths], "k": [..], "train_size",
 *          "test_size", "runs", "seed", "c_reg", "eta", "margin_factor", "tol",
 *          "perturb", "timing", "baselines", "dataset", "report"}.
 * "report" has the same meaning as for usco_reproduce. */
USCO_API usco_status usco_eval(const char* config_json, char** out_csv);

/* options: {"seed", "dist": [..], "k": [..], "runs", "train_size", "test_size",
 *           "c_reg", "eta", "margin_factor", "tol", "perturb", "timing", "baselines",
 *           "report": bool}. With "report" the output is a JSON document
 *           {"csv", "rows": [...], "runs": [...]} carrying per-row run
 *           counts and per-run diagnostics. */
USCO_API usco_status usco_reproduce(const char* family, const char* options_json, char** out);

USCO_API usco_status usco_compute_beta(const double* seed_weights, size_t count, int64_t m,
                                       double alpha, double* out_beta);
USCO_API usco_status usco_required_k(double lower, double upper, double c_ratio, double eps,
                                     double delta1, double delta2, double y_size,
                                     int64_t* out_k);

#ifdef __cplusplus
}
#endif

#endif
