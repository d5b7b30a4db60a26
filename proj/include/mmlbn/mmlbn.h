/*
 * mmlbn C API: MML structure learning for discrete Bayesian networks.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Functions return an mmlbn_status; on failure mmlbn_last_error() holds a
 * thread-local diagnostic until the next call on the same thread.
 */
#ifndef MMLBN_H
#define MMLBN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMLBN_API __declspec(dllexport)
#else
#define MMLBN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmlbn_status {
  MMLBN_OK = 0,
  MMLBN_ERR_IO = 1,
  MMLBN_ERR_FORMAT = 2,
  MMLBN_ERR_MISSING_VALUE = 3,
  MMLBN_ERR_DEGENERATE_VARIABLE = 4,
  MMLBN_ERR_ARGUMENT = 5,
  MMLBN_ERR_CYCLE = 6,
  MMLBN_ERR_PARENT_CAP = 7,
  MMLBN_ERR_NO_ARC = 8,
  MMLBN_ERR_CAPACITY = 9,
  MMLBN_ERR_PARAMETER_CAP = 10,
  MMLBN_ERR_CONVERGENCE = 11,
  MMLBN_ERR_NULL_POINTER = 100,
  MMLBN_ERR_INTERNAL = 101
} mmlbn_status;

typedef enum mmlbn_policy {
  MMLBN_POLICY_TBN = 0,
  MMLBN_POLICY_FON = 1,
  MMLBN_POLICY_DUAL = 2
} mmlbn_policy;

typedef enum mmlbn_missing {
  MMLBN_MISSING_EXTRA_CATEGORY = 0,
  MMLBN_MISSING_REJECT = 1
} mmlbn_missing;

typedef struct mmlbn_sampler_config {
  uint64_t iterations;
  uint64_t burn_in;
  uint64_t seed;
  mmlbn_policy policy;
  double arc_prior;
  double sigma;
  int max_parents;
  size_t top_k;
} mmlbn_sampler_config;

typedef struct mmlbn_dataset mmlbn_dataset;
typedef struct mmlbn_report mmlbn_report;

MMLBN_API const char* mmlbn_version(void);
MMLBN_API const char* mmlbn_status_name(mmlbn_status status);
MMLBN_API const char* mmlbn_last_error(void);

/* Defaults: 200000 iterations, 10000 burn-in, seed 1, dual policy, arc prior
 * 0.5, sigma 3, 10 parents, top 10 classes. */
MMLBN_API void mmlbn_sampler_config_init(mmlbn_sampler_config* config);

MMLBN_API mmlbn_status mmlbn_dataset_load_csv(const char* path, mmlbn_missing missing,
                                              mmlbn_dataset** out);
/* Row-major values, rows x vars. */
MMLBN_API mmlbn_status mmlbn_dataset_from_rows(size_t vars, const int* arities, size_t rows,
                                               const int* values, mmlbn_dataset** out);
MMLBN_API void mmlbn_dataset_free(mmlbn_dataset* ds);
MMLBN_API size_t mmlbn_dataset_num_rows(const mmlbn_dataset* ds);
MMLBN_API size_t mmlbn_dataset_num_vars(const mmlbn_dataset* ds);
/* Returns 0 for an invalid handle or index. */
MMLBN_API int mmlbn_dataset_arity(const mmlbn_dataset* ds, size_t var);
MMLBN_API const char* mmlbn_dataset_var_name(const mmlbn_dataset* ds, size_t var);
MMLBN_API mmlbn_status mmlbn_dataset_split(const mmlbn_dataset* ds, double test_fraction,
                                           uint64_t seed, mmlbn_dataset** train,
                                           mmlbn_dataset** test);

MMLBN_API mmlbn_status mmlbn_learn(const mmlbn_dataset* ds, const mmlbn_sampler_config* config,
                                   mmlbn_report** out);
MMLBN_API void mmlbn_report_free(mmlbn_report* report);
MMLBN_API size_t mmlbn_report_num_classes(const mmlbn_report* report);
MMLBN_API uint64_t mmlbn_report_total_samples(const mmlbn_report* report);
MMLBN_API mmlbn_status mmlbn_report_class(const mmlbn_report* report, size_t index,
                                          uint64_t* visits, double* best_length,
                                          size_t* arc_count);
/* Writes up to `capacity` arcs of the class's best network, sorted. */
MMLBN_API mmlbn_status mmlbn_report_class_arcs(const mmlbn_report* report, size_t index,
                                               int* from, int* to, size_t capacity);
MMLBN_API mmlbn_status mmlbn_report_to_json(const mmlbn_report* report, char** json_out);

/* With a test set: one learn/evaluate run. Without (test == NULL): `repeats`
 * random splits holding out `test_fraction` of the cases. */
MMLBN_API mmlbn_status mmlbn_evaluate_json(const mmlbn_dataset* data, const mmlbn_dataset* test,
                                           int repeats, double test_fraction,
                                           const mmlbn_sampler_config* config, char** json_out);

/* Structure text: "i->j" arcs separated by newlines or commas, endpoints as
 * indices or variable names; "empty" for no arcs. */
MMLBN_API mmlbn_status mmlbn_score_structure(const mmlbn_dataset* ds, const char* structure,
                                             mmlbn_policy policy, double arc_prior, double sigma,
                                             double* length_out);
MMLBN_API mmlbn_status mmlbn_score_json(const mmlbn_dataset* ds, const char* structure,
                                        double arc_prior, double sigma, char** json_out);

MMLBN_API void mmlbn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MMLBN_H */
