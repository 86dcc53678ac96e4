#ifndef LIMEOUT_H
#define LIMEOUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LimeoutStatus {
  LIMEOUT_STATUS_OK = 0,
  LIMEOUT_STATUS_NULL_POINTER = 1,
  LIMEOUT_STATUS_INVALID_UTF8 = 2,
  LIMEOUT_STATUS_CONFIG = 3,
  LIMEOUT_STATUS_DATA = 4,
  LIMEOUT_STATUS_INVALID_ARGUMENT = 5,
  LIMEOUT_STATUS_DEGENERATE_TRAINING = 6,
  LIMEOUT_STATUS_DEGENERATE_NEIGHBORHOOD = 7,
  LIMEOUT_STATUS_MODEL_FORMAT = 8,
  LIMEOUT_STATUS_IO = 9,
  LIMEOUT_STATUS_BUFFER_TOO_SMALL = 10,
  LIMEOUT_STATUS_PANIC = 11,
} LimeoutStatus;

/**
 * A loaded table with its schema.
 */
typedef struct LimeoutDataset LimeoutDataset;

/**
 * An averaged feature-dropout pool.
 */
typedef struct LimeoutEnsemble LimeoutEnsemble;

/**
 * A trained model plus the training statistics used to explain it.
 */
typedef struct LimeoutModel LimeoutModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to fit) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t limeout_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *limeout_version(void);

/**
 * Loads a CSV with kinds inferred per column.
 *
 * # Safety
 * `path` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum LimeoutStatus limeout_dataset_load_csv(const char *path,
                                            const char *target,
                                            struct LimeoutDataset **out);

/**
 * # Safety
 * `ds` must be null or a handle from this library.
 */
size_t limeout_dataset_n_rows(const struct LimeoutDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle from this library.
 */
size_t limeout_dataset_n_features(const struct LimeoutDataset *ds);

/**
 * Copies row `index` (categorical values as level codes) into `out`.
 *
 * # Safety
 * `ds` must be a handle from this library; `out` must hold `len` doubles.
 */
enum LimeoutStatus limeout_dataset_row(const struct LimeoutDataset *ds,
                                       size_t index,
                                       double *out,
                                       size_t len);

/**
 * # Safety
 * `ds` must be null or a handle from this library, not freed before.
 */
void limeout_dataset_free(struct LimeoutDataset *ds);

/**
 * Trains `algorithm` (`logistic`, `tree`, `random_forest`, `bagging`,
 * `adaboost`) with default hyperparameters on the whole dataset, never
 * reading the `n_masked` features named in `masked`.
 *
 * # Safety
 * Strings must be NUL-terminated; `masked` must hold `n_masked` strings.
 */
enum LimeoutStatus limeout_model_train(const struct LimeoutDataset *ds,
                                       const char *algorithm,
                                       uint64_t seed,
                                       const char *const *masked,
                                       size_t n_masked,
                                       struct LimeoutModel **out);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum LimeoutStatus limeout_model_load(const char *path, struct LimeoutModel **out);

/**
 * # Safety
 * `model` must be a handle from this library; `path` NUL-terminated.
 */
enum LimeoutStatus limeout_model_save(const struct LimeoutModel *model, const char *path);

/**
 * # Safety
 * `model` must be null or a handle from this library.
 */
size_t limeout_model_n_classes(const struct LimeoutModel *model);

/**
 * Class probabilities for one row of `n_features` values.
 *
 * # Safety
 * `row` must hold `n_features` doubles and `out` `n_out` doubles.
 */
enum LimeoutStatus limeout_model_predict_proba(const struct LimeoutModel *model,
                                               const double *row,
                                               size_t n_features,
                                               double *out,
                                               size_t n_out);

/**
 * Local explanation of the model's predicted class at `row`: one
 * coefficient per feature in schema order, plus intercept and local R².
 *
 * # Safety
 * `row` must hold `n_features` doubles, `coefficients` `n_features`
 * doubles; `intercept` and `local_r2` may be null.
 */
enum LimeoutStatus limeout_model_explain(const struct LimeoutModel *model,
                                         const double *row,
                                         size_t n_features,
                                         size_t n_samples,
                                         uint64_t seed,
                                         double *coefficients,
                                         double *intercept,
                                         double *local_r2);

/**
 * # Safety
 * `model` must be null or a handle from this library, not freed before.
 */
void limeout_model_free(struct LimeoutModel *model);

/**
 * Trains the dropout pool for the `n_sensitive` named features (one member
 * per feature plus one dropping all of them) and averages it.
 *
 * # Safety
 * Strings must be NUL-terminated; `sensitive` must hold `n_sensitive` strings.
 */
enum LimeoutStatus limeout_ensemble_build(const struct LimeoutDataset *ds,
                                          const char *algorithm,
                                          uint64_t seed,
                                          const char *const *sensitive,
                                          size_t n_sensitive,
                                          struct LimeoutEnsemble **out);

/**
 * # Safety
 * `ens` must be null or a handle from this library.
 */
size_t limeout_ensemble_n_members(const struct LimeoutEnsemble *ens);

/**
 * # Safety
 * `row` must hold `n_features` doubles and `out` `n_out` doubles.
 */
enum LimeoutStatus limeout_ensemble_predict_proba(const struct LimeoutEnsemble *ens,
                                                  const double *row,
                                                  size_t n_features,
                                                  double *out,
                                                  size_t n_out);

/**
 * # Safety
 * `ens` must be null or a handle from this library, not freed before.
 */
void limeout_ensemble_free(struct LimeoutEnsemble *ens);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIMEOUT_H */
