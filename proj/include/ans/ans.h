/*
 * C interface to the autoencoder node saliency toolkit.
 *
 * All objects are opaque handles created by ans_*_create/load/... calls and
 * released with the matching ans_*_free. Every fallible call returns an
 * ans_status; on failure ans_last_error() describes the problem. Error text
 * is kept per thread. Hidden node indices are 1-based throughout.
 */
#ifndef ANS_ANS_H
#define ANS_ANS_H

#include <stddef.h>
#include <stdint.h>

#if defined(ANS_BUILDING_LIBRARY)
#define ANS_API __attribute__((visibility("default")))
#else
#define ANS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ans_status {
  ANS_OK = 0,
  ANS_ERR_INVALID_ARGUMENT = 1,
  ANS_ERR_DIMENSION = 2,
  ANS_ERR_PARSE = 3,
  ANS_ERR_LABEL = 4,
  ANS_ERR_IO = 5,
  ANS_ERR_VERSION = 6,
  ANS_ERR_TRUNCATED = 7,
  ANS_ERR_CORRUPT = 8,
  ANS_ERR_DIVERGENCE = 9,
  ANS_ERR_CONVERGENCE = 10,
  ANS_ERR_EMPTY = 11,
  ANS_ERR_INTERNAL = 99
} ans_status;

/* has_labels argument of ans_dataset_load. */
#define ANS_LABELS_NO 0
#define ANS_LABELS_YES 1
#define ANS_LABELS_AUTO (-1) /* labels iff the last header cell is "label" */

typedef struct ans_dataset ans_dataset;
typedef struct ans_normalizer ans_normalizer;
typedef struct ans_model ans_model;
typedef struct ans_history ans_history;
typedef struct ans_report ans_report;
typedef struct ans_pca ans_pca;
typedef struct ans_matrix ans_matrix;

typedef struct ans_train_config {
  size_t hidden_width;
  double learning_rate;
  size_t batch_size;
  size_t epochs;
  uint64_t seed;
  size_t workers;
  double validation_fraction;
  int shuffle;
} ans_train_config;

typedef struct ans_epoch_record {
  size_t epoch;
  double train_mse;
  double val_mse;
  double val_pearson;
  double seconds;
} ans_epoch_record;

typedef struct ans_scaling_row {
  size_t workers;
  double mean_epoch_seconds;
  double speedup;
} ans_scaling_row;

typedef struct ans_node_saliency {
  size_t node;
  double sns;
  double wce0;
  double wce1;
  double ned;
  double ned0;
  double ned1;
  int good_classifier;
} ans_node_saliency;

ANS_API const char* ans_version(void);
ANS_API const char* ans_last_error(void);
ANS_API const char* ans_status_name(ans_status status);

/* Datasets */
ANS_API ans_status ans_dataset_load(const char* path, int has_labels, ans_dataset** out);
ANS_API ans_status ans_dataset_save(const ans_dataset* ds, const char* path);
ANS_API ans_status ans_dataset_synthetic(size_t n_per_class, size_t d, size_t n_informative,
                                         double separation, uint64_t seed, size_t n_groups,
                                         ans_dataset** out);
ANS_API ans_status ans_dataset_shape(const ans_dataset* ds, size_t* n, size_t* d);
ANS_API int ans_dataset_has_labels(const ans_dataset* ds);
ANS_API int ans_dataset_has_groups(const ans_dataset* ds);
/* 1 if every value lies in [0,1]. */
ANS_API int ans_dataset_in_unit_range(const ans_dataset* ds);
/* Copies n*d row-major values; len must be at least n*d. */
ANS_API ans_status ans_dataset_copy_values(const ans_dataset* ds, double* buf, size_t len);
ANS_API ans_status ans_dataset_copy_labels(const ans_dataset* ds, int* buf, size_t len);
/* Returned strings live as long as the dataset. */
ANS_API ans_status ans_dataset_feature_id(const ans_dataset* ds, size_t j, const char** out);
ANS_API ans_status ans_dataset_sample_id(const ans_dataset* ds, size_t i, const char** out);
ANS_API ans_status ans_dataset_select_group(const ans_dataset* ds, const char* group,
                                            ans_dataset** out);
ANS_API ans_status ans_dataset_split(const ans_dataset* ds, double fraction, uint64_t seed,
                                     ans_dataset** train, ans_dataset** validation);
/* Number of planted informative columns (synthetic "inf_" ids) and their indices. */
ANS_API ans_status ans_dataset_informative(const ans_dataset* ds, size_t* indices, size_t len,
                                           size_t* count);
ANS_API void ans_dataset_free(ans_dataset* ds);

/* Min-max normalization */
ANS_API ans_status ans_normalizer_fit(const ans_dataset* ds, ans_normalizer** record,
                                      ans_dataset** normalized);
ANS_API ans_status ans_normalizer_apply(const ans_normalizer* record, const ans_dataset* ds,
                                        ans_dataset** out);
ANS_API ans_status ans_normalizer_save(const ans_normalizer* record, const char* path);
ANS_API ans_status ans_normalizer_load(const char* path, ans_normalizer** out);
ANS_API void ans_normalizer_free(ans_normalizer* record);

/* Autoencoder models */
ANS_API ans_status ans_model_init(size_t hidden, size_t input, uint64_t seed, ans_model** out);
ANS_API ans_status ans_model_load(const char* path, ans_model** out);
ANS_API ans_status ans_model_save(const ans_model* model, const char* path);
ANS_API ans_status ans_model_shape(const ans_model* model, size_t* hidden, size_t* input);
ANS_API ans_status ans_model_copy_weights(const ans_model* model, double* buf, size_t len);
/* m x n activation matrix for the dataset rows. */
ANS_API ans_status ans_model_encode(const ans_model* model, const ans_dataset* ds,
                                    ans_matrix** activations);
/* Reconstruction MSE and flattened Pearson correlation on the dataset. */
ANS_API ans_status ans_model_evaluate(const ans_model* model, const ans_dataset* ds,
                                      double* mse, double* pearson);
ANS_API void ans_model_free(ans_model* model);

ANS_API ans_status ans_matrix_shape(const ans_matrix* mat, size_t* rows, size_t* cols);
ANS_API const double* ans_matrix_data(const ans_matrix* mat);
ANS_API void ans_matrix_free(ans_matrix* mat);

/* Training */
ANS_API void ans_train_config_default(ans_train_config* config);
ANS_API ans_status ans_train(const ans_dataset* ds, const ans_train_config* config,
                             ans_model** model, ans_history** history);
ANS_API size_t ans_history_size(const ans_history* history);
ANS_API ans_status ans_history_epoch(const ans_history* history, size_t index,
                                     ans_epoch_record* out);
ANS_API ans_status ans_history_write_csv(const ans_history* history, const char* path);
ANS_API void ans_history_free(ans_history* history);

/* Strong-scaling benchmark; rows_out (nullable) receives `count` rows and
 * csv_path (nullable) the workers,mean_epoch_seconds,speedup table. */
ANS_API ans_status ans_benchmark(const ans_dataset* ds, const ans_train_config* config,
                                 const size_t* worker_counts, size_t count,
                                 ans_scaling_row* rows_out, const char* csv_path);

/* Node saliency */
ANS_API ans_status ans_saliency_from_activations(const double* activations, const int* labels,
                                                 size_t n, size_t bins, ans_node_saliency* out);
ANS_API ans_status ans_rank_nodes(const ans_model* model, const ans_dataset* ds, size_t bins,
                                  ans_report** out);
ANS_API size_t ans_report_size(const ans_report* report);
ANS_API ans_status ans_report_node(const ans_report* report, size_t node, ans_node_saliency* out);
/* rank is 1-based: rank 1 is the lowest SNS. */
ANS_API ans_status ans_report_ranked(const ans_report* report, size_t rank,
                                     ans_node_saliency* out);
ANS_API ans_status ans_report_write_csv(const ans_report* report, const char* path);
ANS_API ans_status ans_report_write_histogram_csv(const ans_report* report, size_t node,
                                                  const char* path);
ANS_API ans_status ans_report_write_histogram_svg(const ans_report* report, size_t node,
                                                  const char* path);
ANS_API void ans_report_free(ans_report* report);

/* Weight profile of one node: top features by |weight| (0-based columns). */
ANS_API ans_status ans_weight_profile_top(const ans_model* model, size_t node, size_t top_n,
                                          size_t* features_out);
/* feature ids come from ds; svg_path may be NULL. */
ANS_API ans_status ans_weight_profile_write(const ans_model* model, const ans_dataset* ds,
                                            size_t node, size_t top_n, const char* top_csv,
                                            const char* hist_csv, const char* svg_path);

/* PCA baseline */
ANS_API ans_status ans_pca_fit(const ans_dataset* ds, size_t components, double tol,
                               size_t max_iter, ans_pca** out);
ANS_API size_t ans_pca_components(const ans_pca* pca);
ANS_API ans_status ans_pca_eigenvalues(const ans_pca* pca, double* buf, size_t len);
ANS_API ans_status ans_pca_project(const ans_pca* pca, const ans_dataset* ds,
                                   ans_matrix** scores);
/* Scores CSV and, when svg_path is non-NULL and there are >= 2 components,
 * a pc1/pc2 scatter coloured by group (or label). */
ANS_API ans_status ans_pca_write_scores(const ans_pca* pca, const ans_dataset* ds,
                                        const char* csv_path, const char* svg_path);
ANS_API void ans_pca_free(ans_pca* pca);

#ifdef __cplusplus
}
#endif

#endif /* ANS_ANS_H */
