/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright 2026 virality-cpp contributors */

/*
 * C interface to the virality pipeline.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return a vr_status; on failure the
 * message of the most recent error on the calling thread is available from
 * vr_last_error(). Strings returned through char** out-parameters are
 * allocated by the library and released with vr_string_free().
 * Options are passed as JSON text; NULL means "all defaults".
 */

#ifndef VIRALITY_VIRALITY_H
#define VIRALITY_VIRALITY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VR_API __declspec(dllexport)
#else
#define VR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vr_status {
  VR_OK = 0,
  VR_ERR_INVALID_ARGUMENT = 1, /* null pointer, size mismatch */
  VR_ERR_IO = 2,
  VR_ERR_PARSE = 3,
  VR_ERR_VALIDATION = 4,
  VR_ERR_DOMAIN = 5,
  VR_ERR_FIT = 6,
  VR_ERR_SCHEMA = 7,
  VR_ERR_CONFIG = 8,
  VR_ERR_SPLIT = 9,
  VR_ERR_METRIC = 10,
  VR_ERR_FOLD = 11,
  VR_ERR_DEGENERATE = 12,
  VR_ERR_INTERNAL = 13
} vr_status;

typedef struct vr_dataset vr_dataset;
typedef struct vr_labeling vr_labeling;
typedef struct vr_model vr_model;

VR_API const char* vr_version(void);
VR_API const char* vr_status_name(vr_status status);
/* Message of the last failure on this thread; "" if none. */
VR_API const char* vr_last_error(void);
VR_API void vr_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

/* Reads line-delimited records. Malformed lines are skipped and reported in
 * *diagnostics_json (array of {line, message}) when that pointer is given. */
VR_API vr_status vr_dataset_load(const char* path, vr_dataset** out, char** diagnostics_json);
/* Generates a synthetic corpus; planted labels stay attached to the handle. */
VR_API vr_status vr_dataset_synth(const char* config_json, vr_dataset** out);
VR_API vr_status vr_dataset_save(const vr_dataset* ds, const char* path);
VR_API size_t vr_dataset_size(const vr_dataset* ds);
/* Applies the quality filters in place; summary is optional. */
VR_API vr_status vr_dataset_filter(vr_dataset* ds, const char* options_json, char** summary_json);
/* Object mapping post ids to violation messages; empty if valid. */
VR_API vr_status vr_dataset_validate(const vr_dataset* ds, char** report_json);
VR_API vr_status vr_dataset_fingerprint(const vr_dataset* ds, char** out);
/* Planted labels of a synthetic dataset; n must equal vr_dataset_size. */
VR_API vr_status vr_dataset_planted(const vr_dataset* ds, int* labels, size_t n);
VR_API void vr_dataset_free(vr_dataset* ds);

/* ---- labeling ---------------------------------------------------------- */

/* Options: top_frac, windows, trees, seed, weights ("learned"|"published"). */
VR_API vr_status vr_labeling_fit(const vr_dataset* train, const char* options_json, vr_labeling** out);
VR_API vr_status vr_labeling_from_json(const char* text, vr_labeling** out);
VR_API vr_status vr_labeling_to_json(const vr_labeling* lab, char** out);
VR_API double vr_labeling_tau(const vr_labeling* lab);
/* Either output array may be NULL; n must equal vr_dataset_size. */
VR_API vr_status vr_labeling_apply(const vr_labeling* lab, const vr_dataset* ds, int* labels, double* scores,
                                   size_t n);
VR_API void vr_labeling_free(vr_labeling* lab);

/* ---- models ------------------------------------------------------------ */

/* X is row-major rows x cols. config_json: {"kind", "hyper", "seed"}.
 * names may be NULL (columns are then named f0, f1, ...). */
VR_API vr_status vr_model_train(const char* config_json, const double* X, size_t rows, size_t cols, const int* y,
                                const char* const* names, vr_model** out);
VR_API vr_status vr_model_predict(const vr_model* m, const double* X, size_t rows, size_t cols, double* proba);
VR_API size_t vr_model_n_features(const vr_model* m);
VR_API vr_status vr_model_importances(const vr_model* m, double* out, size_t n);
VR_API vr_status vr_model_to_json(const vr_model* m, char** out);
VR_API vr_status vr_model_from_json(const char* text, vr_model** out);
VR_API void vr_model_free(vr_model* m);

/* ---- metrics ----------------------------------------------------------- */

/* Any of the outputs may be NULL. */
VR_API vr_status vr_metrics(const int* y, const double* scores, size_t n, double threshold, double* pr_auc,
                            double* roc_auc, double* f1);

/* ---- pipeline ---------------------------------------------------------- */

/* Number of pipeline commands and their names, in CLI order. */
VR_API size_t vr_command_count(void);
VR_API const char* vr_command_name(size_t i);
/* Runs one pipeline command ("synth", "label", "sweep", ...) with a JSON
 * request; *result_json receives a JSON summary. */
VR_API vr_status vr_run(const char* command, const char* request_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* VIRALITY_VIRALITY_H */
