#ifndef SGPAD_H
#define SGPAD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SGPAD_API __attribute__((visibility("default")))
#else
#define SGPAD_API
#endif

typedef enum sgpad_status {
  SGPAD_OK = 0,
  SGPAD_ERR_INVALID_ARGUMENT = 1,
  SGPAD_ERR_DIMENSION = 2,
  SGPAD_ERR_IO = 3,
  SGPAD_ERR_PARSE = 4,
  SGPAD_ERR_PRECONDITION = 5,
  SGPAD_ERR_NUMERIC = 6,
  SGPAD_ERR_NOT_FOUND = 7,
  SGPAD_ERR_INTERNAL = 99
} sgpad_status;

typedef struct sgpad_manifest sgpad_manifest;
typedef struct sgpad_saliency sgpad_saliency;
typedef struct sgpad_scores sgpad_scores;
typedef struct sgpad_server sgpad_server;

/* Message for the last failed call on this thread; "" if none. */
SGPAD_API const char* sgpad_last_error(void);
SGPAD_API const char* sgpad_version(void);
/* Frees strings returned through char** out-parameters. */
SGPAD_API void sgpad_string_free(char* s);

/* ---- manifests ---- */
SGPAD_API sgpad_status sgpad_manifest_load(const char* path, int check_files, sgpad_manifest** out);
SGPAD_API sgpad_status sgpad_manifest_save(const sgpad_manifest* m, const char* path);
SGPAD_API void sgpad_manifest_free(sgpad_manifest* m);
SGPAD_API size_t sgpad_manifest_size(const sgpad_manifest* m);
/* attack_types may be NULL (default list). */
SGPAD_API sgpad_status sgpad_manifest_build_limited(const sgpad_manifest* pool, size_t bonafide_count,
                                                    size_t per_attack_count,
                                                    const char* const* attack_types,
                                                    size_t n_attack_types, uint64_t seed,
                                                    sgpad_manifest** out);
SGPAD_API sgpad_status sgpad_manifest_split(const sgpad_manifest* m, double val_fraction,
                                            uint64_t seed, sgpad_manifest** out);
/* Writes a synthetic corpus (images, saliency, manifest.csv) under dir. */
SGPAD_API sgpad_status sgpad_synthetic_corpus(const char* dir, size_t samples, size_t size,
                                              double test_fraction, uint64_t seed,
                                              sgpad_manifest** out);

/* ---- saliency ---- */
/* granularity: "FOI" | "AOI" | "BOI"; source: "human" | "minutiae" | ... */
SGPAD_API sgpad_status sgpad_saliency_load(const char* png_path, const char* granularity,
                                           const char* source, sgpad_saliency** out);
SGPAD_API sgpad_status sgpad_saliency_save(const sgpad_saliency* s, const char* png_path);
SGPAD_API void sgpad_saliency_free(sgpad_saliency* s);
SGPAD_API size_t sgpad_saliency_rows(const sgpad_saliency* s);
SGPAD_API size_t sgpad_saliency_cols(const sgpad_saliency* s);
/* Row-major copy of rows*cols values into buf. */
SGPAD_API sgpad_status sgpad_saliency_values(const sgpad_saliency* s, double* buf, size_t len);
SGPAD_API sgpad_status sgpad_saliency_to_aoi(const sgpad_saliency* foi, double threshold,
                                             sgpad_saliency** out);
SGPAD_API sgpad_status sgpad_saliency_to_boi(const sgpad_saliency* aoi, sgpad_saliency** out);
SGPAD_API sgpad_status sgpad_minutiae_saliency(const char* minutiae_path, size_t rows, size_t cols,
                                               double radius, sgpad_saliency** out);
SGPAD_API sgpad_status sgpad_low_quality_saliency(const char* quality_path,
                                                  const char* low_contrast_path, int max_level,
                                                  sgpad_saliency** out);

/* ---- autoencoder ---- */
/* Trains on manifest records whose saliency comes from `source` (usually
   "human"). options_json may be NULL; keys: rows, cols, base_channels,
   epochs, batch_size, learning_rate, seed. metadata_json receives the loss
   curve. */
SGPAD_API sgpad_status sgpad_autoencoder_train(const char* manifest_path, const char* source,
                                               const char* options_json, const char* model_path,
                                               char** metadata_json);
SGPAD_API sgpad_status sgpad_autoencoder_predict(const char* model_path, const char* image_path,
                                                 sgpad_saliency** out);

/* ---- annotations ---- */
/* Reads every *.json export in annotations_dir, writes fused maps to
   map_dir and the updated manifest to out_manifest_path. */
SGPAD_API sgpad_status sgpad_ingest_annotations(const char* manifest_path,
                                                const char* annotations_dir, const char* map_dir,
                                                size_t min_annotators,
                                                const char* out_manifest_path,
                                                char** warnings_json);
SGPAD_API sgpad_status sgpad_assignment_build(const char* manifest_path,
                                              const char* const* annotators, size_t n_annotators,
                                              size_t target_per_sample, uint64_t seed,
                                              char** plan_json);

/* ---- blur expansion ---- */
/* control != 0 expands every sample (original + blurs) without saliency. */
SGPAD_API sgpad_status sgpad_expand_blur(const char* manifest_path, int control, const char* out_dir,
                                         size_t* n_written);

/* ---- experiments ---- */
SGPAD_API sgpad_status sgpad_run_scenario(const char* config_path, const char* run_dir,
                                          char** report_json);
SGPAD_API sgpad_status sgpad_alpha_sweep(const char* config_path, const double* alphas,
                                         size_t n_alphas, const char* out_dir, char** report_json);
/* competitors_path may be NULL. */
SGPAD_API sgpad_status sgpad_summarize_run_dir(const char* run_dir, const char* competitors_path,
                                               char** summary_json);
/* Normalized gain of metric `metric` (e.g. "test.auc") between the
   aggregate.json files of two run directories. */
SGPAD_API sgpad_status sgpad_report_gain(const char* guided_aggregate, const char* baseline_aggregate,
                                         const char* metric, char** gain_json);
SGPAD_API sgpad_status sgpad_normalized_gain(double guided, double baseline, double* gain);

/* ---- scores ---- */
SGPAD_API sgpad_status sgpad_scores_load(const char* csv_path, sgpad_scores** out);
SGPAD_API void sgpad_scores_free(sgpad_scores* s);
SGPAD_API size_t sgpad_scores_size(const sgpad_scores* s);
SGPAD_API sgpad_status sgpad_scores_auc(const sgpad_scores* s, double* auc);
SGPAD_API sgpad_status sgpad_scores_evaluate(const sgpad_scores* validation, const sgpad_scores* test,
                                             char** report_json);

/* ---- annotation server ---- */
SGPAD_API sgpad_status sgpad_server_create(const char* manifest_path, const char* plan_path,
                                           const char* storage_dir, sgpad_server** out);
SGPAD_API void sgpad_server_free(sgpad_server* s);
/* Blocking. */
SGPAD_API sgpad_status sgpad_server_listen(sgpad_server* s, const char* host, int port);
/* Background thread on a free port. */
SGPAD_API sgpad_status sgpad_server_start(sgpad_server* s, const char* host, int* port);
SGPAD_API sgpad_status sgpad_server_stop(sgpad_server* s);

#ifdef __cplusplus
}
#endif

#endif
