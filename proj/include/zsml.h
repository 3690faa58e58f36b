/* C interface to the zero-shot multi-label learning library.
 *
 * Every function returns a zsml_status; on failure zsml_last_error() gives a
 * thread-local message that stays valid until the next failing call on the
 * same thread. Handles are opaque and freed with their _close function;
 * strings returned through char** are freed with zsml_string_free.
 */
#ifndef ZSML_H
#define ZSML_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZSML_API __declspec(dllexport)
#else
#define ZSML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zsml_status {
  ZSML_OK = 0,
  ZSML_ERROR_USAGE = 1, /* bad arguments or violated preconditions */
  ZSML_ERROR_DATA = 2,  /* unreadable or malformed files, shape mismatches */
  ZSML_ERROR_INTERNAL = 3
} zsml_status;

typedef struct zsml_dataset zsml_dataset;
typedef struct zsml_model zsml_model;

ZSML_API const char* zsml_last_error(void);
ZSML_API void zsml_string_free(char* s);

/* Fills defaults into a (possibly empty) JSON config of the given kind and
 * returns the fully resolved document. Kinds: "synth", "fig1c", "sweep",
 * "gap", "hinge", "ranknet", "eszsl", "conse", "eval". */
ZSML_API zsml_status zsml_config_resolve(const char* kind,
                                         const char* config_json,
                                         char** resolved_json);

/* Generates a synthetic benchmark into out_dir (manifest.json + CSV files).
 * config_json follows the "synth" schema; the seed argument overrides the
 * config's seed. */
ZSML_API zsml_status zsml_generate(const char* config_json, uint64_t seed,
                                   const char* out_dir);

/* Validates an external CSV triple and materializes a train-only dataset
 * directory. notices_json (optional) receives a JSON array of strings. */
ZSML_API zsml_status zsml_ingest(const char* features_csv,
                                 const char* labels_csv,
                                 const char* annotations_csv,
                                 const char* out_dir, char** notices_json);

ZSML_API zsml_status zsml_dataset_open(const char* dir, zsml_dataset** out);
ZSML_API void zsml_dataset_close(zsml_dataset* dataset);
/* Shape summary: {"d":..,"n":..,"m_train":..,...} */
ZSML_API zsml_status zsml_dataset_info(const zsml_dataset* dataset,
                                       char** info_json);

/* Trains on the dataset's training block. learner is one of hinge, ranknet,
 * eszsl, conse; config_json follows the learner's schema (null for
 * defaults). trace_csv (optional) receives "epoch,objective" lines. */
ZSML_API zsml_status zsml_train(const zsml_dataset* dataset,
                                const char* learner, const char* config_json,
                                zsml_model** out, char** trace_csv);

ZSML_API zsml_status zsml_model_save(const zsml_model* model, const char* path);
ZSML_API zsml_status zsml_model_load(const char* path, zsml_model** out);
ZSML_API void zsml_model_close(zsml_model* model);
/* {"learner":..,"n":..,"d":..,"objective":..} */
ZSML_API zsml_status zsml_model_info(const zsml_model* model, char** info_json);

/* Compatibility score of one (x, lambda) pair. */
ZSML_API zsml_status zsml_score(const zsml_model* model, const double* x,
                                size_t d, const double* lambda, size_t n,
                                double* score_out);

/* Evaluates the model on the dataset's test block. options_json follows the
 * "eval" schema: {"metrics":["hamming","miap","topk"],"k":3,
 * "labels":"seen"|"unseen"|"all","bins":0}. Returns a JSON report; when
 * "bins" > 0 the report carries a per-distance-bin Hamming curve. */
ZSML_API zsml_status zsml_evaluate(const zsml_model* model,
                                   const zsml_dataset* dataset,
                                   const char* options_json,
                                   char** report_json);

/* Generalization-bound terms for the bilinear hypothesis class. vacuous is
 * set to 1 when the bound exceeds 1. */
ZSML_API zsml_status zsml_bound(uint64_t m, uint64_t l, uint64_t d, uint64_t n,
                                double delta, double* eps1, double* eps2,
                                double* bound, int* vacuous);

/* Experiment drivers; each writes its CSV outputs into out_dir.
 * Configs follow the "fig1c" / "sweep" / "gap" schemas. */
ZSML_API zsml_status zsml_run_fig1c(const char* config_json,
                                    const char* out_dir);
ZSML_API zsml_status zsml_run_sweep(const char* config_json,
                                    const char* out_dir);
ZSML_API zsml_status zsml_run_gap(const char* config_json, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* ZSML_H */
