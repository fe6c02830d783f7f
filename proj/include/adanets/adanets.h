#ifndef ADANETS_H
#define ADANETS_H

/* C interface to the adaptive neighbour-discovery clustering pipeline.
 *
 * Every function returns an ada_status (0 on success); on failure
 * ada_last_error() describes the problem for the calling thread. Strings
 * returned through out-parameters are heap-allocated and must be released
 * with ada_string_free(). Handles are opaque and single-owner.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ada_status {
  ADA_OK = 0,
  ADA_ERR_USAGE = 2,   /* bad arguments / configuration */
  ADA_ERR_DATA = 3,    /* malformed or missing input data */
  ADA_ERR_NUMERIC = 4, /* NaN or divergence during training */
} ada_status;

typedef struct ada_config ada_config;
typedef struct ada_features ada_features;

/* Library version, static storage -- do not free. */
const char* ada_version(void);

/* Message of the most recent failure on this thread; empty string if none.
 * Static thread-local storage -- do not free. */
const char* ada_last_error(void);

void ada_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* Defaults for every knob. */
ada_status ada_config_create(ada_config** out);

/* Parse from canonical JSON text (unknown keys rejected). */
ada_status ada_config_from_json(const char* json_text, ada_config** out);

ada_status ada_config_load(const char* path, ada_config** out);

/* Override one field, e.g. ("eta", "0.3") or ("synth.classes", "10"). */
ada_status ada_config_set(ada_config* config, const char* key,
                          const char* value);

/* Canonical JSON dump of the current values. */
ada_status ada_config_dump(const ada_config* config, char** out_json);

/* Stable hash of the canonical dump (also recorded in stage manifests). */
ada_status ada_config_hash(const ada_config* config, uint64_t* out_hash);

void ada_config_destroy(ada_config* config);

/* ---- feature matrices ------------------------------------------------- */

/* Load a binary feature file; rows are re-normalized to unit length. */
ada_status ada_features_load(const char* path, ada_features** out);

/* Seeded synthetic hypersphere blobs using the config's synth section. */
ada_status ada_features_generate(const ada_config* config, ada_features** out);

int64_t ada_features_count(const ada_features* features);
int64_t ada_features_dim(const ada_features* features);

ada_status ada_features_save(const ada_features* features, const char* path);

void ada_features_destroy(ada_features* features);

/* ---- pipeline --------------------------------------------------------- */

/* Run one named stage (synth, knn, rerank, train-filter, discover,
 * build-graph, train-gcn, embed, cluster, eval) against out_dir. */
ada_status ada_run_stage(const ada_config* config, const char* stage,
                         const char* out_dir);

/* Run the whole pipeline for the config's round count. On success
 * *out_report_json receives the final evaluation report. */
ada_status ada_run_pipeline(const ada_config* config, const char* out_dir,
                            char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* ADANETS_H */
