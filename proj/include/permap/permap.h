/* permap — API-permission mapping pipeline, public C interface.
 *
 * All functions are thread-safe; error state is per thread. Functions
 * returning int yield PERMAP_OK (0) on success and a nonzero error code
 * otherwise; the code and message of the most recent failure on the calling
 * thread are available via permap_last_error / permap_last_error_message.
 * Strings returned through char** are owned by the caller and released with
 * permap_free.
 */
#ifndef PERMAP_H
#define PERMAP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PERMAP_OK 0
#define PERMAP_ERR_CORPUS 1
#define PERMAP_ERR_CANONICALIZATION 2
#define PERMAP_ERR_INTEGRITY 3
#define PERMAP_ERR_LOAD 4
#define PERMAP_ERR_PROMPT 5
#define PERMAP_ERR_PROVIDER 6
#define PERMAP_ERR_CONFIG 7
#define PERMAP_ERR_IO 8
#define PERMAP_ERR_ORACLE 9
#define PERMAP_ERR_INTERNAL 10

typedef struct permap_config permap_config;
typedef struct permap_store permap_store;

const char* permap_version(void);

int permap_last_error(void);
const char* permap_last_error_message(void);

void permap_free(void* ptr);

/* --- configuration ----------------------------------------------------- */

/* Parses a TOML-style config file; NULL on error. */
permap_config* permap_config_open(const char* path);
/* Empty configuration carrying only built-in defaults. */
permap_config* permap_config_new(void);
/* Overrides one key; the value is parsed like a config file value. */
int permap_config_set(permap_config* config, const char* key, const char* value);
void permap_config_close(permap_config* config);

/* --- pipeline stages ----------------------------------------------------
 * out_dir may be NULL to use the configured output directory. Outputs land
 * in a fresh run directory named by corpus id and UTC timestamp; a `latest`
 * pointer file in the base directory names it.
 */

/* Corpus scan -> new store file. Returns the store path via out_store_path. */
int permap_run_extract(permap_config* config, const char* out_dir, char** out_store_path,
                       long* covered, long* keyword_extracted);

/* Dual-role analysis; store updated in place. mock_oracle may be NULL. */
int permap_run_analyze(permap_config* config, const char* store_path, const char* mock_oracle,
                       long* permission_required);

/* Test-case verification; store updated in place. reject_list receives a
 * JSON array of api_ids whose test cases were rejected. */
int permap_run_verify(permap_config* config, const char* store_path, const char* mock_oracle,
                      long* verified, char** reject_list);

/* Gap / distribution / overlap / diff reports for the given stores. */
int permap_run_report(permap_config* config, const char* const* store_paths, int store_count,
                      const char* out_dir, char** report_dir);

/* Device-export bundles for validated test cases. */
int permap_run_export(permap_config* config, const char* store_path, const char* out_dir,
                      char** bundle_dir, long* bundle_count);

/* --- store inspection ---------------------------------------------------- */

permap_store* permap_store_open(const char* path);
void permap_store_close(permap_store* store);

long permap_store_record_count(const permap_store* store);
long permap_store_mapping_count(const permap_store* store);
int permap_store_sdk_version(const permap_store* store);
/* Caller frees with permap_free. */
char* permap_store_corpus_id(const permap_store* store);

/* filter_json: {"package_prefix"?, "permission"?, "provenance"?, "jni_only"?}
 * Returns a JSON array of mapping objects, or NULL on error. */
char* permap_store_query(const permap_store* store, const char* filter_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PERMAP_H */
