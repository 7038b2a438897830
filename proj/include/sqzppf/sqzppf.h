#ifndef SQZPPF_H
#define SQZPPF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit statuses. */
typedef enum {
    SQZPPF_OK = 0,
    SQZPPF_E_ARGUMENT = 1,
    SQZPPF_E_CONFIG = 2,
    SQZPPF_E_NUMERICAL = 3,
    SQZPPF_E_IO = 4
} sqzppf_status;

typedef struct sqzppf_config sqzppf_config;
typedef struct sqzppf_manifest sqzppf_manifest;

const char* sqzppf_version(void);

/* Message of the last failed call on this thread; empty when none. */
const char* sqzppf_last_error(void);

sqzppf_status sqzppf_config_load(const char* path, int lenient, sqzppf_config** out);
void sqzppf_config_free(sqzppf_config* cfg);

sqzppf_status sqzppf_config_set_output_dir(sqzppf_config* cfg, const char* dir);
/* Comma-separated action names, replaces [run] actions. */
sqzppf_status sqzppf_config_set_actions(sqzppf_config* cfg, const char* actions);
sqzppf_status sqzppf_config_set_threads(sqzppf_config* cfg, int threads);

size_t sqzppf_config_warning_count(const sqzppf_config* cfg);
const char* sqzppf_config_warning(const sqzppf_config* cfg, size_t index);

/* On failure *out still receives a manifest if one was written, otherwise NULL. */
sqzppf_status sqzppf_run(const sqzppf_config* cfg, sqzppf_manifest** out);
void sqzppf_manifest_free(sqzppf_manifest* m);
sqzppf_status sqzppf_manifest_diagnostic(const sqzppf_manifest* m, const char* name, double* value);
/* Owned by the manifest. */
const char* sqzppf_manifest_json(const sqzppf_manifest* m);

/* Model description as JSON; release with sqzppf_string_free. */
sqzppf_status sqzppf_dump_model(const sqzppf_config* cfg, char** json);
void sqzppf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
