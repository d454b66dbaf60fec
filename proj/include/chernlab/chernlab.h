/* Copyright 2026 chernlab developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to chernlab. Objects are opaque handles; every call returns a
 * chl_status and leaves a message for chl_last_error() on failure. Strings
 * returned through char** are owned by the caller and released with
 * chl_string_free.
 */
#ifndef CHERNLAB_H
#define CHERNLAB_H

#include <stdint.h>

#if defined(_WIN32)
#define CHL_API __declspec(dllexport)
#else
#define CHL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chl_status {
  CHL_OK = 0,
  CHL_ERR_ARGUMENT = 1,   /* null pointer or out-of-range argument */
  CHL_ERR_PARSE = 2,      /* malformed JSON */
  CHL_ERR_CONFIG = 3,     /* well-formed but invalid config, instance or name */
  CHL_ERR_NOT_FOUND = 4,  /* unknown report item */
  CHL_ERR_NUMERIC = 5,    /* computation failed, e.g. tail not certified */
  CHL_ERR_INTERNAL = 6
} chl_status;

typedef struct chl_instance chl_instance;
typedef struct chl_report chl_report;

CHL_API const char* chl_version(void);
/* Message of the last failed call on this thread; never null. */
CHL_API const char* chl_last_error(void);
CHL_API void chl_string_free(char* s);

/* Instances: algebras, modules and matrix elements in their JSON form. */
CHL_API chl_status chl_instance_generate(const char* name, const char* params_json, uint64_t seed,
                                         chl_instance** out);
CHL_API chl_status chl_instance_parse(const char* json, chl_instance** out);
CHL_API chl_status chl_instance_to_json(const chl_instance* inst, char** out);
CHL_API chl_status chl_instance_validate(const chl_instance* inst, chl_report** out);
CHL_API void chl_instance_free(chl_instance* inst);

/* Suite run. group may be null (all configured groups); seed_override < 0
 * keeps the config seed; threads <= 0 keeps the config value. */
CHL_API chl_status chl_suite_run(const char* config_json, const char* group, int64_t seed_override,
                                 int threads, chl_report** out);

/* Pairing of an odd module with g; tail_tol <= 0 uses 1e-6. */
CHL_API chl_status chl_pair(const chl_instance* module, const chl_instance* g, int n_max, int s_nodes,
                            double tail_tol, int threads, chl_report** out);

/* Reports (validation, suite or pairing). */
CHL_API chl_status chl_report_passed(const chl_report* r, int* passed);
CHL_API chl_status chl_report_to_json(const chl_report* r, char** out);
/* Plain-text summary. */
CHL_API chl_status chl_report_to_text(const chl_report* r, char** out);
CHL_API void chl_report_free(chl_report* r);

/* Looks up one check of a stored suite report (JSON text). */
CHL_API chl_status chl_explain(const char* report_json, const char* item_id, char** out);

#ifdef __cplusplus
}
#endif

#endif /* CHERNLAB_H */
