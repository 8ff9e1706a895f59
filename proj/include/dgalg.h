#ifndef DGALG_H
#define DGALG_H

#include <stddef.h>

#if defined(_WIN32)
#define DG_API __declspec(dllexport)
#else
#define DG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dg_workspace dg_workspace;
typedef struct dg_report dg_report;

typedef enum {
  DG_OK = 0,
  DG_ERR_PARSE = 1,         /* workspace text malformed; dg_last_error_line() gives the line */
  DG_ERR_SEMANTIC = 2,      /* a declared object or an input violates an invariant */
  DG_ERR_CHECK_FAILED = 3,  /* report produced, at least one check failed */
  DG_ERR_USAGE = 4,         /* unknown command, missing or bad option */
  DG_ERR_INTERNAL = 5
} dg_status;

DG_API const char* dg_version(void);

/* Message and line (0 when not applicable) of the last error on the calling thread. */
DG_API const char* dg_last_error(void);
DG_API int dg_last_error_line(void);

DG_API dg_status dg_workspace_load(const char* path, dg_workspace** out);
DG_API dg_status dg_workspace_parse(const char* text, const char* label, dg_workspace** out);
DG_API void dg_workspace_free(dg_workspace* ws);

DG_API size_t dg_command_count(void);
DG_API const char* dg_command_name(size_t i);

/* options_json: object with optional keys order, window ([lo, hi]), module, anchored, cdga, seed.
   ws may be NULL for "selftest". On DG_OK or DG_ERR_CHECK_FAILED *out holds a report. */
DG_API dg_status dg_run(const dg_workspace* ws, const char* command, const char* options_json, dg_report** out);
DG_API dg_status dg_selftest(unsigned long seed, int perturbations, dg_report** out);

DG_API int dg_report_ok(const dg_report* r);
DG_API size_t dg_report_check_count(const dg_report* r);
DG_API size_t dg_report_failure_count(const dg_report* r);
/* Caller frees the returned strings with dg_string_free. */
DG_API char* dg_report_text(const dg_report* r);
DG_API char* dg_report_json(const dg_report* r, int indent);
DG_API void dg_report_free(dg_report* r);
DG_API void dg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
