/* C interface to the dgeom engine.  Every call returns a dgeom_status; when
   it is not DGEOM_OK or DGEOM_VERIFY_FAILED the message is available from
   dgeom_last_error() on the calling thread.  Objects returned through out
   parameters are owned by the caller and released with the matching _free. */
#ifndef DGEOM_H
#define DGEOM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DGEOM_API __declspec(dllexport)
#else
#define DGEOM_API __attribute__((visibility("default")))
#endif

typedef enum {
  DGEOM_OK = 0,
  DGEOM_VERIFY_FAILED = 1,
  DGEOM_CONFIG_ERROR = 2,
  DGEOM_PARSE_ERROR = 3,
  DGEOM_NUMERIC_ERROR = 4,
  DGEOM_INTERNAL_ERROR = 5
} dgeom_status;

typedef struct dgeom_config dgeom_config;
typedef struct dgeom_report dgeom_report;

typedef struct {
  const char* product;        /* "moyal", "lie" or "qplane" */
  const char* lhs;
  const char* rhs;
  const char* theta;          /* csv, moyal only */
  const char* structure_json; /* file content, lie only */
  const char* q;              /* complex literal, qplane only; NULL means 1 */
  const char* ordering;       /* "normal" (default) or "symmetric" */
  int lie_order;              /* 1 or 2; 0 means 2 */
} dgeom_star_request;

DGEOM_API const char* dgeom_version(void);
DGEOM_API const char* dgeom_last_error(void);

DGEOM_API dgeom_status dgeom_config_load(const char* path, dgeom_config** out);
DGEOM_API dgeom_status dgeom_config_parse(const char* json_text, dgeom_config** out);
DGEOM_API dgeom_status dgeom_config_set_points(dgeom_config* cfg, int count);
DGEOM_API dgeom_status dgeom_config_set_seed(dgeom_config* cfg, uint64_t seed);
DGEOM_API void dgeom_config_free(dgeom_config* cfg);

/* These produce a report even when the returned status is
   DGEOM_VERIFY_FAILED, and analyze also on DGEOM_NUMERIC_ERROR when the
   degenerate-point threshold is exceeded. */
DGEOM_API dgeom_status dgeom_analyze(const dgeom_config* cfg, dgeom_report** out);
DGEOM_API dgeom_status dgeom_finsler(const char* f, int n, int points, uint64_t seed,
                                     dgeom_report** out);
DGEOM_API dgeom_status dgeom_star(const dgeom_star_request* req, dgeom_report** out);
DGEOM_API dgeom_status dgeom_sw(const char* config_json, dgeom_report** out);
DGEOM_API dgeom_status dgeom_sw_load(const char* path, dgeom_report** out);
DGEOM_API dgeom_status dgeom_verify(const char* suite, dgeom_report** out);

DGEOM_API const char* dgeom_report_json(const dgeom_report* r);
/* Short human-readable rendering: one line per check or invariant. */
DGEOM_API const char* dgeom_report_text(const dgeom_report* r);
DGEOM_API dgeom_status dgeom_report_status(const dgeom_report* r);
DGEOM_API const char* dgeom_report_message(const dgeom_report* r);
DGEOM_API void dgeom_report_free(dgeom_report* r);

#ifdef __cplusplus
}
#endif

#endif
