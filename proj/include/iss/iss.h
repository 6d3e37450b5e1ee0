/* C interface to the industrial-symbiosis norm toolkit. */
#ifndef ISS_ISS_H
#define ISS_ISS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ISS_API __attribute__((visibility("default")))
#else
#define ISS_API
#endif

typedef enum iss_status {
  ISS_OK = 0,
  ISS_E_DOMAIN = 1,           /* invalid document, policy, query, or unenforceable norm */
  ISS_E_IO = 2,               /* file could not be read */
  ISS_E_INVALID_ARGUMENT = 3, /* null handle, unknown enum value, bad option */
  ISS_E_INTERNAL = 4
} iss_status;

typedef enum iss_format { ISS_FORMAT_HUMAN = 0, ISS_FORMAT_RECORDS = 1 } iss_format;

typedef enum iss_entity {
  ISS_AGENTS = 0,
  ISS_RESOURCES = 1,
  ISS_STATES = 2,
  ISS_ACTIONS = 3,
  ISS_NORMS = 4
} iss_entity;

/* A parsed and lowered document. Immutable; safe to share between threads. */
typedef struct iss_session iss_session;
/* Output of one command. */
typedef struct iss_result iss_result;

typedef struct iss_options {
  iss_format format;
  uint64_t seed;
  const char* norm; /* NULL: every norm, or the first one for enforce */
  size_t bound;     /* lasso length bound for audits */
  int color;
} iss_options;

typedef struct iss_simulate_args {
  const char* strategy_text; /* NULL unless simulating a strategy */
  const char* strategy_name;
  size_t enumerate; /* 0: off */
  size_t sample;    /* 0: show every lasso */
} iss_simulate_args;

/* Negative numbers and NULL mean "take the value from the document". */
typedef struct iss_enforce_args {
  const char* mode; /* regiment | sanction | repair; ignored by iss_audit */
  int allow_deadlock;
  int64_t sv;
  int64_t cv;
  int64_t window;
  const char* money;
  const char* repair_action;
  const char* attribution;
} iss_enforce_args;

typedef struct iss_verify_args {
  const char* query;
  const char* from; /* NULL: the query's own start, else the initial states */
  int witness;
  int probe;
  const char* sweep_resource; /* NULL: no sweep */
  int64_t sweep_max;
} iss_verify_args;

ISS_API const char* iss_version(void);
ISS_API const char* iss_status_string(iss_status s);
/* Message of the last failing call on this thread. */
ISS_API const char* iss_last_error(void);

ISS_API void iss_options_init(iss_options* o);
ISS_API void iss_simulate_args_init(iss_simulate_args* a);
ISS_API void iss_enforce_args_init(iss_enforce_args* a);
ISS_API void iss_verify_args_init(iss_verify_args* a);

/* A session is returned even when the document has errors (ISS_E_DOMAIN);
   its diagnostics are then available through iss_session_diagnostics. */
ISS_API iss_status iss_session_open_file(const char* path, iss_session** out);
ISS_API iss_status iss_session_open_text(const char* text, size_t length, const char* name, iss_session** out);
ISS_API void iss_session_free(iss_session* s);
ISS_API int iss_session_ok(const iss_session* s);
ISS_API const char* iss_session_diagnostics(const iss_session* s);
ISS_API size_t iss_session_count(const iss_session* s, iss_entity kind);
/* NULL when out of range. */
ISS_API const char* iss_session_name(const iss_session* s, iss_entity kind, size_t index);

/* On ISS_OK or ISS_E_DOMAIN *out holds the rendered result. */
ISS_API iss_status iss_validate(const iss_session* s, const iss_options* o, iss_result** out);
ISS_API iss_status iss_simulate(const iss_session* s, const iss_options* o, const iss_simulate_args* a,
                                iss_result** out);
ISS_API iss_status iss_enforce(const iss_session* s, const iss_options* o, const iss_enforce_args* a,
                               iss_result** out);
ISS_API iss_status iss_verify(const iss_session* s, const iss_options* o, const iss_verify_args* a,
                              iss_result** out);
ISS_API iss_status iss_audit(const iss_session* s, const iss_options* o, const iss_enforce_args* a,
                             iss_result** out);

/* 0 success, 1 domain failure, 2 usage. */
ISS_API int iss_result_exit_code(const iss_result* r);
ISS_API const char* iss_result_output(const iss_result* r);
ISS_API const char* iss_result_errors(const iss_result* r);
/* The transformed document of iss_enforce, NULL otherwise. */
ISS_API const char* iss_result_document(const iss_result* r);
ISS_API void iss_result_free(iss_result* r);

/* Direct query check. */
ISS_API iss_status iss_check(const iss_session* s, const char* query, int* holds, uint64_t* configs_explored);

#ifdef __cplusplus
}
#endif

#endif
