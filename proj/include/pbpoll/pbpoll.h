#ifndef PBPOLL_H
#define PBPOLL_H

/* C interface to the budgeting-poll toolkit. Documents cross the boundary as
 * UTF-8 JSON or NDJSON text; results come back in pbp_buffer objects owned by
 * the caller. Every function returns a pbp_status, and on failure
 * pbp_last_error() describes what went wrong on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PBP_API __declspec(dllexport)
#else
#define PBP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pbp_status {
  PBP_OK = 0,
  PBP_INVALID_ARGUMENT = 1,
  PBP_VALIDATION = 2,
  PBP_GENERATION_EXHAUSTED = 3,
  PBP_INCOMPLETE_DATA = 4,
  PBP_IO = 5,
  PBP_NETWORK = 6,
  PBP_UNAUTHORIZED = 7,
  PBP_INTERNAL = 8
} pbp_status;

/* Analysis flags. */
#define PBP_EXCLUDE_TIE_BROKEN 1u
#define PBP_KEEP_FAILED_ALERTNESS 2u
#define PBP_PARTIAL_CREDIT 4u

typedef struct pbp_buffer pbp_buffer;
typedef struct pbp_responses pbp_responses;
typedef struct pbp_service pbp_service;

PBP_API const char* pbp_status_string(pbp_status status);
/* Message of the last failed call on this thread; empty after a success. */
PBP_API const char* pbp_last_error(void);

/* NUL-terminated; size excludes the terminator. */
PBP_API const char* pbp_buffer_data(const pbp_buffer* buffer);
PBP_API size_t pbp_buffer_size(const pbp_buffer* buffer);
PBP_API void pbp_buffer_free(pbp_buffer* buffer);

/* config_json is a battery config document; ideal is "30,20,50" or a JSON
 * array. Writes the battery document. */
PBP_API pbp_status pbp_battery_generate(const char* config_json, const char* ideal, uint64_t seed,
                                        pbp_buffer** out);

/* Rescales raw values ("91,4,1" or a JSON array) onto the grid; writes a JSON
 * array. */
PBP_API pbp_status pbp_rescale(const char* values, pbp_buffer** out);

/* Runs a cohort spec. seed may be NULL, in which case the spec's seed is used,
 * or a fresh one when the spec has none. The seed actually used is written to
 * used_seed when it is non-NULL. */
PBP_API pbp_status pbp_responses_simulate(const char* cohort_json, const uint64_t* seed,
                                          pbp_responses** out, uint64_t* used_seed);
PBP_API pbp_status pbp_responses_parse(const char* ndjson, size_t length, pbp_responses** out);
PBP_API pbp_status pbp_responses_to_ndjson(const pbp_responses* responses, pbp_buffer** out);
PBP_API size_t pbp_responses_count(const pbp_responses* responses);
/* JSON array of {participant_id, error, message} for agents that could not
 * take the battery. Empty array for parsed response sets. */
PBP_API pbp_status pbp_responses_failures(const pbp_responses* responses, pbp_buffer** out);
PBP_API void pbp_responses_free(pbp_responses* responses);

/* format is "markdown" or "csv". */
PBP_API pbp_status pbp_analyze(const pbp_responses* responses, const char* format, unsigned flags,
                               pbp_buffer** out);

/* data_dir may be NULL or empty for an in-memory service. */
PBP_API pbp_status pbp_service_create(const char* data_dir, const char* admin_token, pbp_service** out);
/* Binds and serves on a background thread. port 0 picks a free port; the
 * bound port is written to bound_port. static_dir may be NULL. */
PBP_API pbp_status pbp_service_listen(pbp_service* service, const char* host, int port,
                                      const char* static_dir, int* bound_port);
/* Blocks until the server stops. */
PBP_API pbp_status pbp_service_wait(pbp_service* service);
PBP_API pbp_status pbp_service_stop(pbp_service* service);
PBP_API void pbp_service_free(pbp_service* service);

/* GET {base_url}/polls/{poll_id}/export with the admin token. */
PBP_API pbp_status pbp_export_fetch(const char* base_url, const char* poll_id, const char* admin_token,
                                    pbp_buffer** out);

#ifdef __cplusplus
}
#endif

#endif /* PBPOLL_H */
