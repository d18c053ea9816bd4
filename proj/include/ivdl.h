#ifndef IVDL_H
#define IVDL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible entry point.  The first four
 * values line up with the CLI exit codes. */
typedef enum ivdl_status {
    IVDL_OK = 0,
    IVDL_CHECK_FAILED = 1, /* unused by the API itself; reserved for callers */
    IVDL_PARSE_ERROR = 2,
    IVDL_BUDGET_EXCEEDED = 3,
    IVDL_BAD_ARGUMENT = 4,
    IVDL_NOT_FOUND = 5,
    IVDL_INTERNAL = 6
} ivdl_status;

/* A parsed specification file. */
typedef struct ivdl_spec ivdl_spec;
/* A finished run: exit code plus rendered text and JSON reports. */
typedef struct ivdl_report ivdl_report;

typedef struct ivdl_options {
    int horizon;     /* 0 keeps the file's carrier */
    int jobs;        /* parallel workers, minimum 1 */
    uint64_t budget; /* largest enumeration space accepted */
    int emit_timing; /* nonzero: include runtime fields in reports */
} ivdl_options;

/* Fills opts with the defaults. */
void ivdl_options_init(ivdl_options* opts);

const char* ivdl_version(void);

/* Message for the most recent failure on the calling thread. */
const char* ivdl_last_error(void);

ivdl_status ivdl_spec_load(const char* path, ivdl_spec** out);
ivdl_status ivdl_spec_load_string(const char* text, const char* name, ivdl_spec** out);
void ivdl_spec_free(ivdl_spec* spec);

/* Runs every check directive of the spec, in file order.  Budget refusals
 * are recorded inside the report (exit code 3), not returned as a status. */
ivdl_status ivdl_run_checks(const ivdl_spec* spec, const ivdl_options* opts, ivdl_report** out);

/* Runs the algebraic law suite.  law_id NULL runs every law; an unknown id
 * is IVDL_NOT_FOUND.  depth/horizon 0 keep the defaults.  instance_budget
 * caps the number of instances tried per law (UINT64_MAX: the full plan). */
ivdl_status ivdl_run_laws(const char* law_id, uint64_t seed, int depth, int horizon,
                          uint64_t instance_budget, const ivdl_options* opts, ivdl_report** out);

/* Evaluates a named predicate of the spec on one stream and one interval.
 * hi < lo requests the empty interval.  stream indexes the enumeration of
 * all streams over the predicate's variables; trace nonzero adds the
 * decision table to the report. */
ivdl_status ivdl_eval_pred(const ivdl_spec* spec, const char* pred, int lo, int hi,
                           uint64_t stream, int trace, const ivdl_options* opts,
                           ivdl_report** out);

/* 0 pass, 1 any failure, 3 budget refusal or inconclusive law. */
int ivdl_report_exit_code(const ivdl_report* rep);
const char* ivdl_report_text(const ivdl_report* rep);
const char* ivdl_report_json(const ivdl_report* rep);
void ivdl_report_free(ivdl_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* IVDL_H */
