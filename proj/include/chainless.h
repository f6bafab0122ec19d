/* C interface to the chainless simulator core. All functions are
 * thread-compatible (no shared mutable state between handles). Strings
 * returned through out-parameters are heap-allocated and must be released
 * with chainless_string_free. */
#ifndef CHAINLESS_H
#define CHAINLESS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chainless_status {
    CHAINLESS_OK = 0,
    CHAINLESS_EXPECTATION_FAILED = 1, /* run finished; some expectation failed */
    CHAINLESS_CONFIG_ERROR = 2,       /* bad scenario / arguments / file */
    CHAINLESS_INTERNAL_ERROR = 3
} chainless_status;

typedef struct chainless_report chainless_report;

/* Runs a scenario file. On CHAINLESS_OK or CHAINLESS_EXPECTATION_FAILED a
 * report handle is stored in *out_report (caller frees). out_dir may be NULL
 * (no exports written); seed_override may be NULL (use the scenario's seed). */
chainless_status chainless_run(const char* scenario_path, const char* out_dir,
                               const uint64_t* seed_override, int serial,
                               chainless_report** out_report);

/* Report accessors. text form when machine == 0, key=value form otherwise. */
const char* chainless_report_fingerprint(const chainless_report* report);
char* chainless_report_render(const chainless_report* report, int machine);
int chainless_report_all_passed(const chainless_report* report);
void chainless_report_free(chainless_report* report);

/* Runs the scenario once per model in the comma-separated list (e.g.
 * "operator,spotcheck:0.25,committee:4,3,full" is NOT parseable — separate
 * committee params with a semicolon instead: "committee:4;3"). Writes the
 * rendered table into *out_table (caller frees). */
chainless_status chainless_compare_trust(const char* scenario_path, const char* models,
                                         char** out_table);

/* Offline replay of a trace export file. Returns CHAINLESS_OK for a valid
 * trace, CHAINLESS_EXPECTATION_FAILED for a corrupt one, CHAINLESS_CONFIG_ERROR
 * for a malformed document; *out_detail (caller frees) explains. */
chainless_status chainless_verify_trace(const char* trace_path, char** out_detail);

void chainless_string_free(char* s);

/* Message for the most recent failing call on this thread, or "". */
const char* chainless_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* CHAINLESS_H */
