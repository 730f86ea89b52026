/* accnoc: cycle-level simulator of an FPGA multi-accelerator interface on a
 * mesh network-on-chip. C API over the C++ core; every handle is opaque and
 * every call reports an accnoc_status. Strings returned as char* are heap
 * allocated and must be released with accnoc_string_free. Handles are not
 * thread-safe; distinct handles may be used from distinct threads. */

#ifndef ACCNOC_H
#define ACCNOC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum accnoc_status {
    ACCNOC_OK = 0,
    ACCNOC_ERR_ARGUMENT = 1,   /* null handle or malformed parameter */
    ACCNOC_ERR_PARSE = 2,      /* config text could not be parsed */
    ACCNOC_ERR_VALIDATION = 3, /* config parsed but is inconsistent */
    ACCNOC_ERR_IO = 4,         /* file could not be read or written */
    ACCNOC_ERR_RUNTIME = 5,    /* watchdog, protocol violation, data check */
    ACCNOC_ERR_UNKNOWN = 6     /* unknown key, metric, axis or suite */
} accnoc_status;

typedef struct accnoc_config accnoc_config; /* validated experiment setup */
typedef struct accnoc_run accnoc_run;       /* one finished simulation */
typedef struct accnoc_sweep accnoc_sweep;   /* one metrics row per value */
typedef struct accnoc_report accnoc_report; /* suite pass/fail report */

const char* accnoc_version(void);

/* Last failure detail for this thread; valid until the next API call. */
const char* accnoc_last_error(void);

void accnoc_string_free(char* s);

/* ---- configuration ---- */

accnoc_status accnoc_config_load(const char* path, accnoc_config** out);
accnoc_status accnoc_config_parse(const char* text, accnoc_config** out);

/* Dotted key override, e.g. ("sim.seed", "42") or ("interface.num_tb", "4").
 * Section arguments use a colon: ("hwa:3.exec_cycles", "100"). */
accnoc_status accnoc_config_set(accnoc_config* cfg, const char* key,
                                const char* value);

/* Aggregated validation problems, one per line; empty string when valid. */
accnoc_status accnoc_config_problems(const accnoc_config* cfg, char** out);

void accnoc_config_free(accnoc_config* cfg);

/* ---- single runs ---- */

accnoc_status accnoc_run_simulation(const accnoc_config* cfg,
                                    accnoc_run** out);

/* Named scalar, e.g. "throughput_flits_us"; see accnoc_run_metrics_csv for
 * the full column set. */
accnoc_status accnoc_run_metric(const accnoc_run* run, const char* name,
                                double* out);

/* Header line plus one data row. */
accnoc_status accnoc_run_metrics_csv(const accnoc_run* run, char** out);

/* Per-task completion log with the latency breakdown timestamps. */
accnoc_status accnoc_run_task_log_csv(const accnoc_run* run, char** out);

void accnoc_run_free(accnoc_run* run);

/* ---- parameter sweeps ---- */

/* axis: request_rate | num_tb | chaining_depth | pr_channels | ps_group |
 * interconnect | fpga_buffering | seed. values: comma-separated list. */
accnoc_status accnoc_sweep_run(const accnoc_config* cfg, const char* axis,
                               const char* values, accnoc_sweep** out);
accnoc_status accnoc_sweep_csv(const accnoc_sweep* sweep, char** out);
void accnoc_sweep_free(accnoc_sweep* sweep);

/* ---- scripted experiment suites ---- */

/* name: tb_count | throughput | chaining | bus_compare | cache_compare.
 * The report prints one PASS/FAIL line per predicate. */
accnoc_status accnoc_suite_run(const char* name, unsigned long long seed,
                               accnoc_report** out);
accnoc_status accnoc_report_text(const accnoc_report* report, char** out);
int accnoc_report_failures(const accnoc_report* report);
void accnoc_report_free(accnoc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ACCNOC_H */
