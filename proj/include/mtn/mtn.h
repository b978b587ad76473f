/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the measure-transport network simulator. All functions
 * return a status code; details of the most recent failure on the calling
 * thread are available through mtn_last_error(). Objects are opaque handles
 * owned by the caller and released with the matching *_free function.
 */
#ifndef MTN_MTN_H
#define MTN_MTN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtn_status {
  MTN_OK = 0,
  MTN_ERR_INVALID_ARGUMENT = 1,
  MTN_ERR_PARSE = 2,
  MTN_ERR_IO = 3,
  MTN_ERR_UNSUPPORTED = 4,
  MTN_ERR_INTERNAL = 5
} mtn_status;

typedef enum mtn_algorithm {
  MTN_ALG_AUTO = 0,
  MTN_ALG_LEVELWISE = 1,
  MTN_ALG_TIMESTEPPED = 2
} mtn_algorithm;

typedef struct mtn_scenario mtn_scenario;
typedef struct mtn_solution mtn_solution;

typedef struct mtn_run_options {
  int algorithm;    /* mtn_algorithm */
  double time_step; /* <= 0 selects 0.9 * min arc traversal time */
  int lp_grid;      /* grid intervals for BL distances; <= 0 selects 2048 */
  int max_workers;  /* <= 0 reads MTN_MAX_WORKERS, then hardware threads */
} mtn_run_options;

void mtn_run_options_init(mtn_run_options* opts);

const char* mtn_version(void);

/* Message describing the most recent error on this thread ("" if none). */
const char* mtn_last_error(void);

/* Scenario lifecycle. */
mtn_status mtn_scenario_load(const char* path, mtn_scenario** out);
mtn_status mtn_scenario_parse(const char* json_text, mtn_scenario** out);
mtn_status mtn_scenario_emit(const mtn_scenario* sc, char** json_out);
void mtn_scenario_free(mtn_scenario* sc);

/* Solve. */
mtn_status mtn_solve(const mtn_scenario* sc, const mtn_run_options* opts,
                     mtn_solution** out);
void mtn_solution_free(mtn_solution* sol);

/*
 * Reports. extra_trace_times (may be NULL when n == 0) are added to the trace
 * times requested by the scenario file. check_balance: 0 off, 1 on, -1 as
 * requested by the file. checks_passed receives 1 when every requested check
 * met its tolerance (may be NULL).
 */
mtn_status mtn_solution_report_json(const mtn_solution* sol,
                                    const double* extra_trace_times, int n,
                                    int check_balance, char** json_out,
                                    int* checks_passed);
mtn_status mtn_solution_write_report(const mtn_solution* sol,
                                     const double* extra_trace_times, int n,
                                     int check_balance, const char* out_dir,
                                     int* checks_passed);

/* Mass ledger defect |in - out - stored| and weak-form residual. */
mtn_status mtn_solution_balance_defect(const mtn_solution* sol, double* defect);
mtn_status mtn_solution_weak_residual(const mtn_solution* sol, double* residual);

/*
 * Continuous-dependence estimate between two solved scenarios on the same
 * network: lhs = summed BL distances of terminal traces and well outflows,
 * rhs = summed BL distances of the input data.
 */
mtn_status mtn_continuity(const mtn_solution* a, const mtn_solution* b,
                          double* lhs, double* rhs);

void mtn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MTN_MTN_H */
