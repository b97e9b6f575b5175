/* dgfct: invariant-domain-preserving DG spectral element solver for
 * hyperbolic conservation laws, with a sparsified low-order companion scheme
 * and subcell flux-corrected limiting.
 *
 * C interface: opaque handles plus integer status codes. All functions
 * return DGFCT_OK (0) on success; dgfct_last_error() describes the most
 * recent failure on the calling thread.
 */
#ifndef DGFCT_H
#define DGFCT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dgfct_config dgfct_config;
typedef struct dgfct_run dgfct_run;

typedef enum dgfct_status
{
   DGFCT_OK = 0,
   DGFCT_ERR_INVALID_ARGUMENT = 1,
   DGFCT_ERR_PARSE = 2,
   DGFCT_ERR_UNKNOWN_KEY = 3,
   DGFCT_ERR_UNKNOWN_PROBLEM = 4,
   DGFCT_ERR_GEOMETRY = 5,
   DGFCT_ERR_INADMISSIBLE_STATE = 6,
   DGFCT_ERR_CFL = 7,
   DGFCT_ERR_INVARIANT_VIOLATION = 8,
   DGFCT_ERR_IO = 9,
   DGFCT_ERR_INTERNAL = 10
} dgfct_status;

const char *dgfct_status_string(dgfct_status status);
/* Message for the last failure on this thread; empty string if none. */
const char *dgfct_last_error(void);

/* --- configuration ------------------------------------------------------ */

dgfct_status dgfct_config_create(dgfct_config **cfg);
dgfct_status dgfct_config_load(dgfct_config *cfg, const char *path);
/* Rejects keys that are not part of the configuration schema. */
dgfct_status dgfct_config_set(dgfct_config *cfg, const char *key,
                              const char *value);
/* Applies a command-line style override, "key=value" or "--key=value". */
dgfct_status dgfct_config_override(dgfct_config *cfg, const char *arg);
void dgfct_config_destroy(dgfct_config *cfg);

/* --- runs ----------------------------------------------------------------*/

/* Builds the discretization, runs to the configured end time, writes any
 * configured outputs. Returns DGFCT_ERR_INVARIANT_VIOLATION when the run
 * completed but violated its invariants. */
dgfct_status dgfct_run_execute(const dgfct_config *cfg, dgfct_run **run);

/* Scalar report values. Keys: "l1_error_<c>", "l2_error_<c>",
 * "linf_error_<c>", "umin_<c>", "umax_<c>", "mass_drift_per_step", "steps",
 * "dof", "invariant_violations", "wall_time", "end_time". */
dgfct_status dgfct_run_report(const dgfct_run *run, const char *key,
                              double *value);
/* Full results record as written to results.txt. */
dgfct_status dgfct_run_report_text(const dgfct_run *run, char *buf,
                                   size_t bufsize);
void dgfct_run_destroy(dgfct_run *run);

/* --- convergence study ----------------------------------------------------*/

/* Doubles the mesh per level starting from the configured element count.
 * l1_errors and rates must hold `levels` entries; rates[0] is 0 and slope
 * receives the least-squares fit. Any output pointer may be NULL. */
dgfct_status dgfct_convergence(const dgfct_config *cfg, int levels,
                               double *l1_errors, double *rates,
                               double *slope);

/* --- misc ----------------------------------------------------------------*/

/* Newline-separated list of problem names. */
dgfct_status dgfct_list_problems(char *buf, size_t bufsize);
const char *dgfct_version(void);

#ifdef __cplusplus
}
#endif

#endif /* DGFCT_H */
