/* C API for the DMCL simulation and verification library.
 *
 * All functions return a status code:
 *   0  success
 *   1  verification failure (a certified inequality check failed)
 *   2  graph or configuration error
 *   3  data-richness error (the recorded data is not collectively rich)
 *   4  divergence (non-finite state or a Zeno-like jump cascade)
 *
 * Strings returned through `char**` are heap-allocated; release them with
 * dmcl_string_free. dmcl_last_error() describes the most recent failure on
 * the calling thread.
 */
#ifndef DMCL_H
#define DMCL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dmcl_session dmcl_session;

/* Create a session from a config file (key = value lines). */
int dmcl_open(const char* config_path, dmcl_session** out);
/* Create a session from config text held in memory. */
int dmcl_open_text(const char* config_text, dmcl_session** out);
void dmcl_close(dmcl_session* s);

/* Override one config key (e.g. "params.T", "horizon.step"). */
int dmcl_set_option(dmcl_session* s, const char* key, const char* value);

/* Spectral certificate as flat key-value JSON. */
int dmcl_analyze(dmcl_session* s, char** json_out);

/* Simulate per the config; writes the arc CSV into out_dir. */
int dmcl_simulate(dmcl_session* s, const char* out_dir, unsigned seed);

/* Run the verification suite; writes verify_report.json into out_dir
 * (if non-NULL) and returns the JSON through report_out (if non-NULL). */
int dmcl_verify(dmcl_session* s, const char* out_dir, unsigned seed,
                char** report_out);

/* Canned study: "example1", "estimation", "mrac" or "feedopt".
 * step <= 0 selects the preset default. */
int dmcl_reproduce(const char* preset, const char* out_dir, double step,
                   int jobs);

/* Re-run the configured simulation for each value of one parameter. */
int dmcl_sweep(dmcl_session* s, const char* param, const double* values,
               size_t n_values, const char* out_dir, unsigned seed, int jobs);

const char* dmcl_last_error(void);
void dmcl_string_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* DMCL_H */
