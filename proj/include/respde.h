#ifndef RESPDE_H
#define RESPDE_H

/* C interface to the obstacle-constrained stochastic PDE workbench.
 * All functions are thread-compatible: distinct sessions may be used from
 * distinct threads; a single session must not be shared concurrently. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rspde_session rspde_session;

/* Status codes returned by rspde_run and the setters. */
enum {
    RSPDE_OK = 0,        /* workflow completed, properties hold */
    RSPDE_VIOLATION = 1, /* workflow completed, a checked property failed */
    RSPDE_INVALID = 2,   /* invalid configuration or arguments */
    RSPDE_INTERNAL = 3   /* unexpected failure */
};

const char* rspde_version(void);

/* Creates a session. config_path may be NULL for built-in defaults; a
 * config error is deferred and reported by rspde_run. Returns NULL only on
 * allocation failure. */
rspde_session* rspde_open(const char* config_path);
void rspde_close(rspde_session* session);

/* Overrides applied on top of the loaded config. */
int rspde_set_seed(rspde_session* session, uint64_t seed);
int rspde_set_paths(rspde_session* session, uint64_t paths);
int rspde_set_output_dir(rspde_session* session, const char* dir);
int rspde_set_emit_plots(rspde_session* session, int enabled);

/* Runs one workflow: "simulate", "converge", "compare", or "verify".
 * Returns a status code from the enum above. */
int rspde_run(rspde_session* session, const char* command);

/* Last summary or error message; valid until the next call on the same
 * session. Never NULL for a valid session. */
const char* rspde_message(const rspde_session* session);

/* Files emitted by the last successful run (manifest last). */
size_t rspde_file_count(const rspde_session* session);
const char* rspde_file_path(const rspde_session* session, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* RESPDE_H */
