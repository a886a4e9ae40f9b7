#ifndef KGSYM_H
#define KGSYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KgStatus {
  KG_STATUS_OK = 0,
  KG_STATUS_NULL_POINTER = 1,
  KG_STATUS_INVALID_ARGUMENT = 2,
  KG_STATUS_BLOW_UP = 3,
  KG_STATUS_NOT_REAL = 4,
  KG_STATUS_PANIC = 5,
} KgStatus;

typedef struct KgSolver KgSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a solver with `2n` grid points, starting from the zero state.
// `scheme` is one of "lri1", "slri1", "lri2", "slri2"; `nonlinearity` one
// of "sine", "cubic", "linear".
//
// # Safety
// The strings must be NUL-terminated and `out` must be writable.
enum KgStatus kg_solver_new(size_t n,
                            const char *scheme,
                            const char *nonlinearity,
                            double tau,
                            struct KgSolver **out);

// # Safety
// `solver` must come from `kg_solver_new` and not be used afterwards.
void kg_solver_free(struct KgSolver *solver);

// Number of grid points `2N`, the length of every state array.
//
// # Safety
// `solver` must be a live handle or null (which returns 0).
size_t kg_solver_num_points(const struct KgSolver *solver);

// Replaces the state by grid values of `u` and `∂ₜu` and resets time to 0.
//
// # Safety
// `u` and `v` must point to `len` readable doubles.
enum KgStatus kg_solver_set_state(struct KgSolver *solver,
                                  const double *u,
                                  const double *v,
                                  size_t len);

// Loads the seeded random datum (normalized in H¹ × L², times `scale`)
// and resets time to 0.
//
// # Safety
// `solver` must be a live handle.
enum KgStatus kg_solver_set_rough_datum(struct KgSolver *solver,
                                        double theta,
                                        uint64_t seed,
                                        size_t max_frequency,
                                        double scale);

// Loads the sech soliton datum and resets time to 0.
//
// # Safety
// `solver` must be a live handle.
enum KgStatus kg_solver_set_soliton(struct KgSolver *solver,
                                    double a,
                                    double b,
                                    double c,
                                    double amplitude);

// Advances `n_steps` steps. A blow-up leaves the non-finite state in place.
//
// # Safety
// `solver` must be a live handle.
enum KgStatus kg_solver_step(struct KgSolver *solver, size_t n_steps);

// Writes the current grid values of `u` and `∂ₜu`.
//
// # Safety
// `u` and `v` must point to `len` writable doubles.
enum KgStatus kg_solver_get_state(struct KgSolver *solver, double *u, double *v, size_t len);

// Discrete energy of the current state.
//
// # Safety
// `out` must be writable.
enum KgStatus kg_solver_energy(struct KgSolver *solver, double *out);

// Time reached, steps taken times τ.
//
// # Safety
// `out` must be writable.
enum KgStatus kg_solver_time(struct KgSolver *solver, double *out);

// Message of the last failed call on this handle, empty after success.
// The pointer stays valid until the next call on the handle.
//
// # Safety
// `solver` must be a live handle or null.
const char *kg_solver_last_error(const struct KgSolver *solver);

// Static description of a status code.
const char *kg_status_message(enum KgStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGSYM_H */
