#ifndef HAMLOOP_H
#define HAMLOOP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HamloopStatus {
  HAMLOOP_STATUS_OK = 0,
  HAMLOOP_STATUS_NULL_POINTER = 1,
  HAMLOOP_STATUS_INVALID_ARGUMENT = 2,
  HAMLOOP_STATUS_NON_SYMPLECTIC = 3,
  HAMLOOP_STATUS_NUMERICAL_FAILURE = 4,
  HAMLOOP_STATUS_OVERFLOW = 5,
  HAMLOOP_STATUS_PANIC = 6,
} HamloopStatus;

// The result of running a scenario.
typedef struct HamloopReport HamloopReport;

// A configured scenario.
typedef struct HamloopScenario HamloopScenario;

// Exact rational with machine-word numerator and denominator.
typedef struct HamloopRational {
  int64_t num;
  int64_t den;
} HamloopRational;

// One comparison of a scenario run. `name` is owned by the report.
typedef struct HamloopCheck {
  const char *name;
  double expected;
  double actual;
  double tolerance;
  bool relative;
  bool passed;
} HamloopCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call on this thread.
const char *hamloop_last_error(void);

// Library version as a static string.
const char *hamloop_version(void);

// `rho` of a `dim x dim` symplectic matrix given row-major, `dim` even.
//
// # Safety
// `matrix` must point to `dim * dim` doubles; `re` and `im` must be writable.
enum HamloopStatus hamloop_rho(const double *matrix, size_t dim, double *re, double *im);

// Winding number of the closed path through `len` unit complex samples
// taken at equally spaced parameters.
//
// # Safety
// `re` and `im` must point to `len` doubles; `out` must be writable.
enum HamloopStatus hamloop_winding(const double *re, const double *im, size_t len, int64_t *out);

// Exact `I_psi` and `I_psi_tilde` of the Hirzebruch surface `(k, tau, mu)`;
// `tau` and `mu` are rationals such as `"3"` or `"7/2"`.
//
// # Safety
// String arguments must be NUL-terminated; outputs must be writable.
enum HamloopStatus hamloop_hirzebruch_closed_form(uint32_t k,
                                                  const char *tau,
                                                  const char *mu,
                                                  struct HamloopRational *i_psi,
                                                  struct HamloopRational *i_psi_tilde);

// Rotation of the round sphere with cap overlap half-width `epsilon_hat`.
//
// # Safety
// `out` must be writable.
enum HamloopStatus hamloop_scenario_sphere(double epsilon_hat, struct HamloopScenario **out);

// Reparameterized loop on the torus of dimension `2n` with a seeded Hamiltonian.
//
// # Safety
// `out` must be writable.
enum HamloopStatus hamloop_scenario_torus(size_t n, uint64_t seed, struct HamloopScenario **out);

// Hirzebruch surface `(k, tau, mu)` on the default radius ladder.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum HamloopStatus hamloop_scenario_hirzebruch(uint32_t k,
                                               const char *tau,
                                               const char *mu,
                                               struct HamloopScenario **out);

// # Safety
// `scenario` must come from a `hamloop_scenario_*` constructor, or be null.
void hamloop_scenario_free(struct HamloopScenario *scenario);

// Runs the scenario with its default quadrature.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum HamloopStatus hamloop_scenario_run(const struct HamloopScenario *scenario,
                                        struct HamloopReport **out);

// Whether every check of the report passed; false for a null report.
//
// # Safety
// `report` must be a live handle or null.
bool hamloop_report_passed(const struct HamloopReport *report);

// Number of checks in the report; zero for a null report.
//
// # Safety
// `report` must be a live handle or null.
size_t hamloop_report_check_count(const struct HamloopReport *report);

// Copies check `index` into `out`.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum HamloopStatus hamloop_report_check(const struct HamloopReport *report,
                                        size_t index,
                                        struct HamloopCheck *out);

// Full report as JSON, owned by the report; null for a null report.
//
// # Safety
// `report` must be a live handle or null.
const char *hamloop_report_json(const struct HamloopReport *report);

// # Safety
// `report` must come from `hamloop_scenario_run`, or be null.
void hamloop_report_free(struct HamloopReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMLOOP_H */
