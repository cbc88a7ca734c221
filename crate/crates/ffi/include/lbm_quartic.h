#ifndef LBM_QUARTIC_H
#define LBM_QUARTIC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Hydrodynamic branch selector for [`lq_spectral_multiplier`].
typedef enum LqBranch {
  LQ_BRANCH_SHEAR1 = 0,
  LQ_BRANCH_SHEAR2 = 1,
  LQ_BRANCH_ACOUSTIC_PLUS = 2,
  LQ_BRANCH_ACOUSTIC_MINUS = 3,
} LqBranch;

typedef enum LqStatus {
  LQ_STATUS_OK = 0,
  LQ_STATUS_NULL_POINTER = 1,
  LQ_STATUS_INVALID_ARGUMENT = 2,
  // A denominator of the quartic closed forms vanished.
  LQ_STATUS_SINGULAR_PARAMETERS = 3,
  // A relaxation rate left (0, 2) or a viscosity went negative.
  LQ_STATUS_UNSTABLE_PARAMETERS = 4,
  LQ_STATUS_NOT_CONVERGED = 5,
  LQ_STATUS_BUFFER_TOO_SMALL = 6,
  LQ_STATUS_INTERNAL = 7,
} LqStatus;

// Populations on a grid, with its boundary setup.
typedef struct LqLattice LqLattice;

// Relaxation parameters of one scheme.
typedef struct LqParams LqParams;

typedef struct LqEquilibrium {
  double c0;
  double c1;
  double c2;
  double c3;
  double beta;
  double xi;
} LqEquilibrium;

typedef struct LqTransport {
  double mu;
  double zeta;
  double gamma;
  double nu;
} LqTransport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error of this thread into `buf` as a NUL-terminated string,
// truncating to `len`. Returns the full length without the terminator, or 0
// when the last call succeeded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t lq_last_error(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *lq_version(void);

// Quartic parameter set for `(c0, sigma_e, sigma_x)` with the free rates
// `s_psi`, `s_xi` and equilibrium coefficient `xi`.
//
// # Safety
// `params` must be a valid pointer to a handle slot.
enum LqStatus lq_params_quartic(double c0,
                                double sigma_e,
                                double sigma_x,
                                double s_psi,
                                double s_xi,
                                double xi,
                                struct LqParams **params);

// Quartic set at the default operating point.
//
// # Safety
// `params` must be a valid pointer to a handle slot.
enum LqStatus lq_params_quartic_default(struct LqParams **params);

// Isotropic two-relaxation-time set with `c0^2 = 1/3`.
//
// # Safety
// `params` must be a valid pointer to a handle slot.
enum LqStatus lq_params_trt(double sigma_x, struct LqParams **params);

// Second-order reference set: every group relaxes with `sigma_x`.
//
// # Safety
// `params` must be a valid pointer to a handle slot.
enum LqStatus lq_params_usual(double sigma_x, struct LqParams **params);

// # Safety
// `params` must be null or a handle from an `lq_params_*` constructor, not yet freed.
void lq_params_free(struct LqParams *params);

// The ten group rates in the order e, x, phi, psi, epsilon, xi, gamma, chi, tau, omega.
//
// # Safety
// `params` must be a live handle and `rates` must hold `len` doubles.
enum LqStatus lq_params_rates(const struct LqParams *params, double *rates, size_t len);

// # Safety
// `params` must be a live handle and `eq` a valid pointer.
enum LqStatus lq_params_equilibrium(const struct LqParams *params, struct LqEquilibrium *eq);

// Shear and bulk viscosity, sound attenuation and kinematic viscosity in lattice units.
//
// # Safety
// `params` must be a live handle and `transport` a valid pointer.
enum LqStatus lq_params_transport(const struct LqParams *params, struct LqTransport *transport);

// Largest eigenvalue modulus of the linear update over an `n^3` sample of
// `[0, pi]^3`. `k` receives the wavevector where it occurs and may be null.
//
// # Safety
// `params` must be a live handle, `radius` valid, `k` null or 3 doubles.
enum LqStatus lq_params_max_amplification(const struct LqParams *params,
                                          size_t n,
                                          double *radius,
                                          double *k);

// Per-step multiplier `z = exp(-Gamma)` of a hydrodynamic branch at
// wavenumber `kmag` along `direction`.
//
// # Safety
// `params` must be a live handle, `direction` 3 doubles, `re` and `im` valid.
enum LqStatus lq_spectral_multiplier(const struct LqParams *params,
                                     const double *direction,
                                     double kmag,
                                     enum LqBranch branch,
                                     double *re,
                                     double *im);

// Periodic grid at rest about density `background`.
//
// # Safety
// `params` must be a live handle and `lattice` a valid pointer to a handle slot.
enum LqStatus lq_lattice_periodic(const struct LqParams *params,
                                  size_t nx,
                                  size_t ny,
                                  size_t nz,
                                  double background,
                                  struct LqLattice **lattice);

// `n^3` box with a sphere of `radius` whose wall density is
// `1 + amplitude sin(2 pi t / period)`.
//
// # Safety
// `params` must be a live handle and `lattice` a valid pointer to a handle slot.
enum LqStatus lq_lattice_sphere(const struct LqParams *params,
                                size_t n,
                                double radius,
                                double amplitude,
                                double period,
                                struct LqLattice **lattice);

// # Safety
// `lattice` must be null or a handle from an `lq_lattice_*` constructor, not yet freed.
void lq_lattice_free(struct LqLattice *lattice);

// Grid shape into `shape[0..3]`.
//
// # Safety
// `lattice` must be a live handle and `shape` must hold 3 values.
enum LqStatus lq_lattice_shape(const struct LqLattice *lattice, size_t *shape);

// Steps taken so far.
//
// # Safety
// `lattice` must be a live handle and `time` a valid pointer.
enum LqStatus lq_lattice_time(const struct LqLattice *lattice, uint64_t *time);

// Sets every fluid site to equilibrium. Arrays are in site order with `x`
// fastest: `drho` holds density deviations from the background, one per site,
// and `q` holds momentum as `qx, qy, qz` triples. `q` may be null for rest.
//
// # Safety
// `lattice` must be a live handle; `drho` must hold `sites` doubles and `q`
// (when not null) `3 * sites`.
enum LqStatus lq_lattice_set_equilibrium(struct LqLattice *lattice,
                                         const double *drho,
                                         const double *q,
                                         size_t sites);

// Advances `steps` collide-stream-boundary cycles.
//
// # Safety
// `lattice` must be a live handle.
enum LqStatus lq_lattice_run(struct LqLattice *lattice, uint64_t steps);

// Density (background included) and momentum of every site, in the layout of
// [`lq_lattice_set_equilibrium`]. Solid sites report the background and zero
// momentum. Either output may be null.
//
// # Safety
// `lattice` must be a live handle; `rho` null or `sites` doubles, `q` null or `3 * sites`.
enum LqStatus lq_lattice_moments(const struct LqLattice *lattice,
                                 double *rho,
                                 double *q,
                                 size_t sites);

// Sum of density deviations over fluid sites.
//
// # Safety
// `lattice` must be a live handle and `mass` a valid pointer.
enum LqStatus lq_lattice_mass_deviation(const struct LqLattice *lattice, double *mass);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LBM_QUARTIC_H */
