#ifndef SQUEEZED_COMPTON_H
#define SQUEEZED_COMPTON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqcStatus {
  SQC_STATUS_OK = 0,
  SQC_STATUS_NULL_POINTER = 1,
  SQC_STATUS_INVALID_PARAMETER = 2,
  SQC_STATUS_NUMERICAL = 3,
  SQC_STATUS_IO = 4,
  SQC_STATUS_CONFIG = 5,
  SQC_STATUS_PANIC = 6,
} SqcStatus;

typedef enum SqcBesselOrder {
  SQC_BESSEL_ORDER_ONE_THIRD = 0,
  SQC_BESSEL_ORDER_TWO_THIRDS = 1,
  SQC_BESSEL_ORDER_FIVE_THIRDS = 2,
} SqcBesselOrder;

typedef enum SqcBesselIOrder {
  SQC_BESSEL_I_ORDER_ZERO = 0,
  SQC_BESSEL_I_ORDER_ONE = 1,
} SqcBesselIOrder;

typedef enum SqcRhoMethod {
  SQC_RHO_METHOD_QUADRATURE = 0,
  SQC_RHO_METHOD_SMALL_ZETA = 1,
  SQC_RHO_METHOD_BESSEL = 2,
  SQC_RHO_METHOD_ASYMPTOTIC = 3,
} SqcRhoMethod;

/*
 Validated run configuration.
 */
typedef struct SqcConfig SqcConfig;

/*
 Synthesized field on a uniform phase grid.
 */
typedef struct SqcFieldGrid SqcFieldGrid;

/*
 Tabulated emission rates and inverse CDFs.
 */
typedef struct SqcRateTable SqcRateTable;

/*
 Laser pulse in laboratory units.
 */
typedef struct SqcPulse {
  double omega0_ev;
  double tau_fwhm_fs;
  double xi0;
  double carrier_phase_rad;
} SqcPulse;

/*
 Lorentzian squeezing profile; `zeta0 = 0` means no squeezing.
 */
typedef struct SqcSqueeze {
  double zeta0;
  double gamma_ev;
  double theta0_rad;
} SqcSqueeze;

typedef struct SqcSummary {
  uint64_t n_electrons;
  uint64_t seed;
  double mean_emitted_energy_mev;
  double mean_emitted_energy_stderr_mev;
  double mean_photon_count;
  double mean_photon_count_stderr;
  uint64_t pair_count;
  double pulse_energy_j;
} SqcSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or NULL. Valid until the
 next failing call on the same thread.
 */
const char *sqc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sqc_version(void);

/*
 # Safety
 `out` must be valid for writes.
 */
enum SqcStatus sqc_bessel_k(enum SqcBesselOrder order, double x, double *out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum SqcStatus sqc_bessel_i(enum SqcBesselIOrder order, double x, double *out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum SqcStatus sqc_rho(enum SqcRhoMethod method,
                       double zeta0,
                       double gamma_tau,
                       double theta0,
                       double *out);

/*
 Synthesizes the field. `phi_half_width <= 0` sizes the window
 automatically. On success `*out` owns a grid to be released with
 [`sqc_field_free`].

 # Safety
 `pulse` and `squeeze` must point to valid structs; `out` must be valid
 for writes.
 */
enum SqcStatus sqc_field_synthesize(const struct SqcPulse *pulse,
                                    const struct SqcSqueeze *squeeze,
                                    double phi_step,
                                    double phi_half_width,
                                    struct SqcFieldGrid **out);

/*
 # Safety
 `grid` must come from [`sqc_field_synthesize`]; `out` must be valid for writes.
 */
enum SqcStatus sqc_field_len(const struct SqcFieldGrid *grid, size_t *out);

/*
 Copies ϕ, f_Z and ξ into caller buffers of `capacity` elements. Any of
 the three buffers may be NULL to skip it.

 # Safety
 `grid` must come from [`sqc_field_synthesize`]; non-NULL buffers must
 hold `capacity` doubles.
 */
enum SqcStatus sqc_field_copy(const struct SqcFieldGrid *grid,
                              double *phi,
                              double *f,
                              double *xi,
                              size_t capacity);

/*
 Pulse energy in J for a spot radius in μm and peak intensity in W/cm².

 # Safety
 `grid` must come from [`sqc_field_synthesize`]; `out` must be valid for writes.
 */
enum SqcStatus sqc_field_pulse_energy(const struct SqcFieldGrid *grid,
                                      double spot_radius_um,
                                      double peak_intensity_w_cm2,
                                      double *out);

/*
 # Safety
 `grid` must be NULL or come from [`sqc_field_synthesize`] and not be freed twice.
 */
void sqc_field_free(struct SqcFieldGrid *grid);

/*
 # Safety
 `out` must be valid for writes.
 */
enum SqcStatus sqc_rate_table_build(double u_floor, struct SqcRateTable **out);

/*
 R(χ) = ∫₀¹ F(χ, u) du.

 # Safety
 `table` must come from [`sqc_rate_table_build`]; `out` must be valid for writes.
 */
enum SqcStatus sqc_rate_table_total_rate(const struct SqcRateTable *table, double chi, double *out);

/*
 Photon fraction u at quantile `q` in [0, 1).

 # Safety
 `table` must come from [`sqc_rate_table_build`]; `out` must be valid for writes.
 */
enum SqcStatus sqc_rate_table_sample(const struct SqcRateTable *table,
                                     double chi,
                                     double q,
                                     double *out);

/*
 # Safety
 `table` must be NULL or come from [`sqc_rate_table_build`] and not be freed twice.
 */
void sqc_rate_table_free(struct SqcRateTable *table);

/*
 Loads and validates a TOML configuration file.

 # Safety
 `path` must be a NUL-terminated UTF-8 string; `out` must be valid for writes.
 */
enum SqcStatus sqc_config_load(const char *path, struct SqcConfig **out);

/*
 # Safety
 `config` must come from [`sqc_config_load`].
 */
enum SqcStatus sqc_config_set_seed(struct SqcConfig *config, uint64_t seed);

/*
 # Safety
 `config` must come from [`sqc_config_load`].
 */
enum SqcStatus sqc_config_set_n_electrons(struct SqcConfig *config, uint64_t n);

/*
 # Safety
 `config` must be NULL or come from [`sqc_config_load`] and not be freed twice.
 */
void sqc_config_free(struct SqcConfig *config);

/*
 Runs the full simulation in memory (no files) on `workers` threads
 (0 = all cores) and fills `out`.

 # Safety
 `config` must come from [`sqc_config_load`]; `out` must be valid for writes.
 */
enum SqcStatus sqc_simulate(const struct SqcConfig *config, size_t workers, struct SqcSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQUEEZED_COMPTON_H */
