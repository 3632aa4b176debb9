#ifndef VRE_ATLAS_H
#define VRE_ATLAS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum VaStatus {
  VA_STATUS_OK = 0,
  VA_STATUS_NULL_POINTER = 1,
  VA_STATUS_INVALID_UTF8 = 2,
  VA_STATUS_INVALID_INPUT = 3,
  VA_STATUS_CONFIG = 4,
  VA_STATUS_IO = 5,
  VA_STATUS_PARSE = 6,
  VA_STATUS_DATA = 7,
  VA_STATUS_NUMERICAL = 8,
  VA_STATUS_OUT_OF_RANGE = 9,
  VA_STATUS_PANIC = 10,
} VaStatus;

/**
 * Technology selector for [`va_lcoe`].
 */
typedef enum VaTechnology {
  VA_TECHNOLOGY_WIND = 0,
  VA_TECHNOLOGY_PV_GROUND = 1,
  VA_TECHNOLOGY_PV_ROOF = 2,
} VaTechnology;

/**
 * Opaque run configuration.
 */
typedef struct VaConfig VaConfig;

/**
 * Opaque run results.
 */
typedef struct VaResults VaResults;

/**
 * Per-scenario totals copied out of a result handle.
 */
typedef struct VaScenarioTotals {
  uint8_t id;
  double wind_area_km2;
  double wind_twh;
  double wind_capacity_gw;
  double pv_ground_area_km2;
  double pv_ground_twh;
  double pv_roof_area_km2;
  double pv_roof_twh;
} VaScenarioTotals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null when the last
 * call succeeded. The pointer stays valid until the next call into this
 * library from the same thread.
 */
const char *va_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *va_version(void);

/**
 * Loads a run configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum VaStatus va_config_load(const char *path, struct VaConfig **out);

/**
 * Overrides the output directory of a loaded configuration.
 *
 * # Safety
 * `config` must come from [`va_config_load`]; `dir` must be NUL-terminated.
 */
enum VaStatus va_config_set_output_dir(struct VaConfig *config, const char *dir);

/**
 * Releases a configuration handle. Null is ignored.
 *
 * # Safety
 * `config` must come from [`va_config_load`] and not be used afterwards.
 */
void va_config_free(struct VaConfig *config);

/**
 * Runs all configured scenarios and writes the outputs to the configured
 * output directory.
 *
 * # Safety
 * `config` must come from [`va_config_load`] and `out` must be valid.
 */
enum VaStatus va_run(const struct VaConfig *config, struct VaResults **out);

/**
 * Number of scenarios in a result handle; 0 for null.
 *
 * # Safety
 * `results` must be null or come from [`va_run`].
 */
size_t va_results_scenario_count(const struct VaResults *results);

/**
 * Copies the totals of scenario `index` (in run order) into `out`.
 *
 * # Safety
 * `results` must come from [`va_run`] and `out` must be valid.
 */
enum VaStatus va_results_totals(const struct VaResults *results,
                                size_t index,
                                struct VaScenarioTotals *out);

/**
 * Releases a result handle. Null is ignored.
 *
 * # Safety
 * `results` must come from [`va_run`] and not be used afterwards.
 */
void va_results_free(struct VaResults *results);

/**
 * LCOE in £/kWh for the default cost parameters of `tech`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum VaStatus va_lcoe(enum VaTechnology tech, double energy_kwh_per_kw, double *out);

/**
 * Present value of a unit annual payment over `lifetime_years`.
 */
double va_annuity_factor(double interest, uint32_t lifetime_years);

/**
 * Writes a synthetic study area and its `run.cfg` into `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string.
 */
enum VaStatus va_fixture_write(uint64_t seed,
                               size_t rows,
                               size_t cols,
                               double cell_size,
                               const char *dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VRE_ATLAS_H */
