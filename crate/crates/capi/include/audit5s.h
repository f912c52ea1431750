/* C interface for the audit5s 5S-audit core. */

#ifndef AUDIT5S_H
#define AUDIT5S_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Final grade band.
 */
typedef enum Audit5sClass {
  AUDIT5S_CLASS_J = 0,
  AUDIT5S_CLASS_K = 1,
  AUDIT5S_CLASS_L = 2,
} Audit5sClass;

/**
 * Call outcome. Anything other than `Ok` leaves out-parameters
 * untouched.
 */
typedef enum Audit5sStatus {
  AUDIT5S_STATUS_OK = 0,
  AUDIT5S_STATUS_NULL_POINTER = 1,
  AUDIT5S_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The statistic is undefined for this input (e.g. chance agreement
   * is exactly 1).
   */
  AUDIT5S_STATUS_DEGENERATE = 3,
} Audit5sStatus;

/**
 * Incrementally built 3x3 confusion matrix (system rows, human
 * columns). Opaque; create with `audit5s_matrix_new`, release with
 * `audit5s_matrix_free`.
 */
typedef struct Audit5sMatrix Audit5sMatrix;

/**
 * One parsed and aggregated evaluation. Sense order is Seiri, Seiton,
 * Seiso, Seiketsu, Shitsuke. `points[i] == 0` marks a score that could
 * not be extracted (`extracted[i]` is false).
 */
typedef struct Audit5sEvaluation {
  uint8_t points[5];
  bool extracted[5];
  uint8_t total_points;
  uint8_t final_percent;
  enum Audit5sClass classification;
  bool parse_complete;
} Audit5sEvaluation;

/**
 * Cohen's kappa with its ingredients. `label` is a static string.
 */
typedef struct Audit5sAgreement {
  double p_observed;
  double p_expected;
  double kappa;
  double ci_low;
  double ci_high;
  const char *label;
} Audit5sAgreement;

/**
 * Cost-model inputs, all currency amounts in integer cents.
 */
typedef struct Audit5sScenario {
  int64_t manual_cost_cents;
  int64_t automated_cost_cents;
  uint32_t audits_per_month;
  uint32_t manual_minutes_per_audit;
  uint32_t automated_minutes_per_audit;
  int64_t investment_cents;
  int64_t hourly_rate_cents;
} Audit5sScenario;

/**
 * Cost-model outputs. `roi_year1_percent` is NaN when the investment
 * is zero; `payback_months` is +infinity when savings are not positive.
 */
typedef struct Audit5sEconomics {
  int64_t monthly_savings_cents;
  int64_t annual_savings_cents;
  double roi_year1_percent;
  double payback_months;
  double cost_reduction_percent;
  double time_saved_hours_per_month;
  int64_t freed_capacity_cents;
} Audit5sEconomics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static string.
 */
const char *audit5s_version(void);

/**
 * Map a final percentage (0..=100) to its grade band.
 * # Safety
 * `out_class` must be NULL or valid for writes.
 */
enum Audit5sStatus audit5s_classify(uint8_t final_percent, enum Audit5sClass *out_class);

/**
 * Landis-Koch verbal band for a kappa in [-1, 1]. The returned label
 * is static; do not free it.
 * # Safety
 * `out_label` must be NULL or valid for writes.
 */
enum Audit5sStatus audit5s_interpret_kappa(double kappa, const char **out_label);

/**
 * Render the default audit prompt. Free with `audit5s_string_free`.
 */
char *audit5s_default_prompt(void);

/**
 * Release a string returned by this library.
 * # Safety
 * `text` must be NULL or a pointer previously returned by this library.
 */
void audit5s_string_free(char *text);

/**
 * Parse a model reply (NUL-terminated, UTF-8; invalid bytes are
 * replaced) and aggregate it into an evaluation. Total: any text
 * yields five scores, with unusable criteria defaulted to 0.
 * # Safety
 * `text` must be NULL or NUL-terminated; `out` must be NULL or valid for writes.
 */
enum Audit5sStatus audit5s_parse_response(const char *text, struct Audit5sEvaluation *out);

/**
 * New empty confusion matrix.
 */
struct Audit5sMatrix *audit5s_matrix_new(void);

/**
 * Build a matrix from nine row-major counts (system rows J,K,L by
 * human columns J,K,L). Returns NULL if counts is NULL.
 * # Safety
 * `counts` must be NULL or point to nine readable u64 values.
 */
struct Audit5sMatrix *audit5s_matrix_from_counts(const uint64_t *counts);

/**
 * Add `count` paired observations to a cell.
 * # Safety
 * `matrix` must be NULL or a live handle from this library.
 */
enum Audit5sStatus audit5s_matrix_add(struct Audit5sMatrix *matrix,
                                      enum Audit5sClass system,
                                      enum Audit5sClass human,
                                      uint64_t count);

/**
 * Release a matrix handle.
 * # Safety
 * `matrix` must be NULL or a live handle from this library; the handle is consumed.
 */
void audit5s_matrix_free(struct Audit5sMatrix *matrix);

/**
 * Cohen's kappa with the asymptotic 95% interval. `Degenerate` when
 * the matrix is empty or chance agreement is exactly 1.
 * # Safety
 * `matrix` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum Audit5sStatus audit5s_matrix_kappa(const struct Audit5sMatrix *matrix,
                                        struct Audit5sAgreement *out);

/**
 * Overall accuracy (trace over total) of a matrix.
 * # Safety
 * `matrix` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum Audit5sStatus audit5s_matrix_accuracy(const struct Audit5sMatrix *matrix, double *out);

/**
 * Evaluate the audit cost model for one scenario.
 * # Safety
 * `scenario` and `out` must each be NULL or valid for reads/writes respectively.
 */
enum Audit5sStatus audit5s_evaluate_scenario(const struct Audit5sScenario *scenario,
                                             struct Audit5sEconomics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUDIT5S_H */
