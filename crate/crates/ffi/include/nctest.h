/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef NCTEST_H
#define NCTEST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum NctestStatus {
  NCTEST_STATUS_OK = 0,
  /*
   Malformed or inconsistent input document.
   */
  NCTEST_STATUS_INVALID_INPUT = 1,
  /*
   Solver or verification failure; indicates a bug.
   */
  NCTEST_STATUS_INTERNAL = 2,
  /*
   A required pointer argument was null.
   */
  NCTEST_STATUS_NULL_POINTER = 3,
  /*
   The input text is not valid UTF-8.
   */
  NCTEST_STATUS_INVALID_UTF8 = 4,
  /*
   The requested value does not exist for this report.
   */
  NCTEST_STATUS_NOT_AVAILABLE = 5,
} NctestStatus;

/*
 Enum arguments must be one of the listed constants; any other integer is
 undefined behaviour.
 */
typedef enum NctestCommand {
  NCTEST_COMMAND_CHECK = 0,
  NCTEST_COMMAND_ROBUSTNESS = 1,
  NCTEST_COMMAND_REPORT = 2,
} NctestCommand;

/*
 Must be one of the listed constants, like every enum argument.
 */
typedef enum NctestArithmetic {
  /*
   Whatever the document asks for (exact for GPT input, float for quantum).
   */
  NCTEST_ARITHMETIC_DEFAULT = 0,
  NCTEST_ARITHMETIC_EXACT = 1,
  NCTEST_ARITHMETIC_FLOAT = 2,
} NctestArithmetic;

typedef enum NctestVerdict {
  NCTEST_VERDICT_CLASSICAL = 0,
  NCTEST_VERDICT_NONCLASSICAL = 1,
} NctestVerdict;

typedef enum NctestRobustnessKind {
  /*
   The value holds the minimal noise level (0 when classical).
   */
  NCTEST_ROBUSTNESS_KIND_VALUE = 0,
  /*
   Nonclassical and no noise level up to 1 suffices.
   */
  NCTEST_ROBUSTNESS_KIND_INFEASIBLE_AT_FULL_NOISE = 1,
  /*
   Nonclassical and the command did not ask for robustness.
   */
  NCTEST_ROBUSTNESS_KIND_NOT_COMPUTED = 2,
} NctestRobustnessKind;

/*
 An analysed document. Opaque to C.
 */
typedef struct NctestReport NctestReport;

/*
 Overrides applied on top of the document's own options.
 */
typedef struct NctestOptions {
  enum NctestArithmetic arithmetic;
  /*
   Float tolerance; zero or negative keeps the document's value.
   */
  double tolerance;
  /*
   Skip positivity and normalisation checks on the input.
   */
  bool skip_validation;
} NctestOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Analyses one JSON input document (batches are rejected; call once per
 document). On success `*out` receives a handle to free with
 [`nctest_report_free`]; on failure `*out` is set to null.

 # Safety
 `json` must be a NUL-terminated string; `options` may be null; `out` must
 point to writable storage for one pointer.
 */
enum NctestStatus nctest_analyze(const char *json,
                                 enum NctestCommand command,
                                 const struct NctestOptions *options,
                                 struct NctestReport **out);

/*
 # Safety
 `report` must be a live handle from [`nctest_analyze`]; `verdict` must be writable.
 */
enum NctestStatus nctest_report_verdict(const struct NctestReport *report,
                                        enum NctestVerdict *verdict);

/*
 Writes the kind and, for [`NctestRobustnessKind::Value`], the value
 (NaN otherwise). `value` may be null when only the kind is wanted.

 # Safety
 `report` must be a live handle; `kind` must be writable; `value` null or writable.
 */
enum NctestStatus nctest_report_robustness(const struct NctestReport *report,
                                           enum NctestRobustnessKind *kind,
                                           double *value);

/*
 The exact robustness as `"p/q"`, when the analysis ran in exact
 arithmetic and a value exists; otherwise [`NctestStatus::NotAvailable`].
 Free the string with [`nctest_string_free`].

 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum NctestStatus nctest_report_robustness_exact(const struct NctestReport *report, char **out);

/*
 The report as pretty-printed JSON (`quiet` keeps only verdict and
 robustness). Returns null on failure. Free with [`nctest_string_free`].

 # Safety
 `report` must be null or a live handle.
 */
char *nctest_report_to_json(const struct NctestReport *report, bool quiet);

/*
 # Safety
 `report` must be null or a handle from [`nctest_analyze`] not yet freed.
 */
void nctest_report_free(struct NctestReport *report);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void nctest_string_free(char *s);

/*
 Message for the last failed call on this thread, or null. Valid until the
 next call into the library from the same thread; do not free.
 */
const char *nctest_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *nctest_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCTEST_H */
