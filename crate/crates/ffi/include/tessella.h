#ifndef TESSELLA_H
#define TESSELLA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_ARGUMENT = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  TS_STATUS_PARSE = 3,
  TS_STATUS_INVALID_TILING = 4,
  TS_STATUS_UNKNOWN_ARROW = 5,
  TS_STATUS_UNSUPPORTED = 6,
  TS_STATUS_INVALID_ARGUMENT = 7,
  TS_STATUS_PANIC = 8,
} TsStatus;

// A quiver together with a potential on it.
typedef struct TsQpot TsQpot;

// A validated brane tiling.
typedef struct TsTiling TsTiling;

// Counts of `d`-dimensional representations over `F_q`.
typedef struct {
  uint64_t total;
  // Points where the trace of the potential is 0.
  uint64_t zero;
  // Points where it is 1.
  uint64_t one;
  // Points satisfying every Jacobi relation.
  uint64_t crit;
} TsCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ts_last_error_message(void);

// Library version, static storage.
const char *ts_version(void);

// Parses and validates a tiling file.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
TsStatus ts_tiling_from_json(const char *json, TsTiling **out);

// # Safety
// `tiling` must come from `ts_tiling_from_json` and not be freed already; null is ignored.
void ts_tiling_free(TsTiling *tiling);

// # Safety
// `tiling` must be a live handle; `out` must be writable.
TsStatus ts_tiling_genus(const TsTiling *tiling, uint32_t *out);

// Dual quiver with potential of a tiling.
//
// # Safety
// `tiling` must be a live handle; `out` must be writable.
TsStatus ts_tiling_dual(const TsTiling *tiling, TsQpot **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
TsStatus ts_qpot_from_json(const char *json, TsQpot **out);

// # Safety
// `qpot` must come from this library and not be freed already; null is ignored.
void ts_qpot_free(TsQpot *qpot);

// Serializes in the same format `ts_qpot_from_json` reads.
//
// # Safety
// `qpot` must be a live handle; `out` must be writable.
TsStatus ts_qpot_to_json(const TsQpot *qpot, char **out);

// Cyclic derivative along the named arrow, as an element file (`{"terms": [...]}`).
//
// # Safety
// `qpot` must be a live handle, `arrow` a NUL-terminated string, `out` writable.
TsStatus ts_qpot_derivative(const TsQpot *qpot, const char *arrow, char **out);

// Whether the Ginzburg differential squares to zero. Refuses localized quivers.
//
// # Safety
// `qpot` must be a live handle; `holds` must be writable.
TsStatus ts_qpot_check_d_squared(const TsQpot *qpot, bool *holds);

// Exhaustive count of `d`-dimensional representations over the prime field `F_q`.
//
// # Safety
// `qpot` must be a live handle; `out` must be writable.
TsStatus ts_qpot_count(const TsQpot *qpot, uint32_t d, uint64_t q, TsCounts *out);

// # Safety
// `s` must come from this library and not be freed already; null is ignored.
void ts_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TESSELLA_H */
