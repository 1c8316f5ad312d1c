#ifndef TAMARKIN_H
#define TAMARKIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmkStatus {
  TMK_STATUS_OK = 0,
  TMK_STATUS_NULL_POINTER = 1,
  TMK_STATUS_INVALID_UTF8 = 2,
  TMK_STATUS_INVALID_INPUT = 3,
  TMK_STATUS_UNSUPPORTED = 4,
  TMK_STATUS_BUFFER_TOO_SMALL = 5,
  TMK_STATUS_PANIC = 6,
} TmkStatus;

// A graded barcode.
typedef struct TmkBarcode TmkBarcode;

// A complex with a sampled function, optional clamp and supplied action.
typedef struct TmkMesh TmkMesh;

// Barcode, filtered module and Spec of a sampled function.
typedef struct TmkSpec TmkSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library from this thread.
const char *tmk_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void tmk_string_free(char *s);

// Parses `{"degrees": {"0": [[birth, death], ...]}}`; `"inf"` marks a ray.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum TmkStatus tmk_barcode_from_json(const char *json, struct TmkBarcode **out);

// # Safety
// `b` must be a live barcode handle and `out` a valid pointer.
enum TmkStatus tmk_barcode_to_json(const struct TmkBarcode *b, char **out);

// # Safety
// `b` must be null or a handle from this library, not yet freed.
void tmk_barcode_free(struct TmkBarcode *b);

// Number of bars over all degrees.
//
// # Safety
// `b` must be a live barcode handle and `out` a valid pointer.
enum TmkStatus tmk_barcode_len(const struct TmkBarcode *b, size_t *out);

// New barcode with every endpoint moved by `c`.
//
// # Safety
// `b` must be a live barcode handle and `out` a valid pointer.
enum TmkStatus tmk_barcode_shift(const struct TmkBarcode *b, double c, struct TmkBarcode **out);

// Longest finite bar, `+inf` when some bar is a ray, 0 for none.
//
// # Safety
// `b` must be a live barcode handle and `out` a valid pointer.
enum TmkStatus tmk_barcode_torsion_threshold(const struct TmkBarcode *b, double *out);

// `d'`; `+inf` when the ray counts differ.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum TmkStatus tmk_dprime(const struct TmkBarcode *x, const struct TmkBarcode *y, double *out);

// `d'` minimized over translations of the second barcode.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum TmkStatus tmk_shifted_dprime(const struct TmkBarcode *x,
                                  const struct TmkBarcode *y,
                                  double *out);

// Unshifted interleaving distance.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum TmkStatus tmk_interleaving_distance(const struct TmkBarcode *x,
                                         const struct TmkBarcode *y,
                                         double *out);

// Whether the two barcodes are `eps`-interleaved.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum TmkStatus tmk_epsilon_interleaved(const struct TmkBarcode *x,
                                       const struct TmkBarcode *y,
                                       double eps,
                                       bool *out);

// Parses a mesh bundle, the format printed by `tamarkin demo circle-height`.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum TmkStatus tmk_mesh_from_json(const char *json, struct TmkMesh **out);

// Same mesh with the function negated. Only for unclamped bundles without a fiber.
//
// # Safety
// `m` must be a live mesh handle and `out` a valid pointer.
enum TmkStatus tmk_mesh_dual(const struct TmkMesh *m, struct TmkMesh **out);

// # Safety
// `m` must be null or a handle from this library, not yet freed.
void tmk_mesh_free(struct TmkMesh *m);

// Barcode, module and Spec over `F_p`.
//
// # Safety
// `m` must be a live mesh handle and `out` a valid pointer.
enum TmkStatus tmk_spec_of_function(const struct TmkMesh *m, uint32_t p, struct TmkSpec **out);

// # Safety
// `s` must be null or a handle from this library, not yet freed.
void tmk_spec_free(struct TmkSpec *s);

// Copies the distinct Spec values, ascending, into `values`. `written`
// receives the count; with a short buffer nothing is copied and the status
// is `BufferTooSmall`.
//
// # Safety
// `s` must be a live handle, `values` valid for `cap` writes (or null with
// `cap == 0`) and `written` a valid pointer.
enum TmkStatus tmk_spec_values(const struct TmkSpec *s,
                               double *values,
                               size_t cap,
                               size_t *written);

// Barcode of the function's pair filtration.
//
// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum TmkStatus tmk_spec_barcode(const struct TmkSpec *s, struct TmkBarcode **out);

// `{"spec": {...}, "classes": [...], "barcode": {...}, "module": {...}}`.
//
// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum TmkStatus tmk_spec_to_json(const struct TmkSpec *s, char **out);

// `max Spec(fwd) + max Spec(bwd)`; with `bwd` computed from `-S` this is `gamma(S)`.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum TmkStatus tmk_spectral_norm(const struct TmkSpec *fwd, const struct TmkSpec *bwd, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAMARKIN_H */
