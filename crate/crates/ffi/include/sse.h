#ifndef SSE_H
#define SSE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of a call.
typedef enum SseStatus {
  SSE_STATUS_OK = 0,
  // A null pointer or a string that is not UTF-8.
  SSE_STATUS_INVALID_ARGUMENT = 1,
  // The input does not describe a valid object.
  SSE_STATUS_INVALID_INPUT = 2,
  // A search or iteration bound was exceeded.
  SSE_STATUS_RESOURCE_BOUND = 3,
  // An internal invariant failed or the library panicked.
  SSE_STATUS_INTERNAL = 4,
} SseStatus;

typedef struct SseCode SseCode;

typedef struct SseEdge SseEdge;

typedef struct SseMatrix SseMatrix;

typedef struct SsePath SsePath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *sse_last_error(void);

// Library version as a static string.
const char *sse_version(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void sse_string_free(char *s);

// A `rows x cols` matrix from row-major entries.
//
// # Safety
// `entries` must point to `rows * cols` values; `out` must be writable.
enum SseStatus sse_matrix_new(uintptr_t rows,
                              uintptr_t cols,
                              const uint64_t *entries,
                              struct SseMatrix **out);

// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum SseStatus sse_matrix_from_json(const char *json, struct SseMatrix **out);

// # Safety
// `m` must be a live handle or null.
uintptr_t sse_matrix_rows(const struct SseMatrix *m);

// # Safety
// `m` must be a live handle or null.
uintptr_t sse_matrix_cols(const struct SseMatrix *m);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum SseStatus sse_matrix_get(const struct SseMatrix *m, uintptr_t i, uintptr_t j, uint64_t *out);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum SseStatus sse_matrix_to_json(const struct SseMatrix *m, char **out);

// # Safety
// `m` must come from this library and not be freed twice.
void sse_matrix_free(struct SseMatrix *m);

// The edge `A = RS -> B = SR`.
//
// # Safety
// `r`, `s` must be live handles; `out` must be writable.
enum SseStatus sse_edge_new(const struct SseMatrix *r,
                            const struct SseMatrix *s,
                            struct SseEdge **out);

// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum SseStatus sse_edge_from_json(const char *json, struct SseEdge **out);

// Source `A` (`which == 0`), target `B` (1), `R` (2) or `S` (3) of an edge.
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum SseStatus sse_edge_matrix(const struct SseEdge *e, uint32_t which, struct SseMatrix **out);

// # Safety
// `e` must be a live handle; `out` must be writable.
enum SseStatus sse_edge_to_json(const struct SseEdge *e, char **out);

// # Safety
// `e` must come from this library and not be freed twice.
void sse_edge_free(struct SseEdge *e);

// Whether three edges satisfy the triangle equations.
//
// # Safety
// The edges must be live handles; `out` must be writable.
enum SseStatus sse_triangle_check(const struct SseEdge *e1,
                                  const struct SseEdge *e2,
                                  const struct SseEdge *e3,
                                  bool *out);

// The elementary conjugacy of an edge.
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum SseStatus sse_edge_code(const struct SseEdge *e, struct SseCode **out);

// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum SseStatus sse_code_from_json(const char *json, struct SseCode **out);

// # Safety
// `c` must be a live handle; `out` must be writable.
enum SseStatus sse_code_to_json(const struct SseCode *c, char **out);

// # Safety
// `c` must be a live handle; `out` must be writable.
enum SseStatus sse_code_is_elementary(const struct SseCode *c, bool *out);

// Whether two codes are the same map.
//
// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum SseStatus sse_code_equal(const struct SseCode *a, const struct SseCode *b, bool *out);

// The edge of an elementary conjugacy.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum SseStatus sse_code_edge(const struct SseCode *c, struct SseEdge **out);

// A path of elementary edges composing to an invertible code.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum SseStatus sse_code_decompose(const struct SseCode *c, struct SsePath **out);

// # Safety
// `c` must come from this library and not be freed twice.
void sse_code_free(struct SseCode *c);

// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum SseStatus sse_path_from_json(const char *json, struct SsePath **out);

// # Safety
// `p` must be a live handle or null.
uintptr_t sse_path_len(const struct SsePath *p);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum SseStatus sse_path_to_json(const struct SsePath *p, char **out);

// The conjugacy of a path.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum SseStatus sse_path_compose(const struct SsePath *p, struct SseCode **out);

// Whether two paths with common endpoints are homotopic.
//
// # Safety
// `p`, `q` must be live handles; `out` must be writable.
enum SseStatus sse_path_homotopic(const struct SsePath *p, const struct SsePath *q, bool *out);

// # Safety
// `p` must come from this library and not be freed twice.
void sse_path_free(struct SsePath *p);

// Runs a command of the `sse` tool. `args` is a JSON array of strings such
// as `["explore", "--max-inner", "3"]`; `input` is the input document. The
// report goes to `report` and the tool's exit status to `exit_code`.
//
// # Safety
// `args` and `input` must be nul-terminated strings; the out-parameters
// must be writable.
enum SseStatus sse_run(const char *args, const char *input, char **report, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSE_H */
