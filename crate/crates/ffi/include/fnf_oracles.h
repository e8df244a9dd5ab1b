#ifndef FNF_ORACLES_H
#define FNF_ORACLES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Distance value meaning "unreachable".
 */
#define FNF_UNREACHABLE UINT64_MAX

/**
 * Result of every fallible call.
 */
typedef enum FnfStatus {
  FNF_STATUS_OK = 0,
  FNF_STATUS_NULL_POINTER = 1,
  FNF_STATUS_INVALID_ARGUMENT = 2,
  FNF_STATUS_DIMENSION_MISMATCH = 3,
  FNF_STATUS_INDEX_OUT_OF_RANGE = 4,
  FNF_STATUS_GENERICITY_FAILURE = 5,
  FNF_STATUS_EDGE_ALREADY_PRESENT = 6,
  FNF_STATUS_EDGE_ABSENT = 7,
  FNF_STATUS_SELF_LOOP = 8,
  FNF_STATUS_INVALID_MODULUS = 9,
  FNF_STATUS_PARSE = 10,
  FNF_STATUS_UNSUPPORTED = 11,
  FNF_STATUS_PANIC = 12,
} FnfStatus;

/**
 * Distance oracle under batches of edge and vertex failures.
 */
typedef struct FnfDso FnfDso;

/**
 * Fully dynamic oracle under edge insertions and deletions.
 */
typedef struct FnfDynamic FnfDynamic;

/**
 * Opaque digraph on vertices `0..n`.
 */
typedef struct FnfGraph FnfGraph;

/**
 * Frobenius form of a square matrix with its power oracle.
 */
typedef struct FnfPowerOracle FnfPowerOracle;

/**
 * Oracle under vertex updates.
 */
typedef struct FnfVertexOracle FnfVertexOracle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length, or 0
 * when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t fnf_last_error_message(char *buf, size_t len);

/**
 * Creates an empty graph; weighted graphs accept weights >= 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FnfStatus fnf_graph_new(size_t n, bool weighted, struct FnfGraph **out);

/**
 * Parses the edge-list text format (1-based vertices in the text).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FnfStatus fnf_graph_parse(const char *text, struct FnfGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not used afterwards.
 */
void fnf_graph_free(struct FnfGraph *g);

/**
 * # Safety
 * `g` must be a valid graph handle.
 */
enum FnfStatus fnf_graph_add_edge(struct FnfGraph *g, size_t u, size_t v, uint32_t weight);

/**
 * # Safety
 * `g` must be a valid graph handle.
 */
enum FnfStatus fnf_graph_remove_edge(struct FnfGraph *g, size_t u, size_t v);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid graph handle.
 */
size_t fnf_graph_vertex_count(const struct FnfGraph *g);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid graph handle.
 */
size_t fnf_graph_edge_count(const struct FnfGraph *g);

/**
 * Computes the Frobenius form of the row-major `n x n` matrix `entries`
 * over `Z/pZ` and builds its power oracle. `seed` drives the random
 * Krylov vectors.
 *
 * # Safety
 * `entries` must point to `n * n` values and `out` must be valid.
 */
enum FnfStatus fnf_power_oracle_new(uint64_t modulus,
                                    size_t n,
                                    const uint64_t *entries,
                                    uint64_t seed,
                                    struct FnfPowerOracle **out);

/**
 * # Safety
 * `o` must be null or a handle from this library, not used afterwards.
 */
void fnf_power_oracle_free(struct FnfPowerOracle *o);

/**
 * Order `n` of the matrix, or 0 for a null handle.
 *
 * # Safety
 * `o` must be null or a valid handle.
 */
size_t fnf_power_oracle_order(const struct FnfPowerOracle *o);

/**
 * Writes `c_0..c_{n-1}` of the monic characteristic polynomial
 * `x^n + c_{n-1} x^{n-1} + ... + c_0`.
 *
 * # Safety
 * `o` must be valid and `out` must hold `len` values.
 */
enum FnfStatus fnf_power_oracle_charpoly(const struct FnfPowerOracle *o, uint64_t *out, size_t len);

/**
 * Writes `(A^1)_{ij}, ..., (A^h)_{ij}` into `out[0..h]`, `1 <= h <= n`.
 *
 * # Safety
 * `o` must be valid and `out` must hold `h` values.
 */
enum FnfStatus fnf_power_oracle_cell_powers(const struct FnfPowerOracle *o,
                                            size_t i,
                                            size_t j,
                                            size_t h,
                                            uint64_t *out);

/**
 * Writes `(A^k)_{S,T}` for `k = 1..h` into `out`, laid out as `h` row-major
 * `|S| x |T|` blocks, `1 <= h <= n`.
 *
 * # Safety
 * `rows`/`cols` must hold `n_rows`/`n_cols` indices and `out` must hold
 * `h * n_rows * n_cols` values.
 */
enum FnfStatus fnf_power_oracle_submatrix_powers(const struct FnfPowerOracle *o,
                                                 const size_t *rows,
                                                 size_t n_rows,
                                                 const size_t *cols,
                                                 size_t n_cols,
                                                 size_t h,
                                                 uint64_t *out);

/**
 * The field prime of the oracle, or 0 for a null handle.
 *
 * # Safety
 * `o` must be null or a valid handle.
 */
uint64_t fnf_power_oracle_modulus(const struct FnfPowerOracle *o);

/**
 * Preprocesses `graph` (weighted graphs allowed). With `modulus == 0` the
 * prime is sampled with exponent `c`. `vertex_failures` enables vertex
 * entries in later updates. The oracle starts with an empty failure set.
 *
 * # Safety
 * `graph` must be valid and `out` must be a valid pointer.
 */
enum FnfStatus fnf_dso_new(const struct FnfGraph *graph,
                           bool vertex_failures,
                           uint64_t modulus,
                           uint32_t c,
                           double gamma,
                           uint64_t seed,
                           struct FnfDso **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not used afterwards.
 */
void fnf_dso_free(struct FnfDso *d);

/**
 * Replaces the failure set by the `n_edges` pairs in `edges`
 * (`u0, v0, u1, v1, ...`) and the `n_vertices` entries of `vertices`.
 *
 * # Safety
 * `edges` must hold `2 * n_edges` values and `vertices` `n_vertices`.
 */
enum FnfStatus fnf_dso_update(struct FnfDso *d,
                              const size_t *edges,
                              size_t n_edges,
                              const size_t *vertices,
                              size_t n_vertices);

/**
 * # Safety
 * `d` must be valid and `out` a valid pointer.
 */
enum FnfStatus fnf_dso_query(const struct FnfDso *d, size_t s, size_t t, uint64_t *out);

/**
 * # Safety
 * `graph` must be valid (unweighted) and `out` a valid pointer.
 */
enum FnfStatus fnf_dynamic_new(const struct FnfGraph *graph,
                               uint64_t modulus,
                               uint32_t c,
                               double gamma,
                               double alpha,
                               uint64_t seed,
                               struct FnfDynamic **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not used afterwards.
 */
void fnf_dynamic_free(struct FnfDynamic *d);

/**
 * Inserts (`insert = true`) or deletes edge `uv`.
 *
 * # Safety
 * `d` must be valid.
 */
enum FnfStatus fnf_dynamic_update(struct FnfDynamic *d, size_t u, size_t v, bool insert);

/**
 * # Safety
 * `d` must be valid and `out` a valid pointer.
 */
enum FnfStatus fnf_dynamic_query(const struct FnfDynamic *d, size_t s, size_t t, uint64_t *out);

/**
 * # Safety
 * `graph` must be valid (unweighted) and `out` a valid pointer.
 */
enum FnfStatus fnf_vertex_oracle_new(const struct FnfGraph *graph,
                                     uint64_t modulus,
                                     uint32_t c,
                                     uint64_t seed,
                                     struct FnfVertexOracle **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not used afterwards.
 */
void fnf_vertex_oracle_free(struct FnfVertexOracle *d);

/**
 * Replaces all edges at `v`: out-neighbours `outs[0..n_out]`,
 * in-neighbours `ins[0..n_in]`.
 *
 * # Safety
 * `outs` and `ins` must hold `n_out` and `n_in` values.
 */
enum FnfStatus fnf_vertex_oracle_update(struct FnfVertexOracle *d,
                                        size_t v,
                                        const size_t *outs,
                                        size_t n_out,
                                        const size_t *ins,
                                        size_t n_in);

/**
 * # Safety
 * `d` must be valid and `out` a valid pointer.
 */
enum FnfStatus fnf_vertex_oracle_query(const struct FnfVertexOracle *d,
                                       size_t s,
                                       size_t t,
                                       uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FNF_ORACLES_H */
