#ifndef RDETAIL_H
#define RDETAIL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdtStatus {
  RDT_STATUS_OK = 0,
  // A required pointer argument was null.
  RDT_STATUS_NULL = 1,
  RDT_STATUS_DOMAIN = 2,
  RDT_STATUS_ARGUMENT = 3,
  RDT_STATUS_VALIDATION = 4,
  RDT_STATUS_NUMERICAL = 5,
  RDT_STATUS_RESOURCE = 6,
  // The library panicked; the handle arguments should be considered unusable.
  RDT_STATUS_PANIC = 7,
} RdtStatus;

typedef enum RdtVerdict {
  RDT_VERDICT_CONVERGED_TO_PRODUCT = 0,
  RDT_VERDICT_STALLED = 1,
  RDT_VERDICT_BUDGET_EXHAUSTED = 2,
} RdtVerdict;

// One-dimensional law.
typedef struct RdtDist RdtDist;

// Recursive distributional equation with its node budget.
typedef struct RdtRde RdtRde;

// Result of a bivariate grid iteration.
typedef struct RdtTrace RdtTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next failing call on this thread.
const char *rdt_last_error(void);

// Library version as a static NUL-terminated string.
const char *rdt_version(void);

// `ν_a`, `a ∈ [1/2, 1]`.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_dist_nu_a(double a, struct RdtDist **out);

// `ν^r`, `r ≥ 3`.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_dist_nu_r(uint32_t r, struct RdtDist **out);

// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_dist_bernoulli(double p, struct RdtDist **out);

// Point mass at `x` (`INFINITY` for `∞`).
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_dist_point(double x, struct RdtDist **out);

// # Safety
// `d` must be null or a handle from an `rdt_dist_*` constructor, not yet freed.
void rdt_dist_free(struct RdtDist *d);

// `P(X ≤ x)`; at `x = INFINITY` this is 1.
//
// # Safety
// `d` must be a live handle and `out` valid for one write.
enum RdtStatus rdt_dist_cdf(const struct RdtDist *d, double x, double *out);

// Quantile at level `p ∈ [0, 1]`; `INFINITY` when it falls in the atom at `∞`.
//
// # Safety
// `d` must be a live handle and `out` valid for one write.
enum RdtStatus rdt_dist_quantile(const struct RdtDist *d, double p, double *out);

// Mass of the atom at `∞`.
//
// # Safety
// `d` must be a live handle and `out` valid for one write.
enum RdtStatus rdt_dist_atom_inf(const struct RdtDist *d, double *out);

// Frozen-percolation RDE on the `r`-regular tree.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_rde_frozen_perc(uint32_t r, struct RdtRde **out);

// Mod-2 RDE with flip probability `q`.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_rde_mod2(double q, struct RdtRde **out);

// Quicksort RDE.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_rde_quicksort(struct RdtRde **out);

// Replaces the maximum tree size accepted by the samplers.
//
// # Safety
// `rde` must be a live handle.
enum RdtStatus rdt_rde_set_node_budget(struct RdtRde *rde, uint64_t budget);

// # Safety
// `rde` must be null or a handle from an `rdt_rde_*` constructor, not yet freed.
void rdt_rde_free(struct RdtRde *rde);

// `n` root values of depth-`depth` trees with i.i.d. `boundary` leaves,
// written to `out[0..n]`.
//
// # Safety
// `rde` and `boundary` must be live handles; `out` must be valid for `n` writes.
enum RdtStatus rdt_sample_roots(const struct RdtRde *rde,
                                const struct RdtDist *boundary,
                                uint32_t depth,
                                size_t n,
                                uint64_t seed,
                                double *out);

// `n` coupled root pairs: shared diagonal boundary with marginal `boundary`,
// independent innovations. Writes `xs[0..n]` and `ys[0..n]`.
//
// # Safety
// `rde` and `boundary` must be live handles; `xs` and `ys` must each be
// valid for `n` writes.
enum RdtStatus rdt_sample_coupled(const struct RdtRde *rde,
                                  const struct RdtDist *boundary,
                                  uint32_t depth,
                                  size_t n,
                                  uint64_t seed,
                                  double *xs,
                                  double *ys);

// Fixed point of the mod-2 `θ` recursion from `θ = 0`.
//
// # Safety
// `theta` and `iterations` must be valid for one write each.
enum RdtStatus rdt_theta_fixed(double q, double tol, double *theta, size_t *iterations);

// `P(X = Y)` for mod-2 chains coupled at depth `n`.
double rdt_mod2_pair_prob(double q, uint32_t n);

// Maximum cell bound of the `k_cells` equal-length partition (`r = 3`).
//
// # Safety
// `bound` must be valid for one write.
enum RdtStatus rdt_partition_check(size_t k_cells, double *bound);

// Least partition size whose bound is below `eps`.
//
// # Safety
// `k_cells` and `bound` must be valid for one write each.
enum RdtStatus rdt_find_min_partition(double eps, size_t *k_cells, double *bound);

// Sup-norm residual of the univariate grid operator applied to `d` on `k` knots.
//
// # Safety
// `d` must be a live handle and `out` valid for one write.
enum RdtStatus rdt_fixed_point_residual(const struct RdtDist *d, uint32_t r, size_t k, double *out);

// Iterates the bivariate operator from the diagonal coupling.
//
// # Safety
// `out` must be valid for one write.
enum RdtStatus rdt_iterate_diagonal(uint32_t r,
                                    size_t k,
                                    size_t max_iters,
                                    double tol,
                                    struct RdtTrace **out);

// Number of trace entries (`iterations + 1`).
//
// # Safety
// `t` must be a live handle.
size_t rdt_trace_len(const struct RdtTrace *t);

// Copies up to `len` trace values into `buf`.
//
// # Safety
// `t` must be a live handle and `buf` valid for `len` writes.
enum RdtStatus rdt_trace_values(const struct RdtTrace *t, double *buf, size_t len);

// # Safety
// `t` must be a live handle and `out` valid for one write.
enum RdtStatus rdt_trace_verdict(const struct RdtTrace *t, enum RdtVerdict *out);

// # Safety
// `t` must be null or a handle from [`rdt_iterate_diagonal`], not yet freed.
void rdt_trace_free(struct RdtTrace *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDETAIL_H */
