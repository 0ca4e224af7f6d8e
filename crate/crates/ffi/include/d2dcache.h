#ifndef D2DCACHE_H
#define D2DCACHE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum D2dStatus {
  D2D_STATUS_OK = 0,
  // A required pointer argument was null.
  D2D_STATUS_NULL_POINTER = 1,
  // An argument is outside the function's domain.
  D2D_STATUS_INVALID_ARGUMENT = 2,
  // An array length does not match the model dimensions.
  D2D_STATUS_DIMENSION_MISMATCH = 3,
  // Numerical integration did not reach its tolerance.
  D2D_STATUS_QUADRATURE_FAILED = 4,
  // The placement optimizer did not converge.
  D2D_STATUS_NOT_CONVERGED = 5,
  // The library panicked; this is a bug.
  D2D_STATUS_PANIC = 6,
} D2dStatus;

// Mixture law for the number of interferers closer than the server.
typedef enum D2dWeightMode {
  // Truncated binomial weights.
  D2D_WEIGHT_MODE_PAPER = 0,
  // Hypergeometric weights.
  D2D_WEIGHT_MODE_EXACT = 1,
} D2dWeightMode;

// Opaque table of coverage probabilities for every serving rank.
typedef struct D2dCoverageTable D2dCoverageTable;

// Opaque network configuration.
typedef struct D2dNetwork D2dNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *d2d_version(void);

// Static description of a status code.
const char *d2d_status_message(enum D2dStatus status);

// ₂F₁(1, 2/α; 1 + 2/α; z) for α > 2, z ≤ 0.
enum D2dStatus d2d_hyp2f1(double alpha, double z, double *out_value);

// C(α, s, x) = x²·(1 − ₂F₁(1, 2/α; 1 + 2/α; −x^α/s)).
enum D2dStatus d2d_interference_factor(double alpha, double s, double x, double *out_value);

// Creates a network of `n_total` devices, `n_active` of them transmitting,
// in a disk of radius `radius` with path-loss exponent `alpha`.
enum D2dStatus d2d_network_new(size_t n_total,
                               size_t n_active,
                               double radius,
                               double alpha,
                               struct D2dNetwork **out_network);

// Releases a network; null is ignored.
void d2d_network_free(struct D2dNetwork *network);

// Laplace transform of the interference at `s` given serving distance `r`
// and serving rank `k` (1-based).
enum D2dStatus d2d_laplace_interference(const struct D2dNetwork *network,
                                        double s,
                                        double r,
                                        size_t k,
                                        enum D2dWeightMode mode,
                                        double *out_value);

// Coverage probability with the k-th closest device serving, linear SIR
// threshold `beta`.
enum D2dStatus d2d_coverage(const struct D2dNetwork *network,
                            size_t k,
                            double beta,
                            enum D2dWeightMode mode,
                            double *out_value);

// Upper bound on the coverage probability that ignores the interferers
// farther than the server.
enum D2dStatus d2d_coverage_bound(const struct D2dNetwork *network,
                                  size_t k,
                                  double beta,
                                  enum D2dWeightMode mode,
                                  double *out_value);

// Monte Carlo coverage estimate and its standard error.
enum D2dStatus d2d_simulate_coverage(const struct D2dNetwork *network,
                                     size_t k,
                                     double beta,
                                     uint64_t trials,
                                     uint64_t seed,
                                     double *out_estimate,
                                     double *out_stderr);

// Computes the coverage probability of every serving rank at `beta`.
enum D2dStatus d2d_coverage_table_new(const struct D2dNetwork *network,
                                      double beta,
                                      enum D2dWeightMode mode,
                                      struct D2dCoverageTable **out_table);

// Releases a coverage table; null is ignored.
void d2d_coverage_table_free(struct D2dCoverageTable *table);

// Number of ranks (N_t) in the table.
enum D2dStatus d2d_coverage_table_len(const struct D2dCoverageTable *table, size_t *out_len);

// Coverage probability of rank `k` (1-based).
enum D2dStatus d2d_coverage_table_get(const struct D2dCoverageTable *table,
                                      size_t k,
                                      double *out_value);

// Total hit probability of the caching probabilities `probs[0..size]` for a
// Zipf(`gamma`) library with `cache_capacity` slots per device.
enum D2dStatus d2d_hit_probability(const struct D2dCoverageTable *table,
                                   const double *probs,
                                   size_t size,
                                   double gamma,
                                   size_t cache_capacity,
                                   double *out_value);

// Optimal caching probabilities, written to `out_probs[0..size]`, and the
// maximum hit probability.
enum D2dStatus d2d_optimize_placement(const struct D2dCoverageTable *table,
                                      size_t size,
                                      double gamma,
                                      size_t cache_capacity,
                                      double *out_probs,
                                      double *out_max_hit);

// Monte Carlo estimate of the total hit probability.
enum D2dStatus d2d_simulate_hit(const struct D2dNetwork *network,
                                const double *probs,
                                size_t size,
                                double gamma,
                                size_t cache_capacity,
                                double beta,
                                uint64_t trials,
                                uint64_t seed,
                                double *out_estimate,
                                double *out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* D2DCACHE_H */
