#ifndef THERMALOC_H
#define THERMALOC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum ThermalocStatus {
  ThermalocStatus_Ok = 0,
  ThermalocStatus_NullPointer = 1,
  ThermalocStatus_InvalidArgument = 2,
  ThermalocStatus_InvalidSize = 3,
  ThermalocStatus_OutOfRegime = 4,
  ThermalocStatus_BoundInapplicable = 5,
  ThermalocStatus_DivergentLength = 6,
  ThermalocStatus_ResourceLimit = 7,
  ThermalocStatus_DistanceUndefined = 8,
  ThermalocStatus_Utf8 = 9,
  ThermalocStatus_Internal = 10,
} ThermalocStatus;

/**
 * Opaque interaction-graph handle.
 */
typedef struct ThermalocGraph ThermalocGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds an open or periodic chain of `n` vertices.
 */
enum ThermalocStatus thermaloc_graph_chain(uintptr_t n, bool periodic, struct ThermalocGraph **out);

/**
 * Builds a rows x cols square lattice with nearest-neighbor edges.
 */
enum ThermalocStatus thermaloc_graph_square(uintptr_t rows,
                                            uintptr_t cols,
                                            bool periodic,
                                            struct ThermalocGraph **out);

/**
 * Parses the JSON document {"vertices":..,"edges":..,"local_dims":..}.
 *
 * # Safety
 * `json` must be a valid NUL-terminated C string.
 */
enum ThermalocStatus thermaloc_graph_from_json(const char *json, struct ThermalocGraph **out);

/**
 * Serializes the graph to its JSON document; free with
 * `thermaloc_string_free`.
 *
 * # Safety
 * `g` must be a live handle from one of the graph constructors.
 */
enum ThermalocStatus thermaloc_graph_to_json(const struct ThermalocGraph *g, char **out);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void thermaloc_string_free(char *s);

/**
 * Releases a graph handle.
 *
 * # Safety
 * `g` must come from a graph constructor and not have been freed already.
 */
void thermaloc_graph_free(struct ThermalocGraph *g);

/**
 * Number of vertices.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum ThermalocStatus thermaloc_graph_vertex_count(const struct ThermalocGraph *g, uintptr_t *out);

/**
 * Number of edges.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum ThermalocStatus thermaloc_graph_edge_count(const struct ThermalocGraph *g, uintptr_t *out);

/**
 * Number of connected edge subsets of size `m` containing `root_edge`
 * (the a_m contribution of that root).
 *
 * # Safety
 * `g` must be a live handle.
 */
enum ThermalocStatus thermaloc_graph_animal_count(const struct ThermalocGraph *g,
                                                  uintptr_t root_edge,
                                                  uintptr_t m,
                                                  uint64_t *out);

/**
 * Largest number of vertices within graph distance < l of a vertex.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum ThermalocStatus thermaloc_graph_n_of_l(const struct ThermalocGraph *g,
                                            uintptr_t l,
                                            uint64_t *out);

/**
 * Growth-constant bound 2 D e for the D-dimensional cubic lattice.
 */
enum ThermalocStatus thermaloc_growth_constant_cubic(uint32_t dimension, double *out);

/**
 * Growth-constant bound ((2R+1)^D - 1) e for a spread-out graph of range R.
 */
enum ThermalocStatus thermaloc_growth_constant_spread_out(uint32_t dimension,
                                                          uint32_t range,
                                                          double *out);

/**
 * alpha_y(x) = alpha e^{|x|} (e^{|x|} - 1).
 */
double thermaloc_alpha_y(double x, double alpha);

/**
 * Universal inverse critical temperature beta*.
 */
enum ThermalocStatus thermaloc_beta_star(double alpha, double j, double *out);

/**
 * Thermal correlation length xi(beta).
 */
enum ThermalocStatus thermaloc_xi(double beta, double alpha, double j, double *out);

/**
 * Minimum distance L0(beta, a) from which the clustering bound holds.
 */
enum ThermalocStatus thermaloc_l_zero(double beta, double a, double alpha, double j, double *out);

/**
 * Exponential clustering envelope for |cov^tau(A, B)|.
 */
enum ThermalocStatus thermaloc_clustering_rhs(double beta,
                                              double a,
                                              double dist,
                                              double norm_a,
                                              double norm_b,
                                              double alpha,
                                              double j,
                                              double *out);

/**
 * The tighter covariance envelope per unit operator norms.
 */
enum ThermalocStatus thermaloc_clustering_rhs_tight(double beta,
                                                    double boundary_a,
                                                    double dist,
                                                    double alpha,
                                                    double j,
                                                    double *out);

/**
 * Locality envelope for the reduced-state trace distance.
 */
enum ThermalocStatus thermaloc_locality_rhs(double beta,
                                            double boundary_s,
                                            double boundary_b,
                                            double dist,
                                            double alpha,
                                            double j,
                                            double *out);

/**
 * Trace-norm error envelope of the cluster-expansion proxy state.
 */
enum ThermalocStatus thermaloc_mpo_error_bound(uintptr_t edge_count,
                                               double l,
                                               double beta,
                                               double j,
                                               double alpha,
                                               double *out);

/**
 * Tensor-size exponent bound of the cluster-expansion approximation.
 */
enum ThermalocStatus thermaloc_tensor_size_bound(uintptr_t edge_count,
                                                 double eps,
                                                 double beta,
                                                 double j,
                                                 double alpha,
                                                 uint32_t dimension,
                                                 double m_const,
                                                 double c_const,
                                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* THERMALOC_H */
