/* Minimal consumer of the thermaloc C ABI: build a lattice, count animals,
 * and evaluate the clustering bound at a fraction of the critical point.
 *
 * Build (from the workspace root, after `cargo build --release -p thermaloc-ffi`):
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      target/release/libthermaloc_ffi.a -lopenblas -lm -o demo
 */
#include <stdio.h>
#include "thermaloc.h"

int main(void) {
    ThermalocGraph *g = NULL;
    if (thermaloc_graph_chain(10, false, &g) != ThermalocStatus_Ok) return 1;

    uint64_t a3 = 0;
    thermaloc_graph_animal_count(g, 4, 3, &a3);

    double alpha = 0.0, beta_star = 0.0, rhs = 0.0;
    thermaloc_growth_constant_cubic(1, &alpha);
    thermaloc_beta_star(alpha, 1.0, &beta_star);
    ThermalocStatus st =
        thermaloc_clustering_rhs(0.5 * beta_star, 2.0, 4.0, 1.0, 1.0, alpha, 1.0, &rhs);

    printf("a_3 = %llu, beta* = %.6f, rhs(dist=4) = %.6e (status %d)\n",
           (unsigned long long)a3, beta_star, rhs, (int)st);
    thermaloc_graph_free(g);
    return st == ThermalocStatus_Ok ? 0 : 2;
}
