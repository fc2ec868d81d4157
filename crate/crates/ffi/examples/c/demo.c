#include "annulus_bem.h"
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

int main(void) {
    printf("version %s\n", ab_version());
    AbMesh *mesh = NULL;
    if (ab_mesh_build(0.0, 0.0, 2.0, 0.0, 0.0, 1.0, 40, 40, &mesh) != AbOk) return 1;
    size_t n = ab_mesh_element_count(mesh);
    double *xy = malloc(2 * n * sizeof(double));
    if (ab_mesh_midpoints(mesh, xy, 2 * n) != AbOk) return 1;
    double *pot = malloc(n * sizeof(double));
    for (size_t k = 0; k < n; ++k)
        pot[k] = log(hypot(xy[2 * k], xy[2 * k + 1]));
    AbSolution *sol = NULL;
    if (ab_solve_dirichlet(mesh, pot, n, &sol) != AbOk) {
        char msg[256];
        ab_last_error_message(msg, sizeof msg);
        fprintf(stderr, "solve failed: %s\n", msg);
        return 1;
    }
    double value = 0.0;
    ab_eval_interior(sol, 1.5, 0.0, &value);
    printf("n=%zu residual=%.3e A(1.5,0)=%.6f (ln 1.5 = %.6f)\n",
           n, ab_solution_residual_norm(sol), value, log(1.5));
    ab_solution_free(sol);
    ab_mesh_free(mesh);
    free(xy);
    free(pot);
    return fabs(value - log(1.5)) < 1e-2 ? 0 : 1;
}
