#include <stdio.h>
#include <math.h>
#include "lbm_quartic.h"

#define CHECK(call)                                                   \
    do {                                                              \
        LqStatus s_ = (call);                                         \
        if (s_ != LQ_STATUS_OK) {                                     \
            char msg[256];                                            \
            lq_last_error(msg, sizeof msg);                           \
            fprintf(stderr, "%s: %d %s\n", #call, (int)s_, msg);      \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    LqParams *p = NULL;
    CHECK(lq_params_quartic_default(&p));

    LqTransport t;
    CHECK(lq_params_transport(p, &t));
    printf("mu %.9f zeta %.9f\n", t.mu, t.zeta);

    double dir[3] = {1, 0, 0};
    double re, im;
    CHECK(lq_spectral_multiplier(p, dir, 2 * M_PI / 16, LQ_BRANCH_SHEAR1, &re, &im));

    enum { N = 16 };
    static double drho[N * 4 * 4], q[3 * N * 4 * 4];
    LqLattice *l = NULL;
    CHECK(lq_lattice_periodic(p, N, 4, 4, 1.0, &l));
    for (int s = 0; s < N * 4 * 4; s++) {
        q[3 * s + 1] = 1e-6 * sin(2 * M_PI * (s % N) / N);
    }
    CHECK(lq_lattice_set_equilibrium(l, drho, q, N * 4 * 4));
    CHECK(lq_lattice_run(l, 200));
    CHECK(lq_lattice_moments(l, NULL, q, N * 4 * 4));
    double before = q[3 * 4 + 1];
    CHECK(lq_lattice_run(l, 100));
    CHECK(lq_lattice_moments(l, NULL, q, N * 4 * 4));
    double ratio = q[3 * 4 + 1] / before;
    printf("decay %.12f predicted %.12f\n", ratio, pow(re, 100));
    lq_lattice_free(l);
    lq_params_free(p);

    LqParams *bad = NULL;
    if (lq_params_quartic(0.623538, 0.5, 0.5, 1.3, 1.2, 1.0, &bad) != LQ_STATUS_SINGULAR_PARAMETERS) {
        return 2;
    }
    char msg[256];
    lq_last_error(msg, sizeof msg);
    printf("error %s\n", msg);
    return fabs(ratio / pow(re, 100) - 1) < 1e-4 ? 0 : 3;
}
