/* Builds the bundle of L(2,4), prints its distortion and bound, and checks
 * the error path. Link against libqdist_ffi. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qdist.h"

int main(void) {
    QdGroup *g = NULL;
    if (qd_group_new("{\"family\":\"lamplighter-fin\",\"m\":2,\"n\":4}", &g) != QD_STATUS_OK) {
        fprintf(stderr, "group: %s\n", qd_last_error_message());
        return 1;
    }
    uint64_t order = 0;
    uint32_t diam = 0;
    if (qd_group_order(g, &order) != QD_STATUS_OK || qd_group_diameter(g, &diam) != QD_STATUS_OK) return 1;

    char *prod = NULL;
    if (qd_group_mul(g, "lamps:0000|pos:1", "lamps:1000|pos:0", &prod) != QD_STATUS_OK) return 1;

    QdBundle *b = NULL;
    if (qd_bundle_new(g, 2.0, 0, &b) != QD_STATUS_OK) {
        fprintf(stderr, "bundle: %s\n", qd_last_error_message());
        return 1;
    }
    double dist = 0.0;
    QdApriori bound;
    if (qd_bundle_distortion(b, 0, &dist) != QD_STATUS_OK || qd_bundle_apriori(b, &bound) != QD_STATUS_OK) return 1;

    QdGroup *bad = NULL;
    QdStatus s = qd_group_new("{\"family\":\"lamplighter-fin\",\"m\":2,\"n\":40}", &bad);
    int cap_ok = s == QD_STATUS_CAP_EXCEEDED && bad == NULL && strlen(qd_last_error_message()) > 0;

    double c4[16] = {0, 1, 2, 1, 1, 0, 1, 2, 2, 1, 0, 1, 1, 2, 1, 0};
    double c2 = 0.0;
    if (qd_exact_c2(c4, 4, 1e-4, &c2) != QD_STATUS_OK) return 1;

    printf("order=%llu diam=%u product=%s dist=%.6f bound=%.6f c2=%.5f cap_ok=%d\n",
           (unsigned long long)order, diam, prod, dist, bound.dist_bound, c2, cap_ok);
    qd_string_free(prod);
    qd_bundle_free(b);
    qd_group_free(g);
    return (dist <= bound.dist_bound + 1e-9 && fabs(c2 - sqrt(2.0)) < 1e-4 && cap_ok) ? 0 : 1;
}
