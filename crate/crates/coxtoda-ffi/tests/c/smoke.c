#include <stdio.h>
#include <string.h>
#include "coxtoda.h"

#define CHECK(call) do { CoxStatus s_ = (call); if (s_ != COX_STATUS_OK) { \
    fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, cox_last_error()); return 1; } } while (0)

int main(void) {
    CoxPair *tri = NULL, *rel = NULL;
    CoxParams *p = NULL, *q = NULL, *back = NULL;
    CoxMoments *m = NULL;
    char *json = NULL;

    CHECK(cox_pair_tridiagonal(3, &tri));
    CHECK(cox_pair_relativistic(3, &rel));
    CHECK(cox_params_from_json("{\"d\": [\"2\", \"1/3\", \"5\"], \"c\": [\"1\", \"3/2\"]}", &p));
    CHECK(cox_gbd(tri, rel, p, COX_GBD_ROUTE_TABLE, &q));
    CHECK(cox_moments_of(rel, q, &m));
    CHECK(cox_restore_params(tri, m, &back));
    CHECK(cox_params_to_json(back, &json));
    printf("%s\n", json);
    cox_string_free(json);

    CoxPair *bad = NULL;
    if (cox_pair_tridiagonal(0, &bad) == COX_STATUS_OK || strlen(cox_last_error()) == 0) return 2;

    cox_params_free(p);
    cox_params_free(q);
    cox_params_free(back);
    cox_moments_free(m);
    cox_pair_free(tri);
    cox_pair_free(rel);
    return 0;
}
