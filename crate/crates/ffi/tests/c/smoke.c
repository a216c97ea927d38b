#include <math.h>
#include <stdio.h>
#include "glscov.h"

int main(void) {
    GlsPsi *psi = NULL;
    if (gls_psi_from_json("{\"kind\":\"power\",\"m\":1}", &psi) != GLS_STATUS_OK) return 1;
    double value = 0.0, argmax = 0.0;
    if (gls_fundamental(psi, exp(-2.0), NAN, &value, &argmax) != GLS_STATUS_OK) return 2;
    if (fabs(value - 1.0 / (2.0 * exp(1.0))) > 1e-9) return 3;
    GlsBound b;
    if (gls_identical_bound(psi, exp(-2.0), 1.0, 1.0, &b) != GLS_STATUS_OK || fabs(b.value - 48.0) > 1e-6) return 4;
    if (gls_fundamental(psi, -1.0, NAN, &value, NULL) != GLS_STATUS_DOMAIN) return 5;
    if (gls_last_error_message() == NULL) return 6;
    gls_psi_free(psi);
    printf("ok %s\n", gls_version());
    return 0;
}
