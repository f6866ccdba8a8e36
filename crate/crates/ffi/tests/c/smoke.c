#include <math.h>
#include <stdio.h>
#include "tfdiff.h"

int main(void) {
    if (tfdiff_abi_version() != TFDIFF_ABI_VERSION) return 1;
    TfdiffKernel *k = NULL, *ell = NULL;
    if (tfdiff_kernel_rl(0.5, 1e-2, 100, &k) != TFDIFF_STATUS_OK) return 2;
    if (tfdiff_kernel_complement(k, &ell) != TFDIFF_STATUS_OK) return 3;
    double r = 1.0;
    if (tfdiff_kernel_sonine_residual(k, ell, &r) != TFDIFF_STATUS_OK || r > 1e-10) return 4;
    double e = 0.0;
    if (tfdiff_mittag_leffler(0.5, -1.0, &e) != TFDIFF_STATUS_OK || fabs(e - 0.42758357615580705) > 1e-12) return 5;
    if (tfdiff_kernel_rl(2.0, 1e-2, 10, &k) != TFDIFF_STATUS_DOMAIN) return 6;
    char msg[256];
    if (tfdiff_last_error_message(msg, sizeof msg) < 2) return 7;
    tfdiff_kernel_free(ell);
    tfdiff_kernel_free(k);
    printf("ok\n");
    return 0;
}
