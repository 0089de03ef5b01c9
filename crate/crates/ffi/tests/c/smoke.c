#include <stdio.h>
#include <string.h>

#include "rabi_sym.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        RabiStatus s_ = (call);                                            \
        if (s_ != RABI_STATUS_OK) {                                        \
            fprintf(stderr, "%s -> %d: %s\n", #call, s_, rabi_last_error()); \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    RabiParams *p = NULL;
    CHECK(rabi_params_new(1.0, 0.0, 0.3, &p));
    double beta = 0.0;
    CHECK(rabi_params_beta(p, &beta));
    if (beta < 0.799 || beta > 0.801) return 2;

    RabiCoeffTable *solved = NULL, *closed = NULL;
    CHECK(rabi_coeffs_solve(p, 2, &solved));
    CHECK(rabi_coeffs_closed_form(p, 2, &closed));
    double err = 1.0;
    CHECK(rabi_coeffs_max_relative_error(solved, closed, &err));
    if (err > 1e-10) return 3;

    double resid = 1.0;
    CHECK(rabi_coeffs_commutator_residual(solved, RABI_SECTOR_ODD, 40, &resid));
    if (resid > 1e-9) return 4;

    char *json = NULL;
    CHECK(rabi_coeffs_to_json(solved, &json));
    if (strstr(json, "\"entries\"") == NULL) return 5;
    rabi_string_free(json);

    RabiParams *bad = NULL;
    if (rabi_params_new(1.0, 0.0, 0.7, &bad) != RABI_STATUS_INVALID_PARAMS) return 6;
    if (strlen(rabi_last_error()) == 0) return 7;

    rabi_coeffs_free(solved);
    rabi_coeffs_free(closed);
    rabi_params_free(p);
    puts("ok");
    return 0;
}
