#include <stdio.h>
#include <string.h>
#include "ffc.h"

#define CHECK(x) do { if ((x) != FFC_STATUS_OK) { fprintf(stderr, "%s: %s\n", #x, ffc_last_error()); return 1; } } while (0)

int main(void) {
    char *bound = NULL;
    double approx = 0.0;
    CHECK(ffc_ramanujan_bound(3, &bound, &approx));
    if (strcmp(bound, "2*sqrt(2)") != 0) return 2;
    ffc_string_free(bound);

    FfcCertificate *cert = NULL;
    uint64_t trial = 0;
    CHECK(ffc_search(FFC_MODE_BIPARTITE, 5, 3, 1000, 1, false, &cert, &trial));
    if (cert == NULL) return 3;
    FfcVerdict v;
    CHECK(ffc_certificate_verdict(cert, &v));
    bool ok = false;
    CHECK(ffc_certificate_reverify(cert, &ok));
    printf("trial %llu verdict %d reverified %d\n", (unsigned long long)trial, (int)v, (int)ok);
    ffc_certificate_free(cert);
    return (v == FFC_VERDICT_STRICTLY_RAMANUJAN && ok) ? 0 : 4;
}
