#include "gpu_lu.h"
#include "gpu_fft.h"
#include <stdlib.h>

void fft(double *data, int n);

void lu_factor(double *a, int n)
{
    gpu_lu_decompose(a, n);
}

int main(void)
{
    int n = 64;
    double *a = calloc(n * n, sizeof(double));
    double *sig = calloc(2 * n, sizeof(double));
    lu_factor(a, n);
    gpu_fft_forward(sig, n);
    free(a);
    free(sig);
    return 0;
}
