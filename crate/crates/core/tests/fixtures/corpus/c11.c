#include <stdio.h>

void fft(double *data, int n);
int solve(double *a, double *b, int n);

static int counter = 0;

int run_pipeline(double *sig, int n)
{
    double *tmp = malloc(sizeof(double) * n);
    memcpy(tmp, sig, sizeof(double) * n);
    fft(tmp, n);
    free(tmp);
    return solve(sig, tmp, n) == 0;
}
