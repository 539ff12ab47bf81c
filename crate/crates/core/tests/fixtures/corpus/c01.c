#ifdef USE_DOUBLE
#define real double
#endif
#include <stdio.h>
#include <math.h>

void fft(double *data, int n);
int solve(double *a, double *b, int n);

void transpose(double *a, double *b, int n)
{
    int i, j;
    for (i = 0; i < n; i++)
        for (j = 0; j < n; j++)
            b[j * n + i] = a[i * n + j];
}

int run_pipeline(double *sig, int n)
{
    double *tmp = malloc(sizeof(double) * n);
    memcpy(tmp, sig, sizeof(double) * n);
    fft(tmp, n);
    free(tmp);
    return solve(sig, tmp, n) == 0;
}

int clamp(int x, int lo, int hi)
{
    return x < lo ? lo : (x > hi ? hi : x);
}

struct point {
    double x;
    double y;
};

static int counter = 0;

int main(int argc, char **argv)
{
    int n = argc > 1 ? atoi(argv[1]) : 16;
    double *v = calloc(n, sizeof(double));
    int i;
    for (i = 0; i < n; i++) v[i] = i * 0.5;
    printf("%d\n", n);
    free(v);
    return 0;
}
