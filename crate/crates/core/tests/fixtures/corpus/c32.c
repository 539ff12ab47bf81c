#include <stdio.h>
#include <stdlib.h>
#define SQR(x) ((x) * (x))

struct point {
    double x;
    double y;
};

int clamp(int x, int lo, int hi)
{
    return x < lo ? lo : (x > hi ? hi : x);
}

void transpose(double *a, double *b, int n)
{
    int i, j;
    for (i = 0; i < n; i++)
        for (j = 0; j < n; j++)
            b[j * n + i] = a[i * n + j];
}

void axpy(double a, double *x, double *y, int n)
{
    int i;
    for (i = 0; i < n; i++) {
        y[i] = a * x[i] + y[i];
    }
}

size_t bytes_for(int n)
{
    size_t total = sizeof(double) * n; /* payload */
    total += sizeof total;
    return total;
}

double mean(struct point *p, int n)
{
    int i;
    double s = 0;
    for (i = 0; i < n; i++) {
        s = s + p[i].x + p->y;
    }
    return n > 0 ? s / n : 0.0;
}

double norm(double *v, int n)
{
    double s = 0.0;
    int i = 0;
    while (i < n) {
        s += v[i] * v[i];
        i++;
    }
    return sqrt(s);
}
