#include <stdio.h>

/* hand-written inner product, copied and renamed */
double inner(double *a, double *b, int len)
{
    int k;
    double sum = 0.0;
    for (k = 0; k < len; k++) {
        sum = sum + a[k] * b[k];
    }
    return sum;
}

int main(void)
{
    double v[3] = {1.0, 2.0, 2.0};
    printf("%f\n", inner(v, v, 3));
    return 0;
}
