#include "gpu_fft.h"
#include <stdio.h>

void fft(double *data, int n);

void forward(double *buf, int n)
{
    fft(buf, n);
}

int main(void)
{
    double a[16], b[16];
    int i;
    for (i = 0; i < 16; i++) {
        a[i] = i;
        b[i] = 16 - i;
    }
    forward(a, 8);
    gpu_fft_forward(b, 8); /* second transform */
    printf("%f %f\n", a[0], b[0]);
    return 0;
}
