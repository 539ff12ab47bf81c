#include "gpu_fft.h"
#include <stdio.h>
#include <math.h>

#define N 2048

/* In-place complex FFT of n points stored as interleaved re/im pairs. */
void fft(double *data, int n);

static double signal[2 * N];

void make_signal(double *data, int n)
{
    int i;
    for (i = 0; i < n; i++) {
        data[2 * i] = sin(0.05 * i) + 0.5 * sin(0.31 * i);
        data[2 * i + 1] = 0.0;
    }
}

int main(void)
{
    int i;
    double best = 0.0;
    make_signal(signal, N);
    gpu_fft_forward(signal, N);
    for (i = 0; i < N; i++) {
        double mag = signal[2 * i] * signal[2 * i] + signal[2 * i + 1] * signal[2 * i + 1];
        if (mag > best)
            best = mag;
    }
    printf("peak %f\n", sqrt(best));
    return 0;
}
