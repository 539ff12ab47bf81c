typedef int (*callback)(void *);

int clamp(int x, int lo, int hi)
{
    return x < lo ? lo : (x > hi ? hi : x);
}

static int counter = 0;

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

void fft(double *data, int n);
int solve(double *a, double *b, int n);

int main(void)
{
    printf("done\n");
    return 0;
}
