/* corpus file 29 */
#ifdef USE_DOUBLE
#define real double
#endif

void fft(double *data, int n);
int solve(double *a, double *b, int n);

int run_pipeline(double *sig, int n)
{
    double *tmp = malloc(sizeof(double) * n);
    memcpy(tmp, sig, sizeof(double) * n);
    fft(tmp, n);
    free(tmp);
    return solve(sig, tmp, n) == 0;
}

size_t bytes_for(int n)
{
    size_t total = sizeof(double) * n; /* payload */
    total += sizeof total;
    return total;
}

void fill(char *buf, int n, char c)
{
    int i;
    for (i = 0; i < n; i++) { buf[i] = c; }
    buf[n - 1] = '\0';
    if (c == '}') { buf[0] = '{'; }
}

const char *greeting = "hello {world}; (not code)";

void axpy(double a, double *x, double *y, int n)
{
    int i;
    for (i = 0; i < n; i++) {
        y[i] = a * x[i] + y[i];
    }
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
