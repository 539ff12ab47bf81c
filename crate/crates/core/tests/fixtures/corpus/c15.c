#define LEN 128
#include <stdio.h>

typedef struct {
    int rows, cols;
    double *data;
} matrix;

static void scale_rows(double a[][4], int rows, double f)
{
    int r, c;
    for (r = 0; r < rows; r++) {
        for (c = 0; c < 4; c++) {
            a[r][c] *= f;
        }
    }
}

void fill(char *buf, int n, char c)
{
    int i;
    for (i = 0; i < n; i++) { buf[i] = c; }
    buf[n - 1] = '\0';
    if (c == '}') { buf[0] = '{'; }
}

int clamp(int x, int lo, int hi)
{
    return x < lo ? lo : (x > hi ? hi : x);
}

struct point {
    double x;
    double y;
};

void process(matrix *m)
{
    int i;
    double *d = m->data;
    do {
        d[0] = d[0] * 0.5;
    } while (d[0] > 1.0);
    for (i = 0; i < m->rows * m->cols; i++) {
        if (d[i] < 0) continue;
        if (d[i] > 100) break;
        d[i] = (double)(int)d[i];
    }
}

static int counter = 0;

enum color { RED, GREEN = 3, BLUE };

int main(void)
{
    printf("done\n");
    return 0;
}
