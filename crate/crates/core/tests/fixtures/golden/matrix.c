#include <stdio.h>
#include <stdlib.h>

#define SIZE 2048

/* LU decomposition without pivoting, adapted from a textbook routine. */
void decompose(double *m, int size)
{
    int r, c, p;
    for (p = 0; p < size; p++) {
        for (r = p + 1; r < size; r++) {
            // multiplier for row r
            m[r * size + p] = m[r * size + p] / m[p * size + p];
            for (c = p + 1; c < size; c++) {
                m[r * size + c] = m[r * size + c] - m[r * size + p] * m[p * size + c];
            }
        }
    }
}

void fill_orthogonal(double *m, int size)
{
    int i, j;
    for (i = 0; i < size; i++)
        for (j = 0; j < size; j++)
            m[i * size + j] = (i == j) ? 2.0 : 1.0 / (1.0 + i + j);
}

int main(void)
{
    double *m = malloc(sizeof(double) * SIZE * SIZE);
    fill_orthogonal(m, SIZE);
    decompose(m, SIZE);
    printf("%f\n", m[SIZE * SIZE - 1]);
    free(m);
    return 0;
}
