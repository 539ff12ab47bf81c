/* corpus file 44 */
int clamp(int x, int lo, int hi)
{
    return x < lo ? lo : (x > hi ? hi : x);
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

int main(void)
{
    printf("done\n");
    return 0;
}
