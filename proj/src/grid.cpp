#include "cylflow/grid.hpp"

#include "cylflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace cylflow {

double Grid::radius() const
{
    double r = std::min(-lo[0], hi[0]);
    if (dim == 2) r = std::min(r, std::min(-lo[1], hi[1]));
    return r;
}

bool Grid::same_as(const Grid& o) const
{
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (n[a] != o.n[a] || lo[a] != o.lo[a] || hi[a] != o.hi[a]) return false;
    return true;
}

Grid make_grid(int dim, int nodes, double half_width)
{
    if (dim < 1 || dim > 2) fail("unsupported-grid-dimension", "grids are 1-D or 2-D");
    if (nodes < 6) fail("grid-too-small", "need at least 6 nodes per axis");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        g.n[a] = nodes;
        g.lo[a] = -half_width;
        g.hi[a] = half_width;
    }
    return g;
}

void fd_d1(const double* f, std::ptrdiff_t s, int n, double h, double* out, std::ptrdiff_t os)
{
    const double c = 1.0 / (12.0 * h);
    auto F = [&](int i) { return f[i * s]; };
    out[0] = c * (-25 * F(0) + 48 * F(1) - 36 * F(2) + 16 * F(3) - 3 * F(4));
    out[os] = c * (-3 * F(0) - 10 * F(1) + 18 * F(2) - 6 * F(3) + F(4));
    for (int i = 2; i < n - 2; ++i)
        out[i * os] = c * (F(i - 2) - 8 * F(i - 1) + 8 * F(i + 1) - F(i + 2));
    const int m = n - 1;
    out[(m - 1) * os] = -c * (-3 * F(m) - 10 * F(m - 1) + 18 * F(m - 2) - 6 * F(m - 3) + F(m - 4));
    out[m * os] = -c * (-25 * F(m) + 48 * F(m - 1) - 36 * F(m - 2) + 16 * F(m - 3) - 3 * F(m - 4));
}

void fd_d2(const double* f, std::ptrdiff_t s, int n, double h, double* out, std::ptrdiff_t os)
{
    const double c = 1.0 / (12.0 * h * h);
    auto F = [&](int i) { return f[i * s]; };
    out[0] = c * (45 * F(0) - 154 * F(1) + 214 * F(2) - 156 * F(3) + 61 * F(4) - 10 * F(5));
    out[os] = c * (10 * F(0) - 15 * F(1) - 4 * F(2) + 14 * F(3) - 6 * F(4) + F(5));
    for (int i = 2; i < n - 2; ++i)
        out[i * os] = c * (-F(i - 2) + 16 * F(i - 1) - 30 * F(i) + 16 * F(i + 1) - F(i + 2));
    const int m = n - 1;
    out[(m - 1) * os] = c * (10 * F(m) - 15 * F(m - 1) - 4 * F(m - 2) + 14 * F(m - 3) - 6 * F(m - 4) + F(m - 5));
    out[m * os] = c * (45 * F(m) - 154 * F(m - 1) + 214 * F(m - 2) - 156 * F(m - 3) + 61 * F(m - 4) - 10 * F(m - 5));
}

Derivatives derivatives(const Field& f) { return derivatives(f.grid, f.v); }

Derivatives derivatives(const Grid& g, const std::vector<double>& v)
{
    Derivatives d;
    const std::size_t N = g.size();
    const int n0 = g.n[0];
    d.d1[0].resize(N);
    d.d2[0].resize(N);
    const int lines = g.dim == 2 ? g.n[1] : 1;
    for (int j = 0; j < lines; ++j) {
        const std::size_t o = std::size_t(j) * n0;
        fd_d1(&v[o], 1, n0, g.h(0), &d.d1[0][o], 1);
        fd_d2(&v[o], 1, n0, g.h(0), &d.d2[0][o], 1);
    }
    if (g.dim == 2) {
        const int n1 = g.n[1];
        d.d1[1].resize(N);
        d.d2[1].resize(N);
        d.d12.resize(N);
        for (int i = 0; i < n0; ++i) {
            fd_d1(&v[i], n0, n1, g.h(1), &d.d1[1][i], n0);
            fd_d2(&v[i], n0, n1, g.h(1), &d.d2[1][i], n0);
            fd_d1(&d.d1[0][i], n0, n1, g.h(1), &d.d12[i], n0);
        }
    }
    return d;
}

namespace {

// 4-point Lagrange weights for stencil start s (nodes s..s+3) at fractional coordinate x (in cells)
void lagrange4(double x, int s, double w[4])
{
    double t[4];
    for (int a = 0; a < 4; ++a) t[a] = x - (s + a);
    w[0] = -t[1] * t[2] * t[3] / 6.0;
    w[1] = t[0] * t[2] * t[3] / 2.0;
    w[2] = -t[0] * t[1] * t[3] / 2.0;
    w[3] = t[0] * t[1] * t[2] / 6.0;
}

bool axis_weights(const Grid& g, int a, double y, Extrap mode, int& s, double w[4], bool& outside)
{
    const int n = g.n[a];
    double x = (y - g.lo[a]) / g.h(a);
    outside = x < 0.0 || x > n - 1;
    if (outside) {
        if (mode == Extrap::Zero) return false;
        if (mode == Extrap::Clamp) x = std::clamp(x, 0.0, double(n - 1));
        if (mode == Extrap::Linear) {
            // continue with the slope of the last cell
            const double e = x < 0.0 ? -x : x - (n - 1);
            s = x < 0.0 ? 0 : n - 4;
            if (x < 0.0) {
                w[0] = 1 + e, w[1] = -e, w[2] = 0, w[3] = 0;
            } else {
                w[0] = 0, w[1] = 0, w[2] = -e, w[3] = 1 + e;
            }
            return true;
        }
    }
    s = int(std::floor(x)) - 1;
    s = std::clamp(s, 0, n - 4);
    lagrange4(x, s, w);
    return true;
}

} // namespace

double interpolate(const Field& f, const double* y, Extrap mode)
{
    const Grid& g = f.grid;
    int s0, s1 = 0;
    double w0[4], w1[4];
    bool out0, out1 = false;
    if (!axis_weights(g, 0, y[0], mode, s0, w0, out0)) return 0.0;
    if (g.dim == 1) {
        double r = 0.0;
        for (int a = 0; a < 4; ++a) r += w0[a] * f.v[s0 + a];
        return r;
    }
    if (!axis_weights(g, 1, y[1], mode, s1, w1, out1)) return 0.0;
    double r = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        const double* p = &f.v[g.index(s0, s1 + b)];
        for (int a = 0; a < 4; ++a) row += w0[a] * p[a];
        r += w1[b] * row;
    }
    return r;
}

Field resample(const Field& f, const Grid& target, Extrap mode)
{
    return Field::sample(target, [&](const double* y) { return interpolate(f, y, mode); });
}

double grid_weighted_sum(const Grid& g, const std::vector<double>& f, const std::vector<double>& w)
{
    auto tw = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
    double s = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < g.n[0]; ++i) {
            const double y = g.coord(0, i);
            s += tw(i, g.n[0]) * f[i] * w[i] * std::exp(-0.25 * y * y);
        }
        return s * g.h(0);
    }
    std::vector<double> e0(g.n[0]);
    for (int i = 0; i < g.n[0]; ++i) {
        const double y = g.coord(0, i);
        e0[i] = tw(i, g.n[0]) * std::exp(-0.25 * y * y);
    }
    for (int j = 0; j < g.n[1]; ++j) {
        const double y1 = g.coord(1, j);
        const double e1 = tw(j, g.n[1]) * std::exp(-0.25 * y1 * y1);
        double row = 0.0;
        const std::size_t o = g.index(0, j);
        for (int i = 0; i < g.n[0]; ++i) row += e0[i] * f[o + i] * w[o + i];
        s += e1 * row;
    }
    return s * g.h(0) * g.h(1);
}

} // namespace cylflow
