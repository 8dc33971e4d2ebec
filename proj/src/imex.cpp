// Linearly-implicit Douglas ADI step for the rescaled flow: the frozen-coefficient
// diagonal diffusion, the drift and the +u term are Crank-Nicolson per axis, the mixed
// derivative is forward Euler in the predictor, the nonlinear potential is AB2-extrapolated.

#include "cylflow/error.hpp"
#include "cylflow/rmcf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cylflow {

namespace {

void solve_penta(int m, std::vector<std::array<double, 5>>& A, std::vector<double>& b)
{
    for (int i = 0; i < m; ++i) {
        const double piv = A[i][2];
        for (int rr = 1; rr <= 2 && i + rr < m; ++rr) {
            const int r = i + rr;
            const double f = A[r][2 - rr] / piv;
            if (f == 0.0) continue;
            for (int c = 0; c <= 2; ++c) A[r][2 - rr + c] -= f * A[i][2 + c];
            b[r] -= f * b[i];
        }
    }
    for (int i = m - 1; i >= 0; --i) {
        double s = b[i];
        for (int c = 1; c <= 2 && i + c < m; ++c) s -= A[i][2 + c] * b[i + c];
        b[i] = s / A[i][2];
    }
}

// One implicit sweep along a line of n nodes. y0: predictor (boundary values fixed),
// ylast: previous stage, Au: A_a u^n, coef: frozen diffusion coefficient, coords: y_a.
void sweep_line(int n, double h, double th_dt, double inv_k, const double* coords, std::ptrdiff_t s,
                const double* y0, const double* ylast, const double* Au, const double* coef, double* out,
                std::vector<std::array<double, 5>>& A, std::vector<double>& b, bool extrap)
{
    // extrapolated edges: Y_1 = 3Y_2 - 3Y_3 + Y_4, Y_0 = 6Y_2 - 8Y_3 + 3Y_4 (mirrored on the right)
    static const double E[2][3] = {{6, -8, 3}, {3, -3, 1}};
    static const double D2[5] = {-1, 16, -30, 16, -1};
    static const double D1[5] = {1, -8, 0, 8, -1};
    const int m = n - 4;
    A.assign(m, {0, 0, 0, 0, 0});
    b.assign(m, 0.0);
    const double i12h2 = 1.0 / (12 * h * h), i12h = 1.0 / (12 * h);
    for (int i = 2; i < n - 2; ++i) {
        const int row = i - 2;
        const double a = coef[i * s], y = coords[i];
        double rhs = ylast[i * s] - th_dt * Au[i * s];
        for (int o = -2; o <= 2; ++o) {
            double L = a * D2[o + 2] * i12h2 - 0.5 * y * D1[o + 2] * i12h;
            if (o == 0) L += inv_k;
            const double M = (o == 0 ? 1.0 : 0.0) - th_dt * L;
            const int j = i + o;
            if ((j < 2 || j > n - 3) && extrap) {
                const int e = j < 2 ? j : n - 1 - j;
                const int dir = j < 2 ? 1 : -1, base = j < 2 ? 2 : n - 3;
                for (int c = 0; c < 3; ++c) A[row][base + dir * c - i + 2] += M * E[e][c];
            } else if (j < 2 || j > n - 3)
                rhs -= M * y0[j * s];
            else
                A[row][o + 2] += M;
        }
        b[row] = rhs;
    }
    solve_penta(m, A, b);
    for (int i = 2; i < n - 2; ++i) out[i * s] = b[i - 2];
    for (int e = 0; e < 2; ++e) {
        double l = 0, r = 0;
        for (int c = 0; c < 3; ++c) {
            l += E[e][c] * b[c];
            r += E[e][c] * b[m - 1 - c];
        }
        out[e * s] = extrap ? l : y0[e * s];
        out[(n - 1 - e) * s] = extrap ? r : y0[(n - 1 - e) * s];
    }
}

} // namespace

void FlowRunner::imex_step(GraphState& st, double dt)
{
    const Grid& g = st.grid();
    const std::size_t N = g.size();
    const double rho = st.spec.rho;
    const double nk = st.spec.sphere_dim();
    const double inv_k = 1.0 / g.dim;
    const double th = cfg_.imex_theta;
    for (double x : st.r.v)
        if (!(x > 0.0)) fail("nonpositive-radius", "radius must stay positive");
    const Derivatives d = derivatives(st.r);

    std::array<std::vector<double>, 2> Au, coef;
    for (int a = 0; a < g.dim; ++a) {
        Au[a].resize(N);
        coef[a].resize(N);
    }
    std::vector<double> Nl(N), rhs(N);
    for (std::size_t q = 0; q < N; ++q) {
        const int i0 = int(q % g.n[0]), i1 = int(q / g.n[0]);
        const double y0 = g.coord(0, i0), y1 = g.dim == 2 ? g.coord(1, i1) : 0.0;
        const double u = st.r.v[q] - rho;
        const double p1 = d.d1[0][q], p2 = g.dim == 2 ? d.d1[1][q] : 0.0;
        const double gg = 1 + p1 * p1 + p2 * p2;
        double R, mixed = 0.0;
        if (g.dim == 1) {
            R = d.d2[0][q] / gg;
        } else {
            mixed = -2 * p1 * p2 * d.d12[q] / gg;
            R = (1 - p1 * p1 / gg) * d.d2[0][q] + (1 - p2 * p2 / gg) * d.d2[1][q] + mixed;
        }
        R += -nk / st.r.v[q] + 0.5 * (st.r.v[q] - y0 * p1 - y1 * p2);
        rhs[q] = R;
        coef[0][q] = 1 - p1 * p1 / gg;
        Au[0][q] = coef[0][q] * d.d2[0][q] - 0.5 * y0 * p1 + inv_k * u;
        double lin = Au[0][q];
        if (g.dim == 2) {
            coef[1][q] = 1 - p2 * p2 / gg;
            Au[1][q] = coef[1][q] * d.d2[1][q] - 0.5 * y1 * p2 + inv_k * u;
            lin += Au[1][q];
        }
        Nl[q] = R - lin - mixed;
    }
    const bool ab2 = prevN_.size() == N;
    Field Y0(g);
    for (std::size_t q = 0; q < N; ++q) {
        const double nstar = ab2 ? 1.5 * Nl[q] - 0.5 * prevN_[q] : Nl[q];
        Y0.v[q] = st.r.v[q] + dt * (rhs[q] + nstar - Nl[q]);
    }
    prevN_ = std::move(Nl);
    apply_boundary(cfg_, Y0, st.t + dt, 2, false);
    for (double& x : Y0.v) x -= rho;

    std::vector<double> uvec(N);
    for (std::size_t q = 0; q < N; ++q) uvec[q] = st.r.v[q] - rho;
    const bool extrap = cfg_.boundary == BoundaryMode::Extrapolate;
    std::vector<double> cur = Y0.v, next(N);
    std::vector<std::array<double, 5>> A;
    std::vector<double> b;
    std::vector<double> coords0(g.n[0]);
    for (int i = 0; i < g.n[0]; ++i) coords0[i] = g.coord(0, i);
    const int lines0 = g.dim == 2 ? g.n[1] : 1;
    for (int j = 0; j < lines0; ++j) {
        const std::size_t o = g.index(0, j);
        if (g.dim == 2 && !extrap && (j < 2 || j > g.n[1] - 3)) {
            std::copy(&Y0.v[o], &Y0.v[o] + g.n[0], &next[o]);
            continue;
        }
        sweep_line(g.n[0], g.h(0), th * dt, inv_k, coords0.data(), 1, &Y0.v[o], &cur[o], &Au[0][o], &coef[0][o],
                   &next[o], A, b, extrap);
    }
    if (g.dim == 2) {
        cur.swap(next);
        std::vector<double> coords1(g.n[1]);
        for (int j = 0; j < g.n[1]; ++j) coords1[j] = g.coord(1, j);
        const std::ptrdiff_t s = g.n[0];
        for (int i = 0; i < g.n[0]; ++i) {
            if (!extrap && (i < 2 || i > g.n[0] - 3)) {
                for (int j = 0; j < g.n[1]; ++j) next[g.index(i, j)] = Y0.v[g.index(i, j)];
                continue;
            }
            sweep_line(g.n[1], g.h(1), th * dt, inv_k, coords1.data(), s, &Y0.v[i], &cur[i], &Au[1][i], &coef[1][i],
                       &next[i], A, b, extrap);
        }
    }
    for (std::size_t q = 0; q < N; ++q) st.r.v[q] = next[q] + rho;
    st.t += dt;
}

} // namespace cylflow
