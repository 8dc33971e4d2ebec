#include "cylflow/ou_semigroup.hpp"

#include "cylflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace cylflow {

double circle_heat_kernel(double tau, double rho, double theta, double eta)
{
    double d = std::remainder(theta - eta, 2 * M_PI);
    if (tau >= 0.05) {
        // images in arc length; with |image| <= 10 the truncation is far below round-off
        double s = 0;
        for (int m = -10; m <= 10; ++m) {
            const double a = rho * (d + 2 * M_PI * m);
            s += std::exp(-a * a / (4 * tau));
        }
        return s / std::sqrt(4 * M_PI * tau);
    }
    double s = 1.0;
    for (int j = 1; j < 2000; ++j) {
        const double term = 2 * std::exp(-double(j) * j * tau / (rho * rho)) * std::cos(j * d);
        s += term;
        if (std::exp(-double(j) * j * tau / (rho * rho)) < 1e-18) break;
    }
    return s / (2 * M_PI * rho);
}

double mehler_kernel(const KernelParams& p, const double* y, const double* z, double theta, double eta)
{
    if (!(p.tau > 0)) fail("invalid-argument", "kernel needs tau > 0");
    const double e = std::exp(-p.tau), q = 1 - e, sh = std::exp(-0.5 * p.tau);
    double d2 = 0;
    for (int a = 0; a < p.k; ++a) d2 += std::pow(y[a] * sh - z[a], 2);
    double val = std::exp(p.tau) * std::pow(4 * M_PI * q, -0.5 * p.k) * std::exp(-d2 / (4 * q));
    if (p.circle) val *= circle_heat_kernel(p.tau, p.rho, theta, eta);
    return val;
}

double apply_semigroup_at(const Callable& psi, double tau, int k, const double* y, const SemigroupOptions& opt)
{
    if (tau < 1e-3 && opt.underflow_warning) *opt.underflow_warning = true;
    const GaussRule& q = gauss_nodes(opt.npoints);
    const int n = opt.npoints;
    const double sh = std::exp(-0.5 * tau), sp = std::sqrt(std::max(0.0, 1 - std::exp(-tau)));
    // nodes of gauss_nodes are 2x for the standard e^{-x^2} rule; z = y e^{-tau/2} + 2 sqrt(1-e^{-tau}) x
    std::vector<int> idx(k, 0);
    double z[4] = {0, 0, 0, 0};
    double s = 0;
    while (true) {
        double w = 1;
        for (int a = 0; a < k; ++a) {
            z[a] = y[a] * sh + sp * q.nodes[idx[a]];
            w *= 0.5 * q.weights[idx[a]];
        }
        s += w * psi(z);
        int a = 0;
        while (a < k && ++idx[a] == n) idx[a++] = 0;
        if (a == k) break;
    }
    return std::exp(tau) * std::pow(M_PI, -0.5 * k) * s;
}

Callable apply_semigroup(Callable psi, double tau, int k, SemigroupOptions opt)
{
    if (tau < 1e-3 && opt.underflow_warning) *opt.underflow_warning = true;
    return [psi = std::move(psi), tau, k, opt](const double* y) { return apply_semigroup_at(psi, tau, k, y, opt); };
}

Field apply_semigroup(const Field& psi, double tau, const SemigroupOptions& opt)
{
    const int k = psi.grid.dim;
    Callable f = [&psi](const double* z) { return interpolate(psi, z, Extrap::Zero); };
    return Field::sample(psi.grid, [&](const double* y) { return apply_semigroup_at(f, tau, k, y, opt); });
}

double nr_norm(const Callable& psi, double r, int k, double h, int npoints)
{
    if (r < 0) fail("invalid-argument", "nr_norm needs r >= 0");
    const GaussRule& q = gauss_nodes(npoints);
    auto shifted = [&](const double* xi) {
        std::vector<int> idx(k, 0);
        double y[4] = {0, 0, 0, 0};
        double s = 0;
        while (true) {
            double w = 1;
            for (int a = 0; a < k; ++a) {
                y[a] = xi[a] + q.nodes[idx[a]];
                w *= q.weights[idx[a]];
            }
            const double v = psi(y);
            s += w * v * v;
            int a = 0;
            while (a < k && ++idx[a] == npoints) idx[a++] = 0;
            if (a == k) break;
        }
        return std::sqrt(s);
    };
    const int m = r > 0 ? int(std::ceil(r / h)) : 0;
    const double step = m > 0 ? r / m : 0.0;
    double best = 0;
    double xi[4] = {0, 0, 0, 0};
    if (k == 1) {
        for (int i = -m; i <= m; ++i) {
            xi[0] = i * step;
            best = std::max(best, shifted(xi));
        }
    } else if (k == 2) {
        for (int i = -m; i <= m; ++i)
            for (int j = -m; j <= m; ++j) {
                xi[0] = i * step;
                xi[1] = j * step;
                if (std::hypot(xi[0], xi[1]) > r + 1e-12) continue;
                best = std::max(best, shifted(xi));
            }
    } else {
        fail("dimension-out-of-range", "nr_norm supports k <= 2");
    }
    return best;
}

double velazquez_factor(int n, double r, double r_tilde, double tau)
{
    const double q = 1 - std::exp(-tau);
    const double pos = std::max(0.0, r - r_tilde * std::exp(0.5 * tau));
    return std::pow(std::exp(tau) / (4 * M_PI * q), 0.5 * n) * std::exp(std::exp(-tau) * pos * pos / (4 * q));
}

double velazquez_ratio(const Callable& psi, double r, double r_tilde, double tau, int n, int k, double h, int npoints)
{
    const double base = nr_norm(psi, r_tilde, k, h, npoints);
    if (!(base > 0)) fail("invalid-argument", "N_{r~}(psi) must be positive");
    SemigroupOptions opt;
    opt.npoints = npoints;
    const Callable S = apply_semigroup(psi, tau, k, opt);
    return nr_norm(S, r, k, h, npoints) / (velazquez_factor(n, r, r_tilde, tau) * base);
}

double regularization_time(double t0, double K0, double delta1)
{
    auto g = [&](double s) { return 0.5 * (s - t0) - std::log(K0 * std::sqrt(s)); };
    const double lo0 = std::max(t0 + delta1, K0 / 15.0);
    if (g(lo0) > 0)
        fail("constraint-unsatisfiable", "e^{(s-t0)/2} <= K0 sqrt(s) fails already at s = t0 + delta1");
    double lo = lo0, hi = lo0 + 1;
    while (g(hi) < 0) hi = lo + 2 * (hi - lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

LinearEvolveReport linear_evolve(const std::function<double(double)>& v0, const Potential& P, double t0,
                                 const LinearEvolveOptions& opt)
{
    LinearEvolveReport rep;
    rep.s = regularization_time(t0, opt.K0, opt.delta1);
    rep.s_prime = rep.s + opt.K0;
    const double ball = opt.K0 * std::sqrt(rep.s_prime);
    const double R = ball + opt.margin;
    const int nodes = int(std::ceil(2 * R / opt.h)) + 1;
    const Grid g = make_grid(1, nodes, R);
    Field v = Field::sample(g, [&](const double* y) { return v0(y[0]); });
    rep.l2_initial = std::sqrt(grid_weighted_sum(g, v.v, v.v));
    const double h = g.h(0);
    double dt = 0.2 * h * h;
    const int steps = int(std::ceil((rep.s_prime - t0) / dt));
    dt = (rep.s_prime - t0) / steps;
    std::vector<double> pot(g.size());
    auto rhs = [&](const std::vector<double>& x, double t, std::vector<double>& out) {
        const Derivatives d = derivatives(g, x);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double y = g.coord(0, int(q));
            out[q] = d.d2[0][q] - 0.5 * y * d.d1[0][q] + x[q] + P(y, t) * x[q];
        }
    };
    std::vector<double> k1(g.size()), k2(g.size()), k3(g.size()), k4(g.size()), tmp(g.size());
    double t = t0;
    for (int s = 0; s < steps; ++s) {
        rhs(v.v, t, k1);
        for (std::size_t q = 0; q < g.size(); ++q) tmp[q] = v.v[q] + 0.5 * dt * k1[q];
        rhs(tmp, t + 0.5 * dt, k2);
        for (std::size_t q = 0; q < g.size(); ++q) tmp[q] = v.v[q] + 0.5 * dt * k2[q];
        rhs(tmp, t + 0.5 * dt, k3);
        for (std::size_t q = 0; q < g.size(); ++q) tmp[q] = v.v[q] + dt * k3[q];
        rhs(tmp, t + dt, k4);
        for (std::size_t q = 0; q < g.size(); ++q) v.v[q] += dt / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
        t += dt;
        // outflow edges: quadratic extrapolation of the two outer nodes
        const int n = g.n[0];
        for (int b = 1; b >= 0; --b) {
            v.v[b] = 3 * v.v[b + 1] - 3 * v.v[b + 2] + v.v[b + 3];
            v.v[n - 1 - b] = 3 * v.v[n - 2 - b] - 3 * v.v[n - 3 - b] + v.v[n - 4 - b];
        }
    }
    for (std::size_t q = 0; q < g.size(); ++q)
        if (std::abs(g.coord(0, int(q))) <= ball) rep.sup_ball = std::max(rep.sup_ball, std::abs(v.v[q]));
    rep.amplification = rep.l2_initial > 0 ? rep.sup_ball / rep.l2_initial : 0.0;
    rep.predicted = rep.s_prime * rep.s_prime * std::pow(t0, -2 + opt.C0);
    rep.final_field = std::move(v);
    return rep;
}

} // namespace cylflow
