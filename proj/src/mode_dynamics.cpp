#include "cylflow/mode_dynamics.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/normal_form.hpp"
#include "cylflow/ou_semigroup.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace cylflow {

namespace {

double axis_coord(const Grid& g, std::size_t q, int a)
{
    return a == 0 ? g.coord(0, int(q % g.n[0])) : g.coord(1, int(q / g.n[0]));
}

int degree_of(const std::vector<int>& m)
{
    int s = 0;
    for (int x : m) s += x;
    return s;
}

} // namespace

double h1_norm(const Field& v)
{
    const Grid& g = v.grid;
    const Derivatives d = derivatives(v);
    double s = grid_weighted_sum(g, v.v, v.v);
    for (int a = 0; a < g.dim; ++a) s += grid_weighted_sum(g, d.d1[a], d.d1[a]);
    return std::sqrt(s);
}

ConeRatios cone_ratios(const Field& u, int degree)
{
    if (u.grid.radius() < 4.0) fail("domain-too-small", "cone ratios need a domain radius >= 4");
    const SpectralCoeffs s = spectral_decompose(u, degree);
    double n0 = 0, ngeq = 0, n1 = 0;
    for (const auto& [m, c] : s.c) {
        const int deg = degree_of(m);
        const double w = c * c * (1.0 + 0.5 * deg);
        if (deg == 2) n0 += w;
        if (deg <= 2) ngeq += w;
        if (deg == 0) n1 += w;
    }
    const double full = h1_norm(u);
    ConeRatios r;
    if (!(full > 0)) return r;
    r.ratio_0 = std::sqrt(n0) / full;
    r.ratio_geq0 = std::sqrt(ngeq) / full;
    r.ratio_1 = std::sqrt(n1) / full;
    return r;
}

bool in_cone(const Field& u, const ConeSpec& cone)
{
    if (!(cone.kappa > 0 && cone.kappa < 1)) fail("invalid-argument", "cone kappa must lie in (0,1)");
    const ConeRatios r = cone_ratios(u);
    switch (cone.variant) {
    case ConeVariant::GeqZero: return r.ratio_geq0 >= cone.kappa;
    case ConeVariant::Zero: return r.ratio_0 >= cone.kappa;
    case ConeVariant::One: return r.ratio_1 >= cone.kappa;
    }
    return false;
}

StepMapResult step_map_check(const Field& v0, const Field& v1)
{
    if (!v0.grid.same_as(v1.grid)) fail("grid-mismatch", "step_map_check needs snapshots on one grid");
    StepMapResult res;
    const double base = h1_norm(v0);
    if (!(base > 0)) {
        res.zero_input = true;
        return res;
    }
    Field diff = apply_semigroup(v0, 1.0);
    for (std::size_t q = 0; q < diff.v.size(); ++q) diff.v[q] = v1.v[q] - diff.v[q];
    res.ratio = h1_norm(diff) / base;
    return res;
}

double ConformalTransform::size() const
{
    const double dn = std::hypot(d[0], d[1]);
    return std::abs(lambda - 1.0) + dn + 2.0 * std::sqrt(2.0) * std::abs(std::sin(0.5 * angle));
}

ConformalTransform ConformalTransform::after(const ConformalTransform& first) const
{
    ConformalTransform out;
    out.k = std::max(k, first.k);
    out.lambda = lambda * first.lambda;
    out.angle = angle + first.angle;
    const double c = std::cos(angle), s = std::sin(angle);
    out.d[0] = lambda * (c * first.d[0] - s * first.d[1]) + d[0];
    out.d[1] = lambda * (s * first.d[0] + c * first.d[1]) + d[1];
    return out;
}

void ConformalTransform::map(const double* y, double* out) const
{
    const double c = std::cos(angle), s = std::sin(angle);
    const double y1 = k == 2 ? y[1] : 0.0;
    out[0] = lambda * (c * y[0] - s * y1) + d[0];
    if (k == 2) out[1] = lambda * (s * y[0] + c * y1) + d[1];
}

Field apply_transform(const Field& r, const ConformalTransform& T)
{
    const double c = std::cos(T.angle), s = std::sin(T.angle);
    const int k = r.grid.dim;
    Field out = Field::sample(r.grid, [&](const double* y) {
        // preimage O^T (y - d) / lambda
        const double a = y[0] - T.d[0], b = k == 2 ? y[1] - T.d[1] : 0.0;
        double z[2] = {(c * a + s * b) / T.lambda, (-s * a + c * b) / T.lambda};
        if (k == 1) z[0] = a / T.lambda;
        return T.lambda * interpolate(r, z, Extrap::Linear);
    });
    for (double v : out.v)
        if (!std::isfinite(v) || v <= 0) fail("regraph-failure", "transformed surface is not a positive graph");
    return out;
}

Field axis_rotate(const Field& r, double angle)
{
    if (r.grid.dim != 2) fail("dimension-out-of-range", "axis_rotate needs k = 2");
    const double c = std::cos(angle), s = std::sin(angle);
    return Field::sample(r.grid, [&](const double* y) {
        const double z[2] = {c * y[0] + s * y[1], -s * y[0] + c * y[1]};
        return interpolate(r, z, Extrap::Linear);
    });
}

namespace {

// coefficients of 1, y_i, y_i^2-2 in chi*f (R^k measure)
struct Proj {
    double c = 0, B[2] = {0, 0}, A[2] = {0, 0};
};

Proj project_low(const Grid& g, const std::vector<double>& f)
{
    const int k = g.dim;
    const double R = g.radius();
    const double unit = std::pow(2.0 * std::sqrt(M_PI), k);
    std::vector<double> v(g.size()), b(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double y0 = axis_coord(g, q, 0), y1 = k == 2 ? axis_coord(g, q, 1) : 0.0;
        v[q] = cutoff(std::hypot(y0, y1), R) * f[q];
    }
    Proj p;
    std::fill(b.begin(), b.end(), 1.0);
    p.c = grid_weighted_sum(g, v, b) / unit;
    for (int i = 0; i < k; ++i) {
        for (std::size_t q = 0; q < g.size(); ++q) b[q] = axis_coord(g, q, i);
        p.B[i] = grid_weighted_sum(g, v, b) / (2 * unit);
        for (std::size_t q = 0; q < g.size(); ++q) b[q] = b[q] * b[q] - 2;
        p.A[i] = grid_weighted_sum(g, v, b) / (8 * unit);
    }
    return p;
}

double proj_size(const Proj& p, int k)
{
    const double s = std::pow(2.0 * std::sqrt(M_PI), 0.5 * k);
    double out = std::abs(p.c) * s;
    for (int i = 0; i < k; ++i) out += std::abs(p.B[i]) * std::sqrt(2.0) * s;
    return out;
}

} // namespace

CenteringModes centering_modes(const GraphState& s)
{
    if (s.grid().radius() < 4.0) fail("domain-too-small", "centering needs a domain radius >= 4");
    const Proj p = project_low(s.grid(), s.u());
    CenteringModes m;
    m.c = p.c;
    for (int i = 0; i < 2; ++i) {
        m.B[i] = p.B[i];
        m.A[i] = p.A[i];
    }
    m.size = proj_size(p, s.grid().dim);
    return m;
}

CenteringResult centering(const GraphState& s, double floor)
{
    const Grid& g = s.grid();
    const int k = g.dim;
    if (g.radius() < 4.0) fail("domain-too-small", "centering needs a domain radius >= 4");
    CenteringResult res;
    res.T.k = k;
    res.state = s;
    const Proj p0 = project_low(g, s.u());
    res.before = proj_size(p0, k);
    res.after = res.before;
    if (res.before <= floor) return res;

    const double ysc = std::sqrt(2.0) * std::pow(2.0 * std::sqrt(M_PI), 0.5 * k);
    std::vector<int> dirs;
    for (int i = 0; i < k; ++i) {
        if (std::abs(p0.B[i]) * ysc <= floor) continue;
        if (std::abs(p0.A[i]) < 10.0 * std::abs(p0.B[i]))
            fail("pivot-too-small", "direction " + std::to_string(i + 1) + ": |A| = " + std::to_string(std::abs(p0.A[i])) +
                                        " < 10 |B| = " + std::to_string(10 * std::abs(p0.B[i])));
        dirs.push_back(i);
    }

    Field r = s.r;
    ConformalTransform T;
    T.k = k;
    const int nu = 1 + int(dirs.size());
    for (int it = 0; it < 8; ++it) {
        const Proj p = project_low(g, [&] {
            std::vector<double> u(r.v);
            for (double& x : u) x -= s.spec.rho;
            return u;
        }());
        const double sz = proj_size(p, k);
        res.after = sz;
        if (sz <= std::max(floor, 1e-4 * res.before) && it > 0) break;

        const Derivatives d = derivatives(r);
        std::vector<double> gen(g.size());
        Eigen::MatrixXd J(nu, nu);
        Eigen::VectorXd F(nu);
        auto rows = [&](const Proj& q, int col) {
            J(0, col) = q.c;
            for (int a = 0; a < int(dirs.size()); ++a) J(1 + a, col) = q.B[dirs[a]];
        };
        for (std::size_t q = 0; q < g.size(); ++q) {
            double dot = 0;
            for (int a = 0; a < k; ++a) dot += axis_coord(g, q, a) * d.d1[a][q];
            gen[q] = r.v[q] - dot;
        }
        rows(project_low(g, gen), 0);
        for (int a = 0; a < int(dirs.size()); ++a) {
            for (std::size_t q = 0; q < g.size(); ++q) gen[q] = -d.d1[dirs[a]][q];
            rows(project_low(g, gen), 1 + a);
        }
        F(0) = p.c;
        for (int a = 0; a < int(dirs.size()); ++a) F(1 + a) = p.B[dirs[a]];
        const Eigen::VectorXd dp = J.fullPivLu().solve(-F);
        if (!dp.allFinite()) fail("regraph-failure", "centering Newton step is not finite");

        ConformalTransform step;
        step.k = k;
        step.lambda = 1.0 + dp(0);
        for (int a = 0; a < int(dirs.size()); ++a) step.d[dirs[a]] = dp(1 + a);
        if (!(step.lambda > 0)) fail("regraph-failure", "centering produced a nonpositive dilation");
        T = step.after(T);
        r = apply_transform(s.r, T);
        res.iterations = it + 1;
    }
    {
        std::vector<double> u(r.v);
        for (double& x : u) x -= s.spec.rho;
        res.after = proj_size(project_low(g, u), k);
    }
    if (res.after > std::max(floor, 0.1 * res.before))
        fail("insufficient-contraction", "centering reduced the unstable projections only from " +
                                             std::to_string(res.before) + " to " + std::to_string(res.after));
    res.T = T;
    res.state.r = std::move(r);
    return res;
}

double perturb_ode_a1_closed_form(double a1_0, double t0, double t, const ShrinkerSpec& spec)
{
    return a1_0 / (1.0 + a1_0 * std::sqrt(2.0) * c0() * (t - t0) / spec.rho);
}

std::vector<ModeTriple> perturb_ode(const ModeTriple& a0, double t1, const ShrinkerSpec& spec, int samples)
{
    if (!(a0.t > 0)) fail("invalid-argument", "perturb_ode needs t0 > 0");
    if (!(t1 > a0.t) || samples < 1) fail("invalid-argument", "perturb_ode needs t1 > t0 and samples >= 1");
    const double q = std::sqrt(2.0) * c0() / spec.rho;
    const double q12 = std::pow(c0(), 3) / (std::sqrt(2.0) * spec.rho);
    const double q3 = 1.0 / (spec.rho * std::sqrt(2.0) * c0());
    auto f = [&](double t, const double* a, double* out) {
        out[0] = -q * a[0] * a[0] - q12 * a[2] * a[2];
        out[1] = -(2.0 / t * a[1] + q * a[1] * a[1]);
        out[2] = -q3 * (a[0] + a[1]) * a[2];
    };
    std::vector<ModeTriple> out;
    out.reserve(samples + 1);
    out.push_back(a0);
    double a[3] = {a0.a1, a0.a2, a0.a12};
    const double scale = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2]), 1e-300});
    double t = a0.t;
    for (int s = 1; s <= samples; ++s) {
        const double target = a0.t + (t1 - a0.t) * s / samples;
        while (t < target) {
            const double amax = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
            double h = std::min({0.01 * t, 1e-3 / (q3 * amax + 1e-300), target - t});
            h = std::max(h, 1e-14 * target);
            if (t + h > target) h = target - t;
            double k1[3], k2[3], k3[3], k4[3], tmp[3];
            f(t, a, k1);
            for (int i = 0; i < 3; ++i) tmp[i] = a[i] + 0.5 * h * k1[i];
            f(t + 0.5 * h, tmp, k2);
            for (int i = 0; i < 3; ++i) tmp[i] = a[i] + 0.5 * h * k2[i];
            f(t + 0.5 * h, tmp, k3);
            for (int i = 0; i < 3; ++i) tmp[i] = a[i] + h * k3[i];
            f(t + h, tmp, k4);
            for (int i = 0; i < 3; ++i) a[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            t += h;
            const double now = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
            if (!std::isfinite(now) || now > 1e8 * scale)
                fail("blowup", "mode amplitudes diverge near t = " + std::to_string(t));
        }
        out.push_back({target, a[0], a[1], a[2]});
    }
    return out;
}

ModeTriple measure_modes(const GraphState& s)
{
    const Grid& g = s.grid();
    if (g.radius() < 4.0) fail("domain-too-small", "mode measurement needs a domain radius >= 4");
    const std::vector<double> u = s.u();
    const Proj p = project_low(g, u);
    ModeTriple m;
    m.t = s.t;
    const double c2 = hermite_coeff(2), c1 = hermite_coeff(1);
    m.a1 = p.A[0] / c2;
    if (g.dim == 2) {
        m.a2 = p.A[1] / c2;
        const double R = g.radius();
        std::vector<double> v(g.size()), b(g.size());
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double y0 = axis_coord(g, q, 0), y1 = axis_coord(g, q, 1);
            v[q] = cutoff(std::hypot(y0, y1), R) * u[q];
            b[q] = y0 * y1;
        }
        // <y1 y2, y1 y2> = 4 (2 sqrt pi)^2
        const double B = grid_weighted_sum(g, v, b) / (4 * 4 * M_PI);
        m.a12 = B / (c1 * c1);
    }
    return m;
}

} // namespace cylflow

#include <random>

namespace cylflow {

void symmetrize_even(Field& f)
{
    const Grid& g = f.grid;
    const int n0 = g.n[0], n1 = g.dim == 2 ? g.n[1] : 1;
    for (int j = 0; j < (n1 + 1) / 2; ++j)
        for (int i = 0; i < (n0 + 1) / 2; ++i) {
            const std::size_t q[4] = {g.index(i, j), g.index(n0 - 1 - i, j), g.index(i, n1 - 1 - j),
                                      g.index(n0 - 1 - i, n1 - 1 - j)};
            const int cnt = g.dim == 2 ? 4 : 2;
            double m = 0;
            for (int c = 0; c < cnt; ++c) m += f.v[q[c]];
            m /= cnt;
            for (int c = 0; c < cnt; ++c) f.v[q[c]] = m;
        }
}

double c2_size(const Field& f)
{
    const Derivatives d = derivatives(f);
    double best = 0;
    for (std::size_t q = 0; q < f.v.size(); ++q) {
        double g2 = d.d1[0][q] * d.d1[0][q], h2 = d.d2[0][q] * d.d2[0][q];
        if (f.grid.dim == 2) {
            g2 += d.d1[1][q] * d.d1[1][q];
            h2 += d.d2[1][q] * d.d2[1][q] + 2 * d.d12[q] * d.d12[q];
        }
        best = std::max(best, std::abs(f.v[q]) + std::sqrt(g2) + std::sqrt(h2));
    }
    return best;
}

Field random_perturbation(const Grid& g, double eps0, unsigned long long seed, int degree)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    SpectralCoeffs s;
    s.degree = degree;
    s.k = g.dim;
    for (const auto& m : multi_indices(g.dim, degree)) s.c[m] = nd(rng);
    // the series is polynomial; localize it to the ball |y| <= 8 where the Gaussian weight lives
    const double R = std::min(8.0, g.radius());
    Field f = spectral_reconstruct(s, g);
    for (std::size_t q = 0; q < f.v.size(); ++q) {
        const double y0 = axis_coord(g, q, 0), y1 = g.dim == 2 ? axis_coord(g, q, 1) : 0.0;
        f.v[q] *= cutoff(std::hypot(y0, y1), R);
    }
    const double sz = c2_size(f);
    for (double& x : f.v) x *= sz > 0 ? eps0 / sz : 0.0;
    return f;
}

} // namespace cylflow
