#include "cylflow/hermite.hpp"

#include "cylflow/error.hpp"

#include <cmath>
#include <memory>
#include <mutex>

namespace cylflow {

double hermite_coeff(int m)
{
    return std::exp(-0.5 * m * std::log(2.0) - 0.25 * std::log(4.0 * M_PI) - 0.5 * std::lgamma(m + 1.0));
}

void hermite_all(int M, double y, double* out)
{
    out[0] = c0();
    if (M >= 1) out[1] = y / std::sqrt(2.0) * out[0];
    for (int m = 1; m < M; ++m)
        out[m + 1] = y / std::sqrt(2.0 * (m + 1)) * out[m] - std::sqrt(double(m) / (m + 1)) * out[m - 1];
}

double hermite_eval(int m, double y)
{
    if (m < 0) return 0.0;
    double a = c0();
    if (m == 0) return a;
    double b = y / std::sqrt(2.0) * a;
    for (int j = 1; j < m; ++j) {
        const double c = y / std::sqrt(2.0 * (j + 1)) * b - std::sqrt(double(j) / (j + 1)) * a;
        a = b;
        b = c;
    }
    return b;
}

namespace {

// Gauss-Hermite for e^{-x^2}: Newton on the orthonormal recurrence.
GaussRule gauss_hermite(int n)
{
    GaussRule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const double pim4 = std::pow(M_PI, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.nodes[1];
        else
            z = 2.0 * z - r.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

} // namespace

const GaussRule& gauss_nodes(int npoints)
{
    if (npoints < 2) fail("invalid-argument", "gauss_nodes needs npoints >= 2");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[npoints];
    if (!slot) {
        GaussRule g = gauss_hermite(npoints);
        for (int i = 0; i < npoints; ++i) {
            g.nodes[i] *= 2.0;
            g.weights[i] *= 2.0;
        }
        slot = std::make_unique<GaussRule>(std::move(g));
    }
    return *slot;
}

namespace {

double sphere_measure(const ShrinkerSpec* spec, Measure measure)
{
    if (measure == Measure::Axis) return 1.0;
    if (!spec) fail("invalid-argument", "shrinker measure needs a spec");
    return gaussian_sphere_factor(*spec);
}

} // namespace

double weighted_inner(const Callable& f, const Callable& g, int k, const ShrinkerSpec* spec, Measure measure,
                      int npoints)
{
    if (k < 1 || k > 4) fail("dimension-out-of-range", "tensor quadrature supports 1 <= k <= 4");
    const GaussRule& q = gauss_nodes(npoints);
    std::vector<int> idx(k, 0);
    std::vector<double> y(std::max(k, 2), 0.0);
    double s = 0.0;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < k; ++a) {
            y[a] = q.nodes[idx[a]];
            w *= q.weights[idx[a]];
        }
        s += w * f(y.data()) * g(y.data());
        int a = 0;
        while (a < k && ++idx[a] == npoints) idx[a++] = 0;
        if (a == k) break;
    }
    return s * sphere_measure(spec, measure);
}

double weighted_inner(const Field& f, const Field& g, const ShrinkerSpec* spec, Measure measure)
{
    if (!f.grid.same_as(g.grid)) fail("grid-mismatch", "fields live on different grids");
    return grid_weighted_sum(f.grid, f.v, g.v) * sphere_measure(spec, measure);
}

double triple_product(int m, int n, int l)
{
    if (m < 0 || n < 0 || l < 0) return 0.0;
    if ((m + n + l) % 2 != 0) return 0.0;
    if (n > m + l || m > n + l || l > m + n) return 0.0;
    const int a = (m + n - l) / 2, b = (n + l - m) / 2, c = (m + l - n) / 2;
    const double lg = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0) + std::lgamma(l + 1.0)) -
                      std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(c + 1.0);
    return std::pow(4.0 * M_PI, -0.25) * std::exp(lg);
}

double hermite_product(const std::vector<int>& m, const double* y)
{
    double p = 1.0;
    for (std::size_t a = 0; a < m.size(); ++a) p *= hermite_eval(m[a], y[a]);
    return p;
}

namespace {

void check_mode(const ModeIndex& mode, int k)
{
    if (mode.j != 0) fail("unsupported-mode", "theta-dependent modes are analytic-only");
    if (int(mode.m.size()) != k) fail("invalid-argument", "mode multi-index length must equal k");
}

} // namespace

double project_mode(const Field& v, const ModeIndex& mode, const ShrinkerSpec& spec)
{
    check_mode(mode, v.grid.dim);
    if (v.grid.dim != spec.k) fail("grid-mismatch", "grid dimension differs from k");
    const Field basis = Field::sample(v.grid, [&](const double* y) { return hermite_product(mode.m, y); });
    return std::sqrt(gaussian_sphere_factor(spec)) * weighted_inner(v, basis);
}

double project_mode(const Callable& v, const ModeIndex& mode, const ShrinkerSpec& spec, int npoints)
{
    check_mode(mode, spec.k);
    auto basis = [&](const double* y) { return hermite_product(mode.m, y); };
    return std::sqrt(gaussian_sphere_factor(spec)) * weighted_inner(v, basis, spec.k, nullptr, Measure::Axis, npoints);
}

Field apply_L(const Field& v)
{
    const Grid& g = v.grid;
    for (int a = 0; a < g.dim; ++a)
        if (g.n[a] < 8) fail("grid-too-small", "apply_L needs at least 4 interior points per axis");
    const Derivatives d = derivatives(v);
    Field out(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const int i0 = int(p % g.n[0]);
        const int i1 = int(p / g.n[0]);
        double val = v.v[p] + d.d2[0][p] - 0.5 * g.coord(0, i0) * d.d1[0][p];
        if (g.dim == 2) val += d.d2[1][p] - 0.5 * g.coord(1, i1) * d.d1[1][p];
        out.v[p] = val;
    }
    return out;
}

double SpectralCoeffs::norm2() const
{
    double s = 0.0;
    for (const auto& [m, c] : c) s += c * c;
    return s;
}

std::vector<std::vector<int>> multi_indices(int k, int degree)
{
    std::vector<std::vector<int>> out;
    std::vector<int> m(k, 0);
    std::function<void(int, int)> rec = [&](int a, int left) {
        if (a == k) {
            out.push_back(m);
            return;
        }
        for (int d = 0; d <= left; ++d) {
            m[a] = d;
            rec(a + 1, left - d);
        }
        m[a] = 0;
    };
    rec(0, degree);
    return out;
}

SpectralCoeffs spectral_decompose(const Field& v, int degree)
{
    const Grid& g = v.grid;
    SpectralCoeffs s;
    s.degree = degree;
    s.k = g.dim;
    // tabulate h_0..h_degree per axis once
    std::array<std::vector<double>, 2> tab;
    for (int a = 0; a < g.dim; ++a) {
        tab[a].resize(std::size_t(g.n[a]) * (degree + 1));
        for (int i = 0; i < g.n[a]; ++i) hermite_all(degree, g.coord(a, i), &tab[a][std::size_t(i) * (degree + 1)]);
    }
    std::vector<double> basis(g.size());
    for (const auto& m : multi_indices(g.dim, degree)) {
        for (std::size_t p = 0; p < g.size(); ++p) {
            const int i0 = int(p % g.n[0]);
            double b = tab[0][std::size_t(i0) * (degree + 1) + m[0]];
            if (g.dim == 2) b *= tab[1][(p / g.n[0]) * (degree + 1) + m[1]];
            basis[p] = b;
        }
        s.c[m] = grid_weighted_sum(g, v.v, basis);
    }
    return s;
}

Field spectral_reconstruct(const SpectralCoeffs& s, const Grid& g)
{
    return Field::sample(g, [&](const double* y) {
        double r = 0.0;
        for (const auto& [m, c] : s.c) r += c * hermite_product(m, y);
        return r;
    });
}

} // namespace cylflow
