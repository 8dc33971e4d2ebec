#include "cylflow/shrinker.hpp"

#include "cylflow/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cylflow {

double c0() { return std::pow(4.0 * M_PI, -0.25); }

int ModeIndex::degree() const { return std::accumulate(m.begin(), m.end(), 0); }

ShrinkerSpec make_shrinker(int n, int k)
{
    if (n < 2 || k < 1 || k > n - 1)
        fail("dimension-out-of-range",
             "need n >= 2 and 1 <= k <= n-1, got n=" + std::to_string(n) + " k=" + std::to_string(k));
    ShrinkerSpec s;
    s.n = n;
    s.k = k;
    s.rho = std::sqrt(2.0 * (n - k));
    return s;
}

double sphere_eigenvalue(const ShrinkerSpec& spec, int j)
{
    const int d = spec.sphere_dim();
    return -double(j) * double(j + d - 1) / (2.0 * d);
}

double mode_eigenvalue(const ShrinkerSpec& spec, const ModeIndex& mode)
{
    return sphere_eigenvalue(spec, mode.j) + 1.0 - 0.5 * mode.degree();
}

double unit_sphere_area(int d)
{
    const double h = 0.5 * (d + 1);
    return 2.0 * std::pow(M_PI, h) / std::tgamma(h);
}

double gaussian_sphere_factor(const ShrinkerSpec& spec)
{
    const int d = spec.sphere_dim();
    return std::pow(spec.rho, d) * std::exp(-spec.rho * spec.rho / 4.0) * unit_sphere_area(d);
}

double gamma_constant(const ShrinkerSpec& spec)
{
    return neutral_gamma(spec) / gaussian_sphere_factor(spec);
}

double neutral_gamma(const ShrinkerSpec& spec)
{
    return std::pow(c0(), 2.0 * (spec.k - 1)) / spec.rho;
}

namespace {

// F of the round sphere S^d(sqrt(2d)) in R^{d+1}
double sphere_f(int d)
{
    const double r2 = 2.0 * d;
    return std::pow(4.0 * M_PI, -0.5 * d) * std::pow(r2, 0.5 * d) * std::exp(-r2 / 4.0) * unit_sphere_area(d);
}

} // namespace

double f_functional(const AnalyticShape& shape)
{
    switch (shape.tag) {
    case ShapeTag::Hyperplane:
        return 1.0;
    case ShapeTag::Sphere:
        if (shape.n < 1) fail("dimension-out-of-range", "sphere dimension must be >= 1");
        return sphere_f(shape.n);
    case ShapeTag::Cylinder:
        if (shape.k < 0 || shape.k >= shape.n) fail("dimension-out-of-range", "cylinder needs 0 <= k < n");
        // the R^k factor integrates to exactly (4 pi)^{k/2}
        return sphere_f(shape.n - shape.k);
    }
    return 0.0;
}

double entropy(const AnalyticShape& shape) { return f_functional(shape); }

} // namespace cylflow
