#pragma once
// Independent reference implementations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// physicists' Hermite polynomial by explicit coefficient expansion
inline double hermite_poly(int m, double x)
{
    double s = 0.0;
    for (int j = 0; j <= m / 2; ++j) {
        const double c = std::tgamma(m + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(m - 2.0 * j + 1.0));
        s += ((j % 2) ? -1.0 : 1.0) * c * std::pow(2.0 * x, m - 2 * j);
    }
    return s;
}

inline double h(int m, double y)
{
    const double cm = std::pow(2.0, -0.5 * m) * std::pow(4.0 * M_PI, -0.25) / std::sqrt(std::tgamma(m + 1.0));
    return cm * hermite_poly(m, 0.5 * y);
}

// composite Simpson on [a,b] with n (even) panels
inline double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    const double hh = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * hh);
    return s * hh / 3.0;
}

inline double gauss_weighted(const std::function<double(double)>& f)
{
    return simpson([&](double y) { return f(y) * std::exp(-0.25 * y * y); }, -40.0, 40.0, 40000);
}

} // namespace oracle
