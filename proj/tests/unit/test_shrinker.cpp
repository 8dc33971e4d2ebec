#include "doctest.h"
#include "oracles.hpp"

#include "cylflow/error.hpp"
#include "cylflow/shrinker.hpp"

#include <cmath>

using namespace cylflow;

TEST_SUITE("shrinker_core") {

TEST_CASE("make_shrinker radii")
{
    CHECK(make_shrinker(2, 1).rho == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(make_shrinker(3, 2).rho == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(make_shrinker(7, 3).rho == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(make_shrinker(1, 1), Error);
    CHECK_THROWS_AS(make_shrinker(3, 3), Error);
    CHECK_THROWS_AS(make_shrinker(3, 0), Error);
}

TEST_CASE("stationarity and mean curvature for n <= 9")
{
    for (int n = 2; n <= 9; ++n)
        for (int k = 1; k < n; ++k) {
            const auto s = make_shrinker(n, k);
            CHECK(std::abs(-(n - k) / s.rho + s.rho / 2.0) < 1e-14);
            CHECK(s.rho * s.rho == doctest::Approx(2.0 * (n - k)).epsilon(1e-15));
        }
}

TEST_CASE("eigenvalue table rows")
{
    for (int n = 2; n <= 9; ++n)
        for (int k = 1; k < n; ++k) {
            const auto s = make_shrinker(n, k);
            ModeIndex m;
            m.m.assign(k, 0);
            CHECK(mode_eigenvalue(s, m) == 1.0);
            m.j = 1;
            CHECK(mode_eigenvalue(s, m) == doctest::Approx(0.5));
            m.j = 2;
            CHECK(mode_eigenvalue(s, m) == doctest::Approx(1.0 - double(n - k + 1) / (n - k)));
            m.j = 0;
            m.m[0] = 1;
            CHECK(mode_eigenvalue(s, m) == doctest::Approx(0.5));
            m.m[0] = 2;
            CHECK(mode_eigenvalue(s, m) == doctest::Approx(0.0));
            if (k >= 2) {
                m.m[0] = 1;
                m.m[1] = 1;
                CHECK(mode_eigenvalue(s, m) == doctest::Approx(0.0));
            }
        }
}

TEST_CASE("sphere factor against recursive area quadrature")
{
    // omega_d = omega_{d-1} * int_0^pi sin^{d-1}
    std::vector<double> omega{2.0};
    for (int d = 1; d <= 8; ++d)
        omega.push_back(omega.back() *
                        oracle::simpson([&](double p) { return std::pow(std::sin(p), d - 1); }, 0.0, M_PI, 2000));
    for (int n = 2; n <= 9; ++n)
        for (int k = 1; k < n; ++k) {
            const auto s = make_shrinker(n, k);
            const int d = n - k;
            const double want = std::exp(-s.rho * s.rho / 4.0) * std::pow(s.rho, d) * omega[d];
            CHECK(std::abs(gaussian_sphere_factor(s) - want) < 1e-10 * want);
        }
    const auto s21 = make_shrinker(2, 1);
    CHECK(gaussian_sphere_factor(s21) == doctest::Approx(std::sqrt(2.0) * std::exp(-0.5) * 2 * M_PI).epsilon(1e-14));
    CHECK(gaussian_sphere_factor(make_shrinker(3, 1)) == doctest::Approx(4.0 * std::exp(-1.0) * 4 * M_PI).epsilon(1e-14));
}

TEST_CASE("gamma constants")
{
    const auto s = make_shrinker(2, 1);
    CHECK(gamma_constant(s) == doctest::Approx((1 / std::sqrt(2.0)) / (std::sqrt(2.0) * std::exp(-0.5) * 2 * M_PI)));
    const auto s32 = make_shrinker(3, 2);
    CHECK(neutral_gamma(s32) == doctest::Approx(std::pow(4 * M_PI, -0.5) / std::sqrt(2.0)));
    CHECK(gamma_constant(s32) * gaussian_sphere_factor(s32) == doctest::Approx(neutral_gamma(s32)));
}

TEST_CASE("F functional values and entropy ordering")
{
    CHECK(f_functional({ShapeTag::Hyperplane, 3, 0}) == 1.0);
    CHECK(f_functional({ShapeTag::Sphere, 1, 0}) == doctest::Approx(std::sqrt(2 * M_PI / std::exp(1.0))).epsilon(1e-14));
    for (int n = 2; n <= 7; ++n) {
        double prev = 1e9;
        for (int k = n - 1; k >= 1; --k) {
            const double l = entropy({ShapeTag::Cylinder, n, k});
            CHECK(l < prev);
            prev = l;
        }
        CHECK(prev > entropy({ShapeTag::Sphere, n, 0}));
        CHECK(entropy({ShapeTag::Sphere, n, 0}) > 1.0);
    }
}

TEST_CASE("cylinder F closed form by radial quadrature")
{
    // (4 pi)^{-n/2} * int over S^{d}(rho) x R^k, with the R^k part done numerically
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k < n && k <= 2; ++k) {
            const auto s = make_shrinker(n, k);
            const int d = n - k;
            const double line = oracle::simpson([](double y) { return std::exp(-y * y / 4); }, -30, 30, 6000);
            const double axis = std::pow(line, k);
            const double val = std::pow(4 * M_PI, -0.5 * n) * gaussian_sphere_factor(s) * axis;
            const double closed = std::pow(4 * M_PI, -0.5 * d) * std::pow(s.rho, d) * std::exp(-0.5 * d) * unit_sphere_area(d);
            CHECK(std::abs(val - closed) < 1e-8);
            CHECK(std::abs(f_functional({ShapeTag::Cylinder, n, k}) - closed) < 1e-12);
        }
}

}
