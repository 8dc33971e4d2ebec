#include "doctest.h"
#include "oracles.hpp"

#include "cylflow/error.hpp"
#include "cylflow/ou_semigroup.hpp"

#include <cmath>

using namespace cylflow;

TEST_SUITE("ou_semigroup") {

TEST_CASE("Mehler kernel mass and eigenfunctions")
{
    for (double tau : {0.1, 1.0, 3.0}) {
        KernelParams p;
        p.tau = tau;
        const double y = 0.8;
        const double mass = oracle::simpson([&](double z) { return mehler_kernel(p, &y, &z); }, -30, 30, 6000);
        CHECK(mass == doctest::Approx(std::exp(tau)).epsilon(1e-10));
        const double one[1] = {0.3};
        CHECK(apply_semigroup_at([](const double*) { return 1.0; }, tau, 1, one) ==
              doctest::Approx(std::exp(tau)).epsilon(1e-12));
        for (int m = 0; m <= 6; ++m) {
            const Callable hm = [m](const double* z) { return oracle::h(m, z[0]); };
            CHECK(apply_semigroup_at(hm, tau, 1, one) ==
                  doctest::Approx(std::exp((1 - m / 2.0) * tau) * oracle::h(m, one[0])).epsilon(1e-10));
        }
    }
    // two dimensions factor
    const double y2[2] = {0.4, -1.1};
    const Callable prod = [](const double* z) { return oracle::h(1, z[0]) * oracle::h(2, z[1]); };
    CHECK(apply_semigroup_at(prod, 0.7, 2, y2) ==
          doctest::Approx(std::exp(-0.5 * 0.7) * oracle::h(1, y2[0]) * oracle::h(2, y2[1])).epsilon(1e-10));
}

TEST_CASE("Mehler kernel limit and symmetry")
{
    KernelParams p;
    p.tau = 20;
    for (double z : {-2.0, 0.0, 0.7, 3.0}) {
        const double want = std::exp(20.0) / std::sqrt(4 * M_PI) * std::exp(-z * z / 4);
        const double y0 = 0.0, y1 = 1.3;
        CHECK(mehler_kernel(p, &y0, &z) == doctest::Approx(want).epsilon(1e-8));
        // away from y = 0 the memory of the start point decays like |y z| e^{-tau/2} / 2
        CHECK(std::abs(mehler_kernel(p, &y1, &z) / want - 1) < 0.6 * std::abs(y1 * z) * std::exp(-10.0) + 1e-8);
    }
    // self-adjoint in the weighted space: K(y,z) e^{z^2/4} = K(z,y) e^{y^2/4}
    p.tau = 0.6;
    const double a = 0.4, b = -1.7;
    CHECK(mehler_kernel(p, &a, &b) * std::exp(b * b / 4) ==
          doctest::Approx(mehler_kernel(p, &b, &a) * std::exp(a * a / 4)).epsilon(1e-10));
}

TEST_CASE("semigroup is linear and composes")
{
    const Callable f = [](const double* z) { return std::exp(-z[0] * z[0]) * std::cos(z[0]); };
    const Callable g = [](const double* z) { return 1.0 / (1.0 + z[0] * z[0]); };
    const double y[1] = {0.9};
    const Callable lin = [&](const double* z) { return 2 * f(z) - 3 * g(z); };
    CHECK(apply_semigroup_at(lin, 0.5, 1, y) ==
          doctest::Approx(2 * apply_semigroup_at(f, 0.5, 1, y) - 3 * apply_semigroup_at(g, 0.5, 1, y)).epsilon(1e-13));
    // entire test functions; a pole (as in g) limits Gauss-Hermite to about 1e-5
    const std::vector<Callable> set = {
        f, [](const double* z) { return std::cos(z[0]); }, [](const double* z) { return std::exp(-z[0] * z[0] / 8); },
        [](const double* z) { return z[0] * std::exp(-z[0] * z[0] / 2); },
        [](const double* z) { return oracle::h(3, z[0]); }};
    for (const auto& psi : set) {
        const Callable first = apply_semigroup(psi, 0.4, 1);
        for (double yy : {-1.0, 0.0, 0.9, 2.0})
            CHECK(std::abs(apply_semigroup_at(first, 0.6, 1, &yy) - apply_semigroup_at(psi, 1.0, 1, &yy)) < 1e-8);
    }
    bool warned = false;
    SemigroupOptions opt;
    opt.underflow_warning = &warned;
    apply_semigroup_at(f, 1e-4, 1, y, opt);
    CHECK(warned);
}

TEST_CASE("grid semigroup on a sampled mode")
{
    const Grid g = make_grid(1, 401, 12.0);
    const Field h2 = Field::sample(g, [](const double* y) { return oracle::h(2, y[0]); });
    const Field out = apply_semigroup(h2, 1.0);
    for (int i = 150; i <= 250; i += 10)
        CHECK(out.v[i] == doctest::Approx(h2.v[i]).epsilon(1e-6).scale(1e-8));
}

TEST_CASE("circle heat kernel")
{
    const double rho = 1.3;
    for (double tau : {0.01, 0.2}) {
        const double mass = oracle::simpson([&](double th) { return rho * circle_heat_kernel(tau, rho, th, 0.0); },
                                            -M_PI, M_PI, 4000);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
    // small-time branch against an image sum
    double img = 0;
    for (int m = -5; m <= 5; ++m) {
        const double a = rho * (0.7 + 2 * M_PI * m);
        img += std::exp(-a * a / (4 * 0.01));
    }
    img /= std::sqrt(4 * M_PI * 0.01);
    CHECK(circle_heat_kernel(0.01, rho, 0.7, 0.0) == doctest::Approx(img).epsilon(1e-9));
}

TEST_CASE("localized norm")
{
    const Callable one = [](const double*) { return 1.0; };
    CHECK(nr_norm(one, 2.0, 1) == doctest::Approx(std::pow(4 * M_PI, 0.25)).epsilon(1e-12));
    const Callable bump = [](const double* z) { return std::exp(-(z[0] - 3) * (z[0] - 3)); };
    CHECK(nr_norm(bump, 3.0, 1) >= nr_norm(bump, 1.0, 1));
    // r = 0 is the weighted L2 norm
    const double l2 = std::sqrt(oracle::gauss_weighted([](double z) { return std::exp(-2 * (z - 3) * (z - 3)); }));
    CHECK(nr_norm(bump, 0.0, 1, 0.05, 128) == doctest::Approx(l2).epsilon(1e-8));
    // bump at 5: int e^{-2(y-5)^2 - (y-xi)^2/4} = sqrt(pi/2.25) e^{-(5-xi)^2/4.5}, so N_r rises until r = 5 then stays
    const Callable far = [](const double* z) { return std::exp(-(z[0] - 5) * (z[0] - 5)); };
    auto exact = [](double r) {
        const double xi = std::min(r, 5.0);
        return std::pow(M_PI / 2.25, 0.25) * std::exp(-(5 - xi) * (5 - xi) / 9);
    };
    double prev = 0;
    for (double r : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        const double v = nr_norm(far, r, 1, 0.05, 128);
        CHECK(v == doctest::Approx(exact(r)).epsilon(1e-6));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(nr_norm(bump, 3.0, 1) == doctest::Approx(nr_norm(bump, 4.0, 1)).epsilon(1e-3));
    CHECK_THROWS_WITH_AS(nr_norm(one, -1.0, 1), doctest::Contains("invalid-argument"), Error);
}

TEST_CASE("Velazquez ratio is scale invariant")
{
    const Callable f = [](const double* z) { return std::exp(-z[0] * z[0] / 2); };
    const Callable f5 = [&](const double* z) { return 5 * f(z); };
    CHECK(velazquez_ratio(f, 2, 1, 1.0, 2, 1) == doctest::Approx(velazquez_ratio(f5, 2, 1, 1.0, 2, 1)).epsilon(1e-12));
    // no Gaussian gain once r <= r~ e^{tau/2}
    const double q = 1 - std::exp(-2.0);
    CHECK(velazquez_factor(2, 1.0, 1.0, 2.0) == doctest::Approx(std::exp(2.0) / (4 * M_PI * q)).epsilon(1e-14));
    CHECK(velazquez_factor(2, 5.0, 1.0, 0.5) > velazquez_factor(2, 1.0, 1.0, 0.5));
}

TEST_CASE("regularization time")
{
    const double s = regularization_time(10.0, 1.0, 1.0);
    CHECK(std::exp(0.5 * (s - 10)) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
    CHECK(s >= 11.0);
    CHECK_THROWS_WITH_AS(regularization_time(1.0, 1.0, 1.0), doctest::Contains("constraint-unsatisfiable"), Error);
}

TEST_CASE("linear evolution with P = c/t")
{
    const double t0 = 10, c = 0.5;
    LinearEvolveOptions opt;
    opt.h = 0.1;
    const auto rep = linear_evolve([](double) { return 1.0; }, [&](double, double t) { return c / t; }, t0, opt);
    const double want = std::exp(rep.s_prime - t0) * std::pow(rep.s_prime / t0, c);
    CHECK(rep.sup_ball == doctest::Approx(want).epsilon(1e-8));
    CHECK(rep.l2_initial == doctest::Approx(std::pow(4 * M_PI, 0.25)).epsilon(1e-3));
    // h2 is neutral for L, so P = 1/t gives (t/t0) h2 and P = 0 leaves it fixed
    const auto h2 = linear_evolve([](double y) { return oracle::h(2, y); }, [](double, double t) { return 1 / t; }, t0, opt);
    const Field& v = h2.final_field;
    for (std::size_t i = 0; i < v.v.size(); i += 17) {
        const double y = v.grid.coord(0, int(i));
        if (std::abs(y) > 4) continue;
        CHECK(v.v[i] == doctest::Approx(h2.s_prime / t0 * oracle::h(2, y)).epsilon(1e-5).scale(1e-8));
    }
    const auto still = linear_evolve([](double y) { return oracle::h(2, y); }, [](double, double) { return 0.0; }, t0, opt);
    CHECK(still.sup_ball <= still.l2_initial * 10);
    for (std::size_t i = 0; i < v.v.size(); i += 17) {
        const double y = v.grid.coord(0, int(i));
        if (std::abs(y) <= 4) CHECK(still.final_field.v[i] == doctest::Approx(oracle::h(2, y)).epsilon(1e-5).scale(1e-8));
    }
    CHECK(rep.predicted == doctest::Approx(rep.s_prime * rep.s_prime * std::pow(t0, -1.0)).epsilon(1e-14));
}

} // TEST_SUITE
