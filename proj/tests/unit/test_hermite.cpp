#include "doctest.h"
#include "oracles.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"

#include <cmath>
#include <random>

using namespace cylflow;

TEST_SUITE("hermite_spectral") {

TEST_CASE("hermite_eval matches explicit polynomials")
{
    CHECK(hermite_eval(0, 3.7) == doctest::Approx(std::pow(4 * M_PI, -0.25)).epsilon(1e-15));
    const double c2 = 0.25 * std::pow(M_PI, -0.25);
    for (double y : {-3.0, -0.5, 0.0, 1.3, 4.0})
        CHECK(hermite_eval(2, y) == doctest::Approx(c2 * (y * y - 2)).epsilon(1e-14));
    CHECK(std::abs(hermite_eval(2, std::sqrt(2.0))) < 1e-15);
    for (int m = 0; m <= 12; ++m)
        for (double y : {-5.0, -1.1, 0.2, 2.5, 6.0})
            CHECK(hermite_eval(m, y) == doctest::Approx(oracle::h(m, y)).epsilon(1e-11));
    double all[13];
    hermite_all(12, 1.7, all);
    for (int m = 0; m <= 12; ++m) CHECK(all[m] == doctest::Approx(hermite_eval(m, 1.7)).epsilon(1e-14));
}

TEST_CASE("gauss nodes moments and normalization")
{
    const auto& q = gauss_nodes(64);
    double s0 = 0, s2 = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        s0 += q.weights[i];
        s2 += q.weights[i] * q.nodes[i] * q.nodes[i];
    }
    CHECK(std::abs(s0 - 2 * std::sqrt(M_PI)) < 1e-14 * 4);
    CHECK(std::abs(s2 - 4 * std::sqrt(M_PI)) < 1e-14 * 8);
    const auto& q6 = gauss_nodes(6);
    double n5 = 0;
    for (int i = 0; i < 6; ++i) n5 += q6.weights[i] * std::pow(hermite_eval(5, q6.nodes[i]), 2);
    CHECK(std::abs(n5 - 1.0) < 1e-12);
    // exactness up to degree 2N-1 against the Simpson oracle
    const auto& q5 = gauss_nodes(5);
    for (int p = 0; p <= 9; p += 1) {
        double s = 0;
        for (int i = 0; i < 5; ++i) s += q5.weights[i] * std::pow(q5.nodes[i], p);
        const double want = oracle::gauss_weighted([&](double y) { return std::pow(y, p); });
        CHECK(std::abs(s - want) < 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("orthonormality up to degree 10")
{
    for (int m = 0; m <= 10; ++m)
        for (int n = 0; n <= 10; ++n) {
            const double ip = weighted_inner([&](const double* y) { return hermite_eval(m, y[0]); },
                                             [&](const double* y) { return hermite_eval(n, y[0]); }, 1);
            CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-10);
        }
    const double one = weighted_inner([](const double*) { return 1.0; }, [](const double*) { return 1.0; }, 1);
    CHECK(one == doctest::Approx(2 * std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("normalized H2 has unit norm over the shrinker")
{
    for (auto [n, k] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}, std::pair{5, 3}}) {
        const auto s = make_shrinker(n, k);
        const double G = gaussian_sphere_factor(s);
        auto H2 = [&](const double* y) { return std::pow(c0(), k - 1) / std::sqrt(G) * hermite_eval(2, y[0]); };
        CHECK(std::abs(weighted_inner(H2, H2, k, &s, Measure::Shrinker, 24) - 1.0) < 1e-10);
    }
}

TEST_CASE("triple products")
{
    CHECK(triple_product(2, 2, 2) == doctest::Approx(2 * std::pow(M_PI, -0.25)).epsilon(1e-14));
    CHECK(triple_product(2, 2, 2) == doctest::Approx(8 * 0.25 * std::pow(M_PI, -0.25)).epsilon(1e-14));
    CHECK(triple_product(1, 1, 1) == 0.0);
    CHECK(triple_product(3, 1, 1) == 0.0);
    for (int m = 0; m <= 8; ++m)
        for (int n = 0; n <= 8; ++n)
            for (int l = 0; l <= 8; ++l) {
                const double a = triple_product(m, n, l);
                CHECK(triple_product(n, m, l) == doctest::Approx(a).epsilon(1e-14));
                CHECK(triple_product(l, n, m) == doctest::Approx(a).epsilon(1e-14));
                CHECK(triple_product(m, l, n) == doctest::Approx(a).epsilon(1e-14));
                const double q = weighted_inner(
                    [&](const double* y) { return hermite_eval(m, y[0]) * hermite_eval(n, y[0]); },
                    [&](const double* y) { return hermite_eval(l, y[0]); }, 1);
                CHECK(std::abs(a - q) < 1e-10);
            }
}

TEST_CASE("project_mode")
{
    const auto s = make_shrinker(3, 2);
    const double G = gaussian_sphere_factor(s);
    const Grid g = make_grid(2, 161, 16.0);
    const Field H2 = Field::sample(g, [&](const double* y) { return c0() / std::sqrt(G) * hermite_eval(2, y[0]); });
    CHECK(std::abs(project_mode(H2, {{2, 0}, 0}, s) - 1.0) < 1e-10);
    const Field h2 = Field::sample(g, [&](const double* y) { return hermite_eval(2, y[0]); });
    // direct quadrature: <h2(y1), H2>_Sigma = G * c0 G^{-1/2} <h2(y1), h2(y1)>_{R^2}
    const double direct = G * c0() / std::sqrt(G) * oracle::gauss_weighted([](double y) { return oracle::h(2, y) * oracle::h(2, y); }) *
                          2 * std::sqrt(M_PI);
    CHECK(project_mode(h2, {{2, 0}, 0}, s) == doctest::Approx(direct).epsilon(1e-9));
    CHECK(project_mode(h2, {{2, 0}, 0}, s) == doctest::Approx(std::sqrt(G) / c0()).epsilon(1e-9));
    const Field odd = Field::sample(g, [](const double* y) { return y[0] * std::exp(-0.1 * y[1] * y[1]) + std::pow(y[0], 3); });
    CHECK(std::abs(project_mode(odd, {{2, 0}, 0}, s)) < 1e-12);
    CHECK_THROWS_AS(project_mode(h2, {{0, 0}, 1}, s), Error);
}

TEST_CASE("apply_L eigen-relations and fourth-order convergence")
{
    const Field one = Field::sample(make_grid(1, 101, 8.0), [](const double*) { return 1.0; });
    const Field L1 = apply_L(one);
    for (double x : L1.v) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    for (int m : {2, 3, 4, 5, 6}) {
        std::vector<double> errs;
        for (int nodes : {161, 321, 641}) {
            const Grid g = make_grid(1, nodes, 8.0);
            const Field v = Field::sample(g, [&](const double* y) { return hermite_eval(m, y[0]); });
            const Field Lv = apply_L(v);
            double e = 0;
            for (int i = 2; i < nodes - 2; ++i)
                if (std::abs(g.coord(0, i)) <= 4.0) e = std::max(e, std::abs(Lv.v[i] - (1 - m / 2.0) * v.v[i]));
            errs.push_back(e);
        }
        if (m <= 4) {
            CHECK(errs[2] < 1e-8);   // stencils are exact for quartics
        } else {
            CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(4.0).epsilon(0.075));
            CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(4.0).epsilon(0.075));
        }
    }
    // non-polynomial smooth mode-content: Gaussian-modulated h_m converges at order 4
    std::vector<double> errs;
    for (int nodes : {81, 161, 321}) {
        const Grid g = make_grid(1, nodes, 8.0);
        auto f = [](double y) { return std::sin(y); };
        const Field v = Field::sample(g, [&](const double* y) { return f(y[0]); });
        const Field Lv = apply_L(v);
        double e = 0;
        for (int i = 0; i < nodes; ++i) {
            const double y = g.coord(0, i);
            const double exact = -std::sin(y) - 0.5 * y * std::cos(y) + std::sin(y);
            e = std::max(e, std::abs(Lv.v[i] - exact));
        }
        errs.push_back(e);
    }
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(4.0).epsilon(0.075));
    CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(4.0).epsilon(0.075));
    CHECK_THROWS_AS(apply_L(Field(make_grid(1, 7, 1.0))), Error);
}

TEST_CASE("projection round trip and Parseval")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    const Grid g = make_grid(2, 201, 20.0);
    SpectralCoeffs in;
    in.degree = 6;
    in.k = 2;
    for (const auto& m : multi_indices(2, 6)) in.c[m] = U(rng);
    const Field v = spectral_reconstruct(in, g);
    const SpectralCoeffs out = spectral_decompose(v, 6);
    for (const auto& [m, c] : in.c) CHECK(std::abs(out.c.at(m) - c) < 1e-9);
    CHECK(std::abs(weighted_inner(v, v) - in.norm2()) < 1e-9);
}

}
