#include "doctest.h"
#include "oracles.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/mode_dynamics.hpp"
#include "cylflow/normal_form.hpp"
#include "cylflow/ou_semigroup.hpp"

#include <cmath>

using namespace cylflow;

namespace {

double max_diff(const Field& a, const Field& b, double within)
{
    double d = 0;
    for (std::size_t q = 0; q < a.v.size(); ++q) {
        const double y0 = a.grid.coord(0, int(q % a.grid.n[0]));
        const double y1 = a.grid.dim == 2 ? a.grid.coord(1, int(q / a.grid.n[0])) : 0.0;
        if (std::hypot(y0, y1) > within) continue;
        d = std::max(d, std::abs(a.v[q] - b.v[q]));
    }
    return d;
}

} // namespace

TEST_SUITE("mode_dynamics") {

TEST_CASE("cone ratios of pure modes")
{
    const Grid g = make_grid(1, 513, 12.0);
    const Field h2 = Field::sample(g, [](const double* y) { return oracle::h(2, y[0]); });
    auto r = cone_ratios(h2);
    CHECK(r.ratio_0 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.ratio_geq0 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.ratio_1 < 1e-8);
    const Field one = Field::sample(g, [](const double*) { return 0.3; });
    r = cone_ratios(one);
    CHECK(r.ratio_1 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.ratio_0 < 1e-8);
    const Field h5 = Field::sample(g, [](const double* y) { return oracle::h(5, y[0]); });
    CHECK(cone_ratios(h5).ratio_geq0 < 1e-6);
    CHECK(in_cone(h2, {0.9, ConeVariant::Zero}));
    CHECK_FALSE(in_cone(h5, {0.5, ConeVariant::GeqZero}));
    CHECK_THROWS_WITH_AS(in_cone(h2, {1.5, ConeVariant::Zero}), doctest::Contains("invalid-argument"), Error);
    CHECK_THROWS_WITH_AS(cone_ratios(Field::sample(make_grid(1, 33, 3.0), [](const double*) { return 1.0; })),
                         doctest::Contains("domain-too-small"), Error);
}

TEST_CASE("weighted H1 norm of a mode")
{
    // ||h_m||^2 + ||h_m'||^2 = 1 + m/2
    const Grid g = make_grid(1, 1025, 14.0);
    for (int m : {0, 1, 3})
        CHECK(h1_norm(Field::sample(g, [m](const double* y) { return oracle::h(m, y[0]); })) ==
              doctest::Approx(std::sqrt(1 + 0.5 * m)).epsilon(1e-5));
}

TEST_CASE("step map against the exact semigroup")
{
    const Grid g = make_grid(1, 513, 12.0);
    const Field v0 = Field::sample(g, [](const double* y) { return oracle::h(3, y[0]); });
    const Field v1 = Field::sample(g, [](const double* y) { return std::exp(-0.5) * oracle::h(3, y[0]); });
    CHECK(step_map_check(v0, v1).ratio < 1e-4);
    const Field zero(g);
    CHECK(step_map_check(zero, v1).zero_input);
    CHECK_THROWS_WITH_AS(step_map_check(v0, Field(make_grid(1, 257, 12.0))), doctest::Contains("grid-mismatch"), Error);
}

TEST_CASE("conformal transforms compose")
{
    ConformalTransform a, b;
    a.k = b.k = 2;
    a.lambda = 1.1;
    a.d[0] = 0.2;
    a.angle = 0.3;
    b.lambda = 0.9;
    b.d[1] = -0.1;
    b.angle = -0.7;
    const double y[2] = {0.4, -1.3};
    double ay[2], bay[2], c[2];
    a.map(y, ay);
    b.map(ay, bay);
    b.after(a).map(y, c);
    CHECK(c[0] == doctest::Approx(bay[0]).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(bay[1]).epsilon(1e-14));
    CHECK(ConformalTransform{}.size() == 0.0);

    const Grid g = make_grid(1, 401, 10.0);
    const Field r = Field::sample(g, [](const double* z) { return 1.4 + 0.1 * std::exp(-z[0] * z[0]); });
    ConformalTransform d;
    d.lambda = 1.05;
    d.d[0] = 0.3;
    const Field out = apply_transform(r, d);
    const Field want = Field::sample(g, [](const double* z) {
        const double p = (z[0] - 0.3) / 1.05;
        return 1.05 * (1.4 + 0.1 * std::exp(-p * p));
    });
    CHECK(max_diff(out, want, 6.0) < 1e-5);
    CHECK(max_diff(apply_transform(r, ConformalTransform{}), r, 10.0) < 1e-14);
    d.lambda = -1;
    CHECK_THROWS_WITH_AS(apply_transform(r, d), doctest::Contains("regraph-failure"), Error);
}

TEST_CASE("axis rotation by a quarter turn swaps the axes")
{
    const Grid g = make_grid(2, 121, 6.0);
    const Field r = Field::sample(g, [](const double* y) { return 2 + std::exp(-y[0] * y[0]); });
    const Field want = Field::sample(g, [](const double* y) { return 2 + std::exp(-y[1] * y[1]); });
    CHECK(max_diff(axis_rotate(r, M_PI / 2), want, 5.0) < 1e-3);
    // rotation there and back
    const Field bump = Field::sample(g, [](const double* y) {
        return 2 + 0.01 * std::exp(-((y[0] - 1) * (y[0] - 1) + y[1] * y[1]) / 2);
    });
    CHECK(max_diff(axis_rotate(axis_rotate(bump, 0.3), -0.3), bump, 4.0) < 1e-6);
    CHECK(max_diff(axis_rotate(bump, 0.0), bump, 6.0) < 1e-14);
    CHECK_THROWS_WITH_AS(axis_rotate(Field(make_grid(1, 11, 5.0)), 0.1), doctest::Contains("dimension-out-of-range"),
                         Error);
}

TEST_CASE("rotated neutral matrix picks up the off-diagonal term")
{
    // ((y1 + y2)/sqrt2)^2 - 2 = (y1^2 - 2)/2 + (y2^2 - 2)/2 + y1 y2
    const auto s = make_shrinker(3, 2);
    const Grid g = make_grid(2, 161, 12.0);
    const GraphState st = make_state(s, g, [&](const double* y) { return s.rho + 1e-3 * (y[0] * y[0] - 2); }, 10.0);
    const auto M0 = neutral_matrix(st).M;
    GraphState rot = st;
    rot.r = axis_rotate(st.r, M_PI / 4);
    const auto M = neutral_matrix(rot).M;
    const double m = M0(0, 0);
    CHECK(std::abs(M0(1, 1)) < 1e-9 * std::abs(m));
    CHECK(M(0, 0) == doctest::Approx(m / 2).epsilon(1e-3));
    CHECK(M(1, 1) == doctest::Approx(m / 2).epsilon(1e-3));
    CHECK(std::abs(M(0, 1)) == doctest::Approx(std::abs(m) / 2).epsilon(1e-3));
}

TEST_CASE("centering projections and Newton centering")
{
    const auto s = make_shrinker(2, 1);
    const Grid g = make_grid(1, 801, 12.0);
    auto state = [&](double a, double b, double c) {
        return make_state(s, g, [&](const double* y) { return s.rho + a * (y[0] * y[0] - 2) + b * y[0] + c; }, 10.0);
    };
    const auto m = centering_modes(state(0.05, 0.002, 0.001));
    CHECK(m.A[0] == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(m.B[0] == doctest::Approx(0.002).epsilon(1e-6));
    CHECK(m.c == doctest::Approx(0.001).epsilon(1e-6));

    const auto res = centering(state(0.05, 0.002, 0.001));
    CHECK(res.after <= 0.1 * res.before);
    CHECK(res.T.size() < 0.05);
    CHECK(res.iterations >= 1);
    CHECK_THROWS_WITH_AS(centering(state(0.0, 0.01, 0.0)), doctest::Contains("pivot-too-small"), Error);
    const auto flat = centering(state(0, 0, 0));
    CHECK(flat.iterations == 0);
}

TEST_CASE("measured modes use the ODE normalization")
{
    const auto s = make_shrinker(3, 2);
    const Grid g = make_grid(2, 161, 10.0);
    const GraphState st = make_state(s, g, [&](const double* y) {
        return s.rho + 1e-3 * oracle::h(2, y[0]) - 2e-3 * oracle::h(2, y[1]) + 5e-4 * oracle::h(1, y[0]) * oracle::h(1, y[1]);
    }, 10.0);
    const ModeTriple m = measure_modes(st);
    CHECK(m.a1 == doctest::Approx(1e-3).epsilon(1e-4));
    CHECK(m.a2 == doctest::Approx(-2e-3).epsilon(1e-4));
    CHECK(m.a12 == doctest::Approx(5e-4).epsilon(1e-4));
}

TEST_CASE("three-mode ODE closed forms")
{
    const auto s = make_shrinker(2, 1);
    const double c0v = std::pow(4 * M_PI, -0.25), q = std::sqrt(2.0) * c0v / s.rho;
    const auto traj = perturb_ode({1.0, 0.4, 0.0, 0.0}, 40.0, s, 50);
    for (const auto& p : traj) {
        CHECK(p.a1 == doctest::Approx(0.4 / (1 + 0.4 * q * (p.t - 1))).epsilon(1e-8));
        CHECK(p.a2 == 0.0);
        CHECK(p.a1 == doctest::Approx(perturb_ode_a1_closed_form(0.4, 1.0, p.t, s)).epsilon(1e-8));
    }
    // small a2 decays like t^-2
    const auto lin = perturb_ode({2.0, 0.0, 1e-9, 0.0}, 20.0, s, 4);
    CHECK(lin.back().a2 == doctest::Approx(1e-9 * 0.01).epsilon(1e-6));
    // a2(t0) = 1/t0^2 follows the linear part
    const auto a2 = perturb_ode({5.0, 0.0, 1.0 / 25, 0.0}, 50.0, s, 9);
    for (const auto& p : a2) CHECK(p.a2 == doctest::Approx(1.0 / 25 * std::pow(5.0 / p.t, 2)).epsilon(0.01));
    // subordination |a2| + |a12| <= 2 eps0 |a1| over t - t0 <= 1/(10 a1(t0))
    const double eps0 = 0.05, a1 = 0.2;
    const auto sub = perturb_ode({10.0, a1, 0.5 * eps0 * a1, 0.5 * eps0 * a1}, 10.0 + 1 / (10 * a1), s, 50);
    for (const auto& p : sub) CHECK(std::abs(p.a2) + std::abs(p.a12) <= 2 * eps0 * std::abs(p.a1));
    CHECK_THROWS_WITH_AS(perturb_ode({1.0, -1.0, 0.0, 0.0}, 5.0, s), doctest::Contains("blowup"), Error);
    CHECK_THROWS_WITH_AS(perturb_ode({0.0, 1.0, 0.0, 0.0}, 5.0, s), doctest::Contains("invalid-argument"), Error);
}

} // TEST_SUITE
