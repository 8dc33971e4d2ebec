#include "doctest.h"
#include "oracles.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/normal_form.hpp"
#include "cylflow/rmcf.hpp"

#include <cmath>

using namespace cylflow;

namespace {

GraphState cylinder_plus(const ShrinkerSpec& s, const Grid& g, std::function<double(double)> u, double t = 0.0)
{
    return make_state(s, g, [&](const double* y) { return s.rho + u(y[0]); }, t);
}

double projection(const GraphState& s, int m)
{
    ModeIndex mi;
    mi.m = {m};
    Field u = s.r;
    for (double& v : u.v) v -= s.spec.rho;
    return project_mode(u, mi, s.spec);
}

} // namespace

TEST_SUITE("rmcf_solver") {

TEST_CASE("cylinder is a fixed point of the rhs")
{
    const auto s = make_shrinker(3, 1);
    const auto st = cylinder_plus(s, make_grid(1, 128, 8.0), [](double) { return 0.0; });
    for (double v : rmcf_rhs(st)) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("constant lift follows the closed-form reaction term")
{
    const auto s = make_shrinker(2, 1);
    const double eps = 1e-6;
    const auto st = cylinder_plus(s, make_grid(1, 64, 6.0), [&](double) { return eps; });
    const double r = s.rho + eps;
    const double want = -(s.n - s.k) / r + r / 2;
    const auto f = rmcf_rhs(st);
    for (int i = 3; i < 61; ++i) CHECK(f[i] == doctest::Approx(want).epsilon(1e-9));
    CHECK(want == doctest::Approx(eps).epsilon(1e-5));
}

TEST_CASE("neutral mode h2 is stationary to second order")
{
    const auto s = make_shrinker(2, 1);
    const double eps = 1e-6;
    const auto st = cylinder_plus(s, make_grid(1, 256, 8.0), [&](double y) { return eps * oracle::h(2, y); });
    const auto f = rmcf_rhs(st);
    for (int i = 4; i < 252; ++i) CHECK(std::abs(f[i]) < 1e-10);
}

TEST_CASE("quadratic residual scales cubically")
{
    const auto s = make_shrinker(2, 1);
    const Grid g = make_grid(1, 256, 8.0);
    const Field d = Field::sample(g, [](const double* y) { return hermite_eval(2, y[0]) * cutoff(std::abs(y[0]), 6.0); });
    const double r1 = quadratic_residual_check(s, 1e-2, d), r2 = quadratic_residual_check(s, 5e-3, d);
    CHECK(r1 / r2 == doctest::Approx(8.0).epsilon(0.15));
    CHECK(quadratic_residual_check(s, 0.0, d) == 0.0);
}

TEST_CASE("RK4 step keeps the cylinder and enforces the CFL bound")
{
    const auto s = make_shrinker(2, 1);
    const Grid g = make_grid(1, 64, 6.0);
    GraphState st = cylinder_plus(s, g, [](double) { return 0.0; });
    SolverConfig cfg;
    const double dt = cfg.c_cfl * g.h(0) * g.h(0);
    for (int i = 0; i < 1000; ++i) st = step(st, cfg, dt);
    double sup = 0;
    for (double v : st.r.v) sup = std::max(sup, std::abs(v - s.rho));
    CHECK(sup < 1e-10);
    CHECK_THROWS_WITH_AS(step(st, cfg, 2 * dt), doctest::Contains("CFL-violation"), Error);
}

TEST_CASE("seeded modes grow at 1 - m/2")
{
    const auto s = make_shrinker(2, 1);
    const Grid g = make_grid(1, 512, 12.0);
    for (auto [m, tol] : {std::pair{1, 0.01}, std::pair{4, 0.02}}) {
        GraphState st = cylinder_plus(s, g, [m = m](double y) { return 1e-4 * oracle::h(m, y) * cutoff(std::abs(y), 8.0); });
        const double p0 = projection(st, m);
        FlowRunner run(SolverConfig{});
        REQUIRE(run.advance_to(st, 0.5));
        const double factor = projection(st, m) / p0;
        CHECK(factor == doctest::Approx(std::exp(0.5 * (1 - m / 2.0))).epsilon(tol));
    }
}

TEST_CASE("frame changes")
{
    const auto s = make_shrinker(2, 1);
    const GraphState st = cylinder_plus(s, make_grid(1, 128, 6.0), [](double y) { return 0.01 * std::exp(-y * y); });
    const GraphState m = to_mcf(st);
    CHECK(m.frame == Frame::MCF);
    CHECK(m.t == doctest::Approx(-1.0));
    // fixed cylinder in RMCF is the shrinking cylinder sqrt(-2 (n-k) tau)
    const GraphState c = to_mcf(cylinder_plus(s, make_grid(1, 64, 6.0), [](double) { return 0.0; }, 1.0));
    CHECK(c.r.v[32] == doctest::Approx(std::sqrt(-2.0 * (s.n - s.k) * c.t)).epsilon(1e-12));
    const GraphState back = to_rmcf(m);
    double err = 0;
    for (std::size_t i = 0; i < st.r.v.size(); ++i) err = std::max(err, std::abs(back.r.v[i] - st.r.v[i]));
    CHECK(err < 1e-10);
    CHECK_THROWS_AS(to_rmcf(st), Error);
}

TEST_CASE("graphical radius and curvature of the cylinder")
{
    const auto s = make_shrinker(3, 1);
    const GraphState st = cylinder_plus(s, make_grid(1, 101, 5.0), [](double) { return 0.0; });
    CHECK(graphical_radius(st, 0.5) == doctest::Approx(5.0));
    const auto d = curvature_diagnostics(st);
    CHECK(d.minH == doctest::Approx(s.rho / 2).epsilon(1e-12));
    CHECK(d.maxA == doctest::Approx(std::sqrt(double(s.n - s.k)) / s.rho).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(curvature_diagnostics(st, {}, true), doctest::Contains("blowup-time-not-set"), Error);
}

TEST_CASE("singularity detection on the shrinking cylinder law")
{
    std::vector<PinchSample> tr;
    for (int i = 0; i < 200; ++i) {
        PinchSample p;
        p.tau = 0.49 * i / 199.0;
        p.min_r = std::sqrt(1 - 2 * p.tau);
        tr.push_back(p);
    }
    CHECK(detect_singularity(tr, true).T_hat == doctest::Approx(0.5).epsilon(0.005));
    CHECK_THROWS_WITH_AS(detect_singularity(tr, false), doctest::Contains("no-pinch-observed"), Error);
}

TEST_CASE("L2 decay probe on power laws")
{
    std::vector<std::pair<double, double>> inv, flat;
    for (int i = 0; i < 20; ++i) {
        const double t = 20 + 10 * i;
        inv.push_back({t, 1 / t});
        flat.push_back({t, 3.0});
    }
    CHECK(l2_decay_probe(inv).slope == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(std::abs(l2_decay_probe(flat).slope) < 1e-12);
    CHECK_THROWS_WITH_AS(l2_decay_probe({{1, 1}, {2, 2}}), doctest::Contains("insufficient-data"), Error);
}

TEST_CASE("cutoff insensitivity of short runs")
{
    const auto s = make_shrinker(2, 1);
    auto run = [&](double R, int nodes) {
        GraphState st = cylinder_plus(s, make_grid(1, nodes, R), [](double y) { return 0.02 * std::exp(-y * y / 4); });
        FlowRunner r(SolverConfig{});
        r.advance_to(st, 0.5);
        return st;
    };
    const GraphState a = run(8.0, 257), b = run(16.0, 513);
    double diff = 0;
    for (int i = 0; i < 257; ++i) {
        const double y = a.grid().coord(0, i);
        if (std::abs(y) > 4) continue;
        diff = std::max(diff, std::abs(a.r.v[i] - b.r.v[i + 128]));
    }
    CHECK(diff < 1e-6);
}

} // TEST_SUITE
