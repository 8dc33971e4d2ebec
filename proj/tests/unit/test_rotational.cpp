#include "doctest.h"

#include "cylflow/error.hpp"
#include "cylflow/rotational.hpp"
#include "cylflow/studies.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

using namespace cylflow;

TEST_SUITE("rotational_flows") {

TEST_CASE("cylinder rhs and shape predicates")
{
    const auto g = make_graph([](double) { return 0.8; }, 0, 2, 64, 3, Ends::Periodic);
    for (double v : aag_rhs(g)) CHECK(v == doctest::Approx(-2 / 0.8).epsilon(1e-12));
    CHECK(mean_convex(g));
    CHECK(max_curvature(g) == doctest::Approx(std::sqrt(2.0) / 0.8).epsilon(1e-12));
    const auto d = make_graph([](double x) { return 0.5 + 0.3 * std::cos(2 * M_PI * x); }, 0, 1, 128, 2, Ends::Periodic);
    CHECK(strict_extrema(d) == 2);
    CHECK_FALSE(mean_convex(d));
}

TEST_CASE("round sphere shrinks at the self-similar rate")
{
    const auto g = make_graph([](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }, -1, 1, 129, 2, Ends::Caps);
    // pointwise law u_tau = R R'/u = -2/u away from the caps
    const auto f = aag_rhs(g);
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(g.x(i)) < 0.8) CHECK(f[i] == doctest::Approx(-2 / g.u(i)).epsilon(0.01));
    // |A|^2 = 2 on the unit sphere
    CHECK(max_curvature(g) == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    const auto rep = evolve_aag(g);
    CHECK(rep.T == doctest::Approx(0.25).epsilon(0.01));
    REQUIRE(!rep.singularities.empty());
    CHECK(rep.singularities[0].kind == "cap");
    CHECK(rep.always_mean_convex);

    AagConfig bad;
    bad.dt = 1.0;
    CHECK_THROWS_WITH_AS(evolve_aag(g, bad), doctest::Contains("CFL-violation"), Error);
}

TEST_CASE("profile curve normal speed")
{
    const double R = 2, a = 0.5;
    const auto c = circle_profile(R, a, 512);
    std::vector<std::array<double, 2>> nu;
    const auto f = torus_rhs(c, &nu);
    int top = 0, bot = 0;
    for (int i = 0; i < int(c.p.size()); ++i) {
        if (c.p[i][1] > c.p[top][1]) top = i;
        if (c.p[i][1] < c.p[bot][1]) bot = i;
    }
    CHECK(f[top] == doctest::Approx(-(1 / a + 1 / (R + a))).epsilon(1e-3));
    CHECK(f[bot] == doctest::Approx(-(1 / a - 1 / (R - a))).epsilon(1e-3));
    CHECK(nu[top][1] == doctest::Approx(1.0).epsilon(1e-6));

    // sphere as a semicircle closed through the axis
    const auto sphere = evolve_curve(semicircle_profile(1.0, 200));
    CHECK(sphere.T == doctest::Approx(0.25).epsilon(0.01));
    // remesh cadence barely moves the extinction time
    CurveConfig every2;
    every2.remesh_every = 2;
    const auto tube = circle_profile(2.0, 0.3, 128);
    const double T1 = evolve_curve(tube).T, T2 = evolve_curve(tube, every2).T;
    CHECK(std::abs(T1 - T2) / T1 < 2e-3);

    auto m = circle_profile(R, a, 300);
    const double before = enclosed_area(m);
    CHECK(before == doctest::Approx(M_PI * a * a).epsilon(1e-3));
    remesh(m);
    CHECK(std::abs(enclosed_area(m) - before) / before < 2e-3);
    CHECK_FALSE(self_intersects(m));
    CHECK_THROWS_WITH_AS(circle_profile(0.4, 0.5, 64), doctest::Contains("invalid-profile"), Error);
}

TEST_CASE("thin torus ring")
{
    const TorusRing t = thin_torus(1.0, 0.05, 64);
    for (double v : ring_rhs(t)) CHECK(v == doctest::Approx(-1 / 0.05).epsilon(0.05));
    const auto rep = evolve_ring(t);
    CHECK(rep.T_first == doctest::Approx(0.05 * 0.05 / 2).epsilon(0.05));
    CHECK(rep.spread < 1e-9);

    const TorusRing same = squeeze_perturbation(t, M_PI / 2, 0.0);
    for (std::size_t i = 0; i < t.a.size(); ++i) CHECK(same.a[i] == t.a[i]);
    const TorusRing sq = squeeze_perturbation(t, M_PI / 2, 0.05);
    CHECK(sq.a[16] == doctest::Approx(0.05 * 0.95).epsilon(1e-12));
    CHECK(sq.a[48] == t.a[48]);

    // antipodal equal squeezes tie
    const TorusRing two = squeeze_perturbation(squeeze_perturbation(t, M_PI / 2, 0.05), 3 * M_PI / 2, 0.05);
    const auto tied = evolve_ring(two);
    CHECK(tied.tie);
    CHECK(tied.tied.size() >= 2);
    CHECK_THROWS_WITH_AS(thin_torus(1.0, 0.5, 64), doctest::Contains("not-a-thin-torus"), Error);
    TorusRing dead = t;
    dead.a[3] = 0;
    CHECK_THROWS_WITH_AS(ring_rhs(dead), doctest::Contains("nonpositive-radius"), Error);
}

TEST_CASE("profile CSV")
{
    ArrivalTimeField af;
    af.x = {0.0, 0.5};
    af.r = {0.1};
    af.g = {0.25, std::nan("")};
    af.reached = {1, 0};
    write_arrival_csv("rotational_arrival_test.csv", af);
    const std::string text = [] {
        std::ifstream in("rotational_arrival_test.csv");
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }();
    CHECK(text.find("x,r,g") != std::string::npos);
    CHECK(text.find("0.25") != std::string::npos);
    std::remove("rotational_arrival_test.csv");

    const std::string path = "rotational_profile_test.csv";
    {
        std::ofstream out(path);
        out << "x,r\n";
        for (int i = 0; i < 8; ++i) out << std::cos(2 * M_PI * i / 8) * 0.3 << "," << 1 + 0.3 * std::sin(2 * M_PI * i / 8) << "\n";
    }
    const auto c = read_profile_csv(path);
    CHECK(c.p.size() == 8);
    CHECK(c.p[2][1] == doctest::Approx(1.3).epsilon(1e-12));
    {
        std::ofstream out(path);
        out << "x,r\n0,1\n0.1;2\n";
    }
    CHECK_THROWS_WITH_AS(read_profile_csv(path), doctest::Contains("parse-error"), Error);
    std::remove(path.c_str());
}

} // TEST_SUITE
