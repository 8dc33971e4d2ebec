// Profile curves of surfaces of revolution in R^3 (axis r = 0) and the per-meridian
// thin-torus model. Outward normal speed is -(kappa + nu_r / r).

#include "cylflow/error.hpp"
#include "cylflow/rotational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cylflow {

using Pt = std::array<double, 2>;

namespace {

Pt sub(const Pt& a, const Pt& b) { return {a[0] - b[0], a[1] - b[1]}; }
double cross(const Pt& a, const Pt& b) { return a[0] * b[1] - a[1] * b[0]; }
double norm(const Pt& a) { return std::hypot(a[0], a[1]); }
Pt mirror(const Pt& a) { return {a[0], -a[1]}; }

// neighbours with periodic wrap (closed) or reflection through the axis (open)
Pt node(const ProfileCurve& c, int i)
{
    const int N = int(c.p.size());
    if (c.closed) return c.p[((i % N) + N) % N];
    if (i < 0) return mirror(c.p[-i]);
    if (i >= N) return mirror(c.p[2 * (N - 1) - i]);
    return c.p[i];
}

double signed_area(const ProfileCurve& c)
{
    const int N = int(c.p.size());
    double A = 0.0;
    for (int i = 0; i < (c.closed ? N : N - 1); ++i) A += cross(node(c, i), node(c, i + 1));
    if (!c.closed) A += cross(c.p.back(), c.p.front());   // closing segment lies on the axis
    return 0.5 * A;
}

double length(const ProfileCurve& c, std::vector<double>* cum = nullptr)
{
    const int N = int(c.p.size());
    const int segs = c.closed ? N : N - 1;
    double L = 0.0;
    if (cum) cum->assign(1, 0.0);
    for (int i = 0; i < segs; ++i) {
        L += norm(sub(node(c, i + 1), node(c, i)));
        if (cum) cum->push_back(L);
    }
    return L;
}

bool segments_cross(const Pt& a, const Pt& b, const Pt& c, const Pt& d)
{
    if (std::max(a[0], b[0]) < std::min(c[0], d[0]) || std::max(c[0], d[0]) < std::min(a[0], b[0]) ||
        std::max(a[1], b[1]) < std::min(c[1], d[1]) || std::max(c[1], d[1]) < std::min(a[1], b[1]))
        return false;
    const double d1 = cross(sub(b, a), sub(c, a)), d2 = cross(sub(b, a), sub(d, a));
    const double d3 = cross(sub(d, c), sub(a, c)), d4 = cross(sub(d, c), sub(b, c));
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

} // namespace

ProfileCurve circle_profile(double center_r, double a, int nodes)
{
    if (!(center_r > a) || !(a > 0)) fail("invalid-profile", "circle must stay off the axis");
    ProfileCurve c;
    for (int i = 0; i < nodes; ++i) {
        const double t = 2 * M_PI * i / nodes;
        c.p.push_back({a * std::cos(t), center_r + a * std::sin(t)});
    }
    return c;
}

ProfileCurve semicircle_profile(double R, int nodes)
{
    ProfileCurve c;
    c.closed = false;
    for (int i = 0; i < nodes; ++i) {
        const double t = M_PI * i / (nodes - 1);
        c.p.push_back({R * std::cos(t), i == 0 || i == nodes - 1 ? 0.0 : R * std::sin(t)});
    }
    return c;
}

double enclosed_area(const ProfileCurve& c) { return std::abs(signed_area(c)); }

std::vector<double> torus_rhs(const ProfileCurve& c, std::vector<Pt>* normals)
{
    const int N = int(c.p.size());
    if (N < 5) fail("invalid-profile", "need at least 5 nodes");
    const double orient = signed_area(c) >= 0 ? 1.0 : -1.0;
    std::vector<double> V(N);
    if (normals) normals->resize(N);
    for (int i = 0; i < N; ++i) {
        const Pt pm = node(c, i - 1), p = node(c, i), pp = node(c, i + 1);
        const Pt a = sub(p, pm), b = sub(pp, p), ch = sub(pp, pm);
        const double kappa = orient * 2 * cross(a, b) / (norm(a) * norm(b) * norm(ch));
        const double L = norm(ch);
        const Pt n = {orient * ch[1] / L, -orient * ch[0] / L};
        const bool tip = !c.closed && (i == 0 || i == N - 1);
        if (tip) {
            V[i] = -2.0 * kappa;
        } else {
            if (!(p[1] > 0.0)) fail("axis-collision", "profile reached the axis");
            V[i] = -(kappa + n[1] / p[1]);
        }
        if (normals) {
            // tip normals point along the axis, away from the neighbouring node
            const Pt& q = c.p[i == 0 ? 1 : std::max(N - 2, 0)];
            (*normals)[i] = tip ? Pt{p[0] > q[0] ? 1.0 : -1.0, 0.0} : n;
        }
    }
    return V;
}

void remesh(ProfileCurve& c)
{
    const int N = int(c.p.size());
    std::vector<double> cum;
    const double L = length(c, &cum);
    const int segs = c.closed ? N : N - 1;
    std::vector<Pt> out(N);
    int k = 0;
    for (int i = 0; i < N; ++i) {
        const double s = L * i / segs;
        while (k < segs - 1 && cum[k + 1] < s) ++k;
        const double t = std::clamp((s - cum[k]) / (cum[k + 1] - cum[k]), 0.0, 1.0);
        // Catmull-Rom through nodes k-1 .. k+2
        const Pt p0 = node(c, k - 1), p1 = node(c, k), p2 = node(c, k + 1), p3 = node(c, k + 2);
        for (int d = 0; d < 2; ++d)
            out[i][d] = p1[d] + 0.5 * t *
                                    (p2[d] - p0[d] +
                                     t * (2 * p0[d] - 5 * p1[d] + 4 * p2[d] - p3[d] + t * (3 * (p1[d] - p2[d]) + p3[d] - p0[d])));
    }
    if (!c.closed) {
        out.front() = {c.p.front()[0], 0.0};
        out.back() = {c.p.back()[0], 0.0};
    }
    c.p = std::move(out);
}

bool self_intersects(const ProfileCurve& c)
{
    const int N = int(c.p.size());
    const int segs = c.closed ? N : N - 1;
    for (int i = 0; i < segs; ++i)
        for (int j = i + 2; j < segs; ++j) {
            if (c.closed && i == 0 && j == segs - 1) continue;
            if (segments_cross(node(c, i), node(c, i + 1), node(c, j), node(c, j + 1))) return true;
        }
    return false;
}

CurveReport evolve_curve(const ProfileCurve& c0, const CurveConfig& cfg)
{
    if (self_intersects(c0)) fail("self-intersection-detected", "initial profile is not simple");
    ProfileCurve c = c0;
    remesh(c);
    CurveReport rep;
    const int N = int(c.p.size());
    const int segs = c.closed ? N : N - 1;
    const double A0 = enclosed_area(c);
    {
        std::vector<double> V = torus_rhs(c);
        double m = 0.0;
        for (double v : V) m += v;
        rep.initial_rate = m / N;
    }
    double A = A0, Aprev = A0, tprev = 0.0;
    long step = 0;
    for (; step < cfg.max_steps; ++step) {
        if (A < cfg.stop_fraction * cfg.stop_fraction * A0) break;
        const double ds = length(c) / segs;
        const double dt = cfg.dt_factor * ds * ds;
        std::vector<Pt> nrm;
        const std::vector<double> V = torus_rhs(c, &nrm);
        for (int i = 0; i < N; ++i) {
            c.p[i][0] += dt * V[i] * nrm[i][0];
            c.p[i][1] += dt * V[i] * nrm[i][1];
        }
        if (!c.closed) c.p.front()[1] = c.p.back()[1] = 0.0;
        c.tau += dt;
        if ((step + 1) % cfg.remesh_every == 0) remesh(c);
        for (int i = c.closed ? 0 : 1; i < (c.closed ? N : N - 1); ++i)
            if (c.p[i][1] <= cfg.r_min_stop) fail("axis-collision", "profile reached r_min_stop");
        if (self_intersects(c)) fail("self-intersection-detected", "profile crossed itself at tau=" + std::to_string(c.tau));
        Aprev = A;
        tprev = c.tau - dt;
        A = enclosed_area(c);
    }
    if (step >= cfg.max_steps) fail("step-limit", "no extinction within max_steps");
    const double rate = (Aprev - A) / (c.tau - tprev);
    rep.T = c.tau + (rate > 0 ? A / rate : 0.0);
    rep.tau_stop = c.tau;
    rep.steps = step;
    rep.final_curve = std::move(c);
    return rep;
}

// ---- per-meridian ring model ----

double TorusRing::phi(int i) const { return 2 * M_PI * i / double(a.size()); }

TorusRing thin_torus(double R, double a, int meridians)
{
    if (meridians < 8) fail("grid-too-small", "need at least 8 meridians");
    if (!(a > 0) || !(a < 0.2 * R)) fail("not-a-thin-torus", "need 0 < a/R < 0.2");
    TorusRing t;
    t.R = R;
    t.a.assign(meridians, a);
    return t;
}

TorusRing squeeze_perturbation(const TorusRing& t, double p, double eps, double width)
{
    const double amax = *std::max_element(t.a.begin(), t.a.end());
    if (!(amax < 0.2 * t.R)) fail("not-a-thin-torus", "need a/R < 0.2");
    if (!(width > 0 && width <= M_PI)) fail("invalid-width", "bump half-width must lie in (0, pi]");
    TorusRing s = t;
    for (int i = 0; i < int(s.a.size()); ++i) {
        const double d = std::remainder(s.phi(i) - p, 2 * M_PI) / width;
        const double bump = std::abs(d) < 1 ? std::exp(1 - 1 / (1 - d * d)) : 0.0;
        s.a[i] *= 1 - eps * bump;
    }
    return s;
}

std::vector<double> ring_rhs(const TorusRing& t)
{
    const int M = int(t.a.size());
    const double ds = t.R * 2 * M_PI / M;
    std::vector<double> f(M);
    for (int i = 0; i < M; ++i) {
        const double am = t.a[(i + M - 1) % M], a = t.a[i], ap = t.a[(i + 1) % M];
        if (!(a > 0.0)) fail("nonpositive-radius", "tube radius vanished");
        const double as = (ap - am) / (2 * ds), ass = (ap - 2 * a + am) / (ds * ds);
        // tube law averaged over the meridian circle, with the ring-curvature correction
        f[i] = ass / (1 + as * as) - 1 / a + (t.R / std::sqrt(t.R * t.R - a * a) - 1) / a;
    }
    return f;
}

RingReport evolve_ring(const TorusRing& t0, double stop_fraction, double dt_factor)
{
    const int M = int(t0.a.size());
    TorusRing t = t0;
    const double amax0 = *std::max_element(t.a.begin(), t.a.end());
    if (!(amax0 < 0.2 * t.R)) fail("not-a-thin-torus", "need a/R < 0.2");
    const double ds = t.R * 2 * M_PI / M;
    const double astop = stop_fraction * amax0;
    double dt = 0.0;
    auto add = [&](const std::vector<double>& k, double c) {
        TorusRing s = t;
        for (int i = 0; i < M; ++i) s.a[i] += c * k[i];
        return s;
    };
    for (long step = 0;; ++step) {
        if (step > 100000000) fail("step-limit", "ring did not pinch");
        const double amin = *std::min_element(t.a.begin(), t.a.end());
        if (amin < astop) break;
        dt = dt_factor * std::min(ds * ds, amin * amin);
        const auto k1 = ring_rhs(t);
        const auto k2 = ring_rhs(add(k1, 0.5 * dt));
        const auto k3 = ring_rhs(add(k2, 0.5 * dt));
        const auto k4 = ring_rhs(add(k3, dt));
        for (int i = 0; i < M; ++i) t.a[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t.tau += dt;
    }
    RingReport rep;
    rep.tau_stop = t.tau;
    rep.dt_last = dt;
    const auto f = ring_rhs(t);
    rep.T.resize(M);
    for (int i = 0; i < M; ++i) {
        const double rate = -2 * t.a[i] * f[i];   // -(a^2)'
        rep.T[i] = t.tau + (rate > 0 ? t.a[i] * t.a[i] / rate : std::numeric_limits<double>::infinity());
    }
    rep.first = int(std::min_element(rep.T.begin(), rep.T.end()) - rep.T.begin());
    rep.T_first = rep.T[rep.first];
    const double Tmax = *std::max_element(rep.T.begin(), rep.T.end());
    rep.spread = (Tmax - rep.T_first) / rep.T_first;
    const double tol = std::max(2 * dt, 1e-12 * rep.T_first);
    for (int i = 0; i < M; ++i) {
        const double l = rep.T[(i + M - 1) % M], m = rep.T[i], r = rep.T[(i + 1) % M];
        if (m <= l && m < r && m <= rep.T_first + tol) rep.tied.push_back(i);
    }
    rep.tie = rep.tied.size() >= 2;
    return rep;
}

} // namespace cylflow
