// Rotational graphs r = u(x) evolved as w = u^2, which keeps the neck and the tips regular:
//   w_tau = (4 w w_xx - 2 w_x^2) / (4 w + w_x^2) - 2(n-1).
// Cap tips carry w = 0 and move with w_x(tip) * tip' = 2n.

#include "cylflow/rotational.hpp"

#include "cylflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cylflow {

double RotationalGraph::u(int i) const { return std::sqrt(std::max(w[i], 0.0)); }

RotationalGraph make_graph(const std::function<double(double)>& u, double a, double b, int nodes, int n, Ends ends)
{
    if (nodes < 8) fail("grid-too-small", "need at least 8 nodes");
    if (!(b > a)) fail("invalid-interval", "need a < b");
    if (n < 2) fail("dimension-out-of-range", "need n >= 2");
    RotationalGraph g;
    g.a = a;
    g.b = b;
    g.n = n;
    g.ends = ends;
    g.w.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double r = u(g.x(i));
        g.w[i] = r * r;
    }
    if (ends == Ends::Caps) g.w.front() = g.w.back() = 0.0;
    return g;
}

namespace {

struct Stencil {
    const RotationalGraph& g;
    double wl(int i) const
    {
        const int N = g.size();
        if (i >= 0 && i < N) return g.w[i];
        if (g.ends == Ends::Periodic) return g.w[(i + N) % N];
        return g.w[i < 0 ? -i : 2 * (N - 1) - i];   // mirror; unused for caps
    }
};

// fixed-frame w_tau at node i (interior or periodic)
double w_law(const RotationalGraph& g, int i, double& wx)
{
    const Stencil s{g};
    const double h = g.h();
    const double wm = s.wl(i - 1), w0 = g.w[i], wp = s.wl(i + 1);
    wx = (wp - wm) / (2 * h);
    const double wxx = (wp - 2 * w0 + wm) / (h * h);
    return (4 * w0 * wxx - 2 * wx * wx) / (4 * w0 + wx * wx) - 2.0 * (g.n - 1);
}

void check_positive(const RotationalGraph& g)
{
    const int lo = g.caps() ? 1 : 0, hi = g.caps() ? g.size() - 1 : g.size();
    for (int i = lo; i < hi; ++i)
        if (!(g.w[i] > 0.0)) fail("nonpositive-radius", "radius vanished at x=" + std::to_string(g.x(i)));
}

double tip_speed(const RotationalGraph& g, bool left)
{
    const int N = g.size();
    const double h = g.h();
    const double w1 = left ? g.w[1] : g.w[N - 2], w2 = left ? g.w[2] : g.w[N - 3];
    // quadratic through the tip (w = 0) and the next two nodes
    const double slope = (4 * w1 - w2) / (2 * h);
    if (!(slope > 0.0)) fail("nonpositive-radius", "cap tip lost its slope");
    return left ? 2.0 * g.n / slope : -2.0 * g.n / slope;
}

} // namespace

std::vector<double> aag_w_rhs(const RotationalGraph& g, double* da, double* db)
{
    check_positive(g);
    const int N = g.size();
    std::vector<double> f(N, 0.0);
    if (!g.caps()) {
        double wx;
        for (int i = 0; i < N; ++i) f[i] = w_law(g, i, wx);
        if (da) *da = 0.0;
        if (db) *db = 0.0;
        return f;
    }
    const double va = tip_speed(g, true), vb = tip_speed(g, false);
    for (int i = 1; i < N - 1; ++i) {
        double wx;
        const double s = double(i) / (N - 1);
        f[i] = w_law(g, i, wx) + wx * (va * (1 - s) + vb * s);
    }
    if (da) *da = va;
    if (db) *db = vb;
    return f;
}

std::vector<double> aag_rhs(const RotationalGraph& g)
{
    check_positive(g);
    const int N = g.size();
    std::vector<double> f(N, 0.0);
    const int lo = g.caps() ? 1 : 0, hi = g.caps() ? N - 1 : N;
    for (int i = lo; i < hi; ++i) {
        double wx;
        f[i] = w_law(g, i, wx) / (2 * g.u(i));
    }
    return f;
}

// sign changes of the discrete slope; a flat top between two nodes counts once
int strict_extrema(const RotationalGraph& g)
{
    const int N = g.size();
    const bool per = g.ends == Ends::Periodic;
    std::vector<int> sg;
    for (int i = 0; i < (per ? N : N - 1); ++i) {
        const double d = g.w[(i + 1) % N] - g.w[i];
        if (d != 0.0) sg.push_back(d > 0 ? 1 : -1);
    }
    if (sg.empty()) return 0;
    int c = 0;
    for (std::size_t j = 1; j < sg.size(); ++j) c += sg[j] != sg[j - 1];
    if (per) c += sg.back() != sg.front();
    if (g.ends == Ends::Neumann) c += (g.w[1] != g.w[0]) + (g.w[N - 1] != g.w[N - 2]);
    return c;
}

bool mean_convex(const RotationalGraph& g, double tol)
{
    const int N = g.size();
    const int lo = g.caps() ? 1 : 0, hi = g.caps() ? N - 1 : N;
    for (int i = lo; i < hi; ++i) {
        double wx;
        if (w_law(g, i, wx) > tol) return false;
    }
    return true;
}

namespace {

// w_tau = D w_xx + E with D = 4w/(4w + w_x^2); D is taken implicitly
struct Split {
    std::vector<double> D, d2, E;
    double va = 0.0, vb = 0.0;
};

Split split(const RotationalGraph& g)
{
    check_positive(g);
    const int N = g.size();
    Split s;
    s.D.assign(N, 0.0);
    s.d2.assign(N, 0.0);
    s.E.assign(N, 0.0);
    if (g.caps()) {
        s.va = tip_speed(g, true);
        s.vb = tip_speed(g, false);
    }
    const Stencil st{g};
    const double h = g.h();
    const int lo = g.caps() ? 1 : 0, hi = g.caps() ? N - 1 : N;
    for (int i = lo; i < hi; ++i) {
        const double wm = st.wl(i - 1), w0 = g.w[i], wp = st.wl(i + 1);
        const double wx = (wp - wm) / (2 * h);
        s.d2[i] = (wp - 2 * w0 + wm) / (h * h);
        s.D[i] = 4 * w0 / (4 * w0 + wx * wx);
        s.E[i] = -2 * wx * wx / (4 * w0 + wx * wx) - 2.0 * (g.n - 1);
        if (g.caps()) {
            const double x = double(i) / (N - 1);
            s.E[i] += wx * (s.va * (1 - x) + s.vb * x);
        }
    }
    return s;
}

// (c0 - dt D d2) w = r with the boundary closure of g; overwrites r
void implicit_solve(const RotationalGraph& g, double c0, double dt, const std::vector<double>& D,
                    std::vector<double>& r)
{
    const int N = g.size();
    const double k = dt / (g.h() * g.h());
    const int lo = g.caps() ? 1 : 0, m = g.caps() ? N - 2 : N;
    std::vector<double> sub(m), dia(m), sup(m), rhs(m);
    for (int j = 0; j < m; ++j) {
        const int i = lo + j;
        sub[j] = -k * D[i];
        sup[j] = -k * D[i];
        dia[j] = c0 + 2 * k * D[i];
        rhs[j] = r[i];
    }
    if (g.ends == Ends::Neumann) {
        sup[0] *= 2;
        sub[m - 1] *= 2;
    }
    auto thomas = [m](std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double> d) {
        for (int j = 1; j < m; ++j) {
            const double f = a[j] / b[j - 1];
            b[j] -= f * c[j - 1];
            d[j] -= f * d[j - 1];
        }
        d[m - 1] /= b[m - 1];
        for (int j = m - 2; j >= 0; --j) d[j] = (d[j] - c[j] * d[j + 1]) / b[j];
        return d;
    };
    std::vector<double> x;
    if (g.ends == Ends::Periodic) {
        // Sherman-Morrison for the two corner entries
        const double alpha = sup[m - 1], beta = sub[0], gamma = -dia[0];
        std::vector<double> b = dia;
        b[0] -= gamma;
        b[m - 1] -= alpha * beta / gamma;
        x = thomas(sub, b, sup, rhs);
        std::vector<double> u(m, 0.0);
        u[0] = gamma;
        u[m - 1] = alpha;
        const std::vector<double> z = thomas(sub, b, sup, u);
        const double fact = (x[0] + beta * x[m - 1] / gamma) / (1 + z[0] + beta * z[m - 1] / gamma);
        for (int j = 0; j < m; ++j) x[j] -= fact * z[j];
    } else {
        x = thomas(sub, dia, sup, rhs);
    }
    for (int j = 0; j < m; ++j) r[lo + j] = x[j];
}

} // namespace

AagReport evolve_aag(const RotationalGraph& g0, const AagConfig& cfg)
{
    check_positive(g0);
    AagReport rep;
    rep.initial_extrema = strict_extrema(g0);
    RotationalGraph g = g0;
    const int N = g.size();
    const double wmax0 = *std::max_element(g.w.begin(), g.w.end());
    const double wstop = std::pow(cfg.stop_fraction, 2) * wmax0;

    rep.always_mean_convex = mean_convex(g, 1e-9 * wmax0);
    if (cfg.keep_snapshots) rep.snapshots.push_back(g);
    std::vector<double> wsnap = g.w;

    auto interior_min = [&](const RotationalGraph& s) {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 1; i < N - 1; ++i)
            if (s.w[i] <= s.w[i - 1] && s.w[i] <= s.w[i + 1]) m = std::min(m, s.w[i]);
        if (!s.caps()) m = std::min(m, *std::min_element(s.w.begin(), s.w.end()));
        return m;
    };
    double minsnap = interior_min(g);

    // variable-step IMEX BDF2: implicit D^n w_xx, the rest and the lag of D extrapolated
    RotationalGraph prev;
    Split sp_prev;
    double dt = 0.0, dt_prev = 0.0;
    long step = 0;
    for (; step < cfg.max_steps; ++step) {
        const double wmax = *std::max_element(g.w.begin(), g.w.end());
        const double wneck = interior_min(g);
        if (wneck < wstop || wmax < wstop) break;
        if (g.caps() && g.b - g.a < 1e-9) break;
        const Split sp = split(g);
        const double h = g.h();
        const double vmax = std::max(std::abs(sp.va), std::abs(sp.vb));
        const double uref = std::sqrt(std::min(wmax, wneck));
        if (cfg.dt > 0.0) {
            dt = cfg.dt;
            if (vmax * dt > h) fail("CFL-violation", "cap tip moves more than one cell per step");
        } else {
            dt = cfg.cfl * h * uref / (2.0 * g.n);
            if (vmax > 0) dt = std::min(dt, cfg.cfl * h / vmax);
            if (dt_prev > 0) dt = std::min(dt, 1.25 * dt_prev);
        }
        const bool bdf2 = dt_prev > 0.0;
        const double om = bdf2 ? dt / dt_prev : 0.0;
        const double c0 = (1 + 2 * om) / (1 + om), c1 = 1 + om, c2 = om * om / (1 + om);

        RotationalGraph nx = g;
        if (g.caps()) {
            nx.a = (c1 * g.a - c2 * prev.a + dt * ((1 + om) * sp.va - om * sp_prev.va)) / c0;
            nx.b = (c1 * g.b - c2 * prev.b + dt * ((1 + om) * sp.vb - om * sp_prev.vb)) / c0;
            if (!(nx.b > nx.a)) break;
        }
        std::vector<double> r(N, 0.0);
        for (int i = 0; i < N; ++i) {
            double e = (1 + om) * sp.E[i];
            if (bdf2) e -= om * (sp_prev.E[i] + (sp_prev.D[i] - sp.D[i]) * sp_prev.d2[i]);
            r[i] = c1 * g.w[i] - (bdf2 ? c2 * prev.w[i] : 0.0) + dt * e;
        }
        implicit_solve(nx, c0, dt, sp.D, r);
        nx.w = std::move(r);
        if (g.caps()) nx.w.front() = nx.w.back() = 0.0;
        nx.tau = g.tau + dt;
        bool touched = false;
        for (int i = g.caps() ? 1 : 0; i < (g.caps() ? N - 1 : N); ++i)
            if (!(nx.w[i] > 0.0)) {
                nx.w[i] = std::numeric_limits<double>::min();
                touched = true;
            }
        prev = std::move(g);
        g = std::move(nx);
        sp_prev = sp;
        dt_prev = dt;
        if (touched) break;

    if (cfg.keep_snapshots) {
            double dmax = 0.0;
            for (int i = 0; i < N; ++i) dmax = std::max(dmax, std::abs(g.w[i] - wsnap[i]));
            const double m = interior_min(g);
            if (dmax > cfg.snapshot_tol * *std::max_element(g.w.begin(), g.w.end()) || m < 0.9 * minsnap) {
                if (!mean_convex(g, 1e-9 * wmax0)) rep.always_mean_convex = false;
                rep.snapshots.push_back(g);
                wsnap = g.w;
                minsnap = m;
            }
        }
    }
    if (step >= cfg.max_steps) fail("step-limit", "no singularity within max_steps");
    if (cfg.keep_snapshots && rep.snapshots.back().tau != g.tau) {
        if (!mean_convex(g, 1e-9 * wmax0)) rep.always_mean_convex = false;
        rep.snapshots.push_back(g);
    }
    rep.steps = step;
    rep.tau_stop = g.tau;

    // classify: component extinction if the whole profile is near the stop radius
    const std::vector<double> rate = aag_w_rhs(g);
    const double wmax = *std::max_element(g.w.begin(), g.w.end());
    const double tol = std::max(2 * dt, 1e-12 * g.tau);
    if (wmax <= 16 * wstop || (g.caps() && g.b - g.a < 1e-9)) {
        int im = int(std::max_element(g.w.begin(), g.w.end()) - g.w.begin());
        const double r = -rate[im];
        rep.singularities.push_back({"cap", g.x(im), g.tau + (r > 0 ? g.w[im] / r : 0.0)});
        rep.T = rep.singularities.back().T;
    } else {
        std::vector<Singularity> necks;
        for (int i = 0; i < N; ++i) {
            if (g.caps() && (i == 0 || i == N - 1)) continue;
            const Stencil s{g};
            double l = s.wl(i - 1), r = s.wl(i + 1);
            if (!g.caps() && g.ends == Ends::Neumann && (i == 0 || i == N - 1)) l = r = s.wl(i == 0 ? 1 : N - 2);
            if (!(g.w[i] <= l && g.w[i] <= r && g.w[i] < 16 * wstop)) continue;
            const double q = -rate[i];
            const double T = g.tau + (q > 0 ? g.w[i] / q : 0.0);
            // vertex of the parabola through the three nodes
            const double den = l - 2 * g.w[i] + r;
            const double off = den > 0 ? 0.5 * (l - r) / den : 0.0;
            necks.push_back({"neck", g.x(i) + off * g.h(), T});
        }
        if (necks.empty()) fail("classification-failed", "stopped without a neck or an extinction");
        double Tmin = necks.front().T;
        for (const auto& s : necks) Tmin = std::min(Tmin, s.T);
        for (const auto& s : necks)
            if (s.T <= Tmin + tol) rep.singularities.push_back(s);
        rep.T = Tmin;
    }
    rep.count_ok = rep.initial_extrema == 0 || int(rep.singularities.size()) <= rep.initial_extrema;
    rep.final_state = std::move(g);
    return rep;
}

} // namespace cylflow
