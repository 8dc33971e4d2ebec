#include "cylflow/rmcf.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cylflow {

std::vector<double> GraphState::u() const
{
    std::vector<double> out(r.v);
    for (double& x : out) x -= spec.rho;
    return out;
}

GraphState make_state(const ShrinkerSpec& spec, const Grid& grid, const std::function<double(const double*)>& radius,
                      double t, Frame frame)
{
    if (grid.dim != spec.k) fail("grid-mismatch", "grid dimension must equal k");
    GraphState s;
    s.spec = spec;
    s.r = Field::sample(grid, radius);
    s.t = t;
    s.frame = frame;
    return s;
}

namespace {

double node_coord(const Grid& g, std::size_t p, int axis)
{
    return axis == 0 ? g.coord(0, int(p % g.n[0])) : g.coord(1, int(p / g.n[0]));
}

} // namespace

std::vector<double> rmcf_rhs(const GraphState& s)
{
    const Grid& g = s.grid();
    const std::vector<double>& r = s.r.v;
    for (double x : r) {
        if (std::isnan(x)) fail("NaN-detected", "radius field contains NaN");
        if (x <= 0.0) fail("nonpositive-radius", "radius must stay positive");
    }
    const Derivatives d = derivatives(g, r);
    const double nk = s.spec.sphere_dim();
    const bool rescaled = s.frame == Frame::RMCF;
    std::vector<double> out(g.size());
    if (g.dim == 1) {
        for (int i = 0; i < g.n[0]; ++i) {
            const double p = d.d1[0][i];
            double v = d.d2[0][i] / (1.0 + p * p) - nk / r[i];
            if (rescaled) v += 0.5 * (r[i] - g.coord(0, i) * p);
            out[i] = v;
        }
    } else {
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double p1 = d.d1[0][q], p2 = d.d1[1][q];
            const double gg = 1.0 + p1 * p1 + p2 * p2;
            double v = (1.0 - p1 * p1 / gg) * d.d2[0][q] + (1.0 - p2 * p2 / gg) * d.d2[1][q] -
                       2.0 * p1 * p2 * d.d12[q] / gg - nk / r[q];
            if (rescaled) v += 0.5 * (r[q] - node_coord(g, q, 0) * p1 - node_coord(g, q, 1) * p2);
            out[q] = v;
        }
    }
    for (double x : out)
        if (std::isnan(x)) fail("NaN-detected", "right-hand side contains NaN");
    return out;
}

double quadratic_residual_check(const ShrinkerSpec& spec, double eps, const Field& direction)
{
    if (eps == 0.0) return 0.0;
    GraphState s;
    s.spec = spec;
    s.r = direction;
    for (double& x : s.r.v) x = spec.rho + eps * x;
    const std::vector<double> rhs = rmcf_rhs(s);
    const Field Ld = apply_L(direction);
    const Grid& g = direction.grid;
    double worst = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        const int i0 = int(q % g.n[0]), i1 = int(q / g.n[0]);
        if (i0 < 2 || i0 >= g.n[0] - 2) continue;
        if (g.dim == 2 && (i1 < 2 || i1 >= g.n[1] - 2)) continue;
        const double d = direction.v[q];
        worst = std::max(worst, std::abs(rhs[q] - eps * Ld.v[q] + eps * eps * d * d / (2.0 * spec.rho)));
    }
    return worst;
}

double stable_dt(const GraphState& s, const SolverConfig& cfg)
{
    const Grid& g = s.grid();
    double h = g.h(0);
    if (g.dim == 2) h = std::min(h, g.h(1));
    double dt = cfg.c_cfl * h * h;
    if (s.frame == Frame::RMCF) {
        double ymax = 0.0;
        for (int a = 0; a < g.dim; ++a) ymax = std::max({ymax, std::abs(g.lo[a]), std::abs(g.hi[a])});
        if (ymax > 0) dt = std::min(dt, cfg.c_adv * h / (0.5 * ymax));
    }
    const double rmin = *std::min_element(s.r.v.begin(), s.r.v.end());
    dt = std::min(dt, cfg.c_react * rmin * rmin / s.spec.sphere_dim());
    return dt;
}

namespace {

// Quadratic extrapolation of node b (0 = edge) from its three inward neighbours, applied
// from the innermost layer outwards.
void sponge_line(double* f, std::ptrdiff_t s, int n, int layers, const double* target_lo, const double* target_hi,
                 bool sponge)
{
    static const double w[3] = {1.0, 2.0 / 3.0, 1.0 / 3.0};
    for (int b = layers - 1; b >= 0; --b) {
        const double wb = sponge ? w[b] : 1.0;
        double tl = target_lo ? target_lo[b] : 3 * f[(b + 1) * s] - 3 * f[(b + 2) * s] + f[(b + 3) * s];
        f[b * s] = (1 - wb) * f[b * s] + wb * tl;
        const int e = n - 1 - b;
        double th = target_hi ? target_hi[b] : 3 * f[(e - 1) * s] - 3 * f[(e - 2) * s] + f[(e - 3) * s];
        f[e * s] = (1 - wb) * f[e * s] + wb * th;
    }
}

} // namespace

void apply_boundary(const SolverConfig& cfg, Field& r, double t, int layers, bool sponge)
{
    const Grid& g = r.grid;
    const bool prof = cfg.boundary == BoundaryMode::Profile;
    if (prof && !cfg.profile) fail("invalid-argument", "profile boundary requested without a profile");
    double lo[3], hi[3];
    double y[2];
    const int lines0 = g.dim == 2 ? g.n[1] : 1;
    for (int j = 0; j < lines0; ++j) {
        if (prof) {
            y[1] = g.dim == 2 ? g.coord(1, j) : 0.0;
            for (int b = 0; b < layers; ++b) {
                y[0] = g.coord(0, b);
                lo[b] = cfg.profile(y, t);
                y[0] = g.coord(0, g.n[0] - 1 - b);
                hi[b] = cfg.profile(y, t);
            }
        }
        sponge_line(&r.v[g.index(0, j)], 1, g.n[0], layers, prof ? lo : nullptr, prof ? hi : nullptr, sponge);
    }
    if (g.dim == 2) {
        for (int i = 0; i < g.n[0]; ++i) {
            if (prof) {
                y[0] = g.coord(0, i);
                for (int b = 0; b < layers; ++b) {
                    y[1] = g.coord(1, b);
                    lo[b] = cfg.profile(y, t);
                    y[1] = g.coord(1, g.n[1] - 1 - b);
                    hi[b] = cfg.profile(y, t);
                }
            }
            sponge_line(&r.v[i], g.n[0], g.n[1], layers, prof ? lo : nullptr, prof ? hi : nullptr, sponge);
        }
    }
}

namespace {

GraphState rk4(const GraphState& s, const SolverConfig& cfg, double dt)
{
    const std::size_t N = s.r.v.size();
    GraphState tmp = s;
    const std::vector<double> k1 = rmcf_rhs(s);
    for (std::size_t q = 0; q < N; ++q) tmp.r.v[q] = s.r.v[q] + 0.5 * dt * k1[q];
    tmp.t = s.t + 0.5 * dt;
    const std::vector<double> k2 = rmcf_rhs(tmp);
    for (std::size_t q = 0; q < N; ++q) tmp.r.v[q] = s.r.v[q] + 0.5 * dt * k2[q];
    const std::vector<double> k3 = rmcf_rhs(tmp);
    for (std::size_t q = 0; q < N; ++q) tmp.r.v[q] = s.r.v[q] + dt * k3[q];
    tmp.t = s.t + dt;
    const std::vector<double> k4 = rmcf_rhs(tmp);
    GraphState out = s;
    for (std::size_t q = 0; q < N; ++q) out.r.v[q] = s.r.v[q] + dt / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
    out.t = s.t + dt;
    apply_boundary(cfg, out.r, out.t, 3, true);
    return out;
}

double min_radius(const GraphState& s, std::size_t* where = nullptr)
{
    const auto it = std::min_element(s.r.v.begin(), s.r.v.end());
    if (where) *where = std::size_t(it - s.r.v.begin());
    return *it;
}

} // namespace

GraphState step(const GraphState& s, const SolverConfig& cfg, double dt)
{
    double h = s.grid().h(0);
    if (s.grid().dim == 2) h = std::min(h, s.grid().h(1));
    if (dt <= 0.0 || dt > cfg.c_cfl * h * h * (1.0 + 1e-12))
        fail("CFL-violation", "dt=" + std::to_string(dt) + " exceeds c_cfl*h^2=" + std::to_string(cfg.c_cfl * h * h));
    GraphState out = rk4(s, cfg, dt);
    if (min_radius(out) < cfg.stop_radius(s.spec)) fail("pinch-detected", "min r below r_min_stop");
    return out;
}

GraphState expand_domain(const GraphState& s, const SolverConfig& cfg, std::optional<double> radius)
{
    const Grid& g = s.grid();
    const Derivatives d = derivatives(s.r);
    double gb = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        const int i0 = int(q % g.n[0]), i1 = int(q / g.n[0]);
        bool edge = i0 == 0 || i0 == g.n[0] - 1;
        if (g.dim == 2) edge = edge || i1 == 0 || i1 == g.n[1] - 1;
        if (!edge) continue;
        double p2 = d.d1[0][q] * d.d1[0][q];
        if (g.dim == 2) p2 += d.d1[1][q] * d.d1[1][q];
        gb = std::max(gb, std::sqrt(p2));
    }
    if (gb >= cfg.eps0)
        fail("boundary-not-graphical", "boundary gradient " + std::to_string(gb) + " >= eps0");
    const double R = radius ? *radius : cfg.K * std::sqrt(std::max(s.t, 0.0));
    Grid ng = g;
    for (int a = 0; a < g.dim; ++a) {
        ng.lo[a] = -R;
        ng.hi[a] = R;
    }
    GraphState out = s;
    const bool prof = cfg.boundary == BoundaryMode::Profile && cfg.profile;
    // outside the old box: profile if given, else continue linearly with the edge slope
    Field slope[2] = {Field(g), Field(g)};
    for (int a = 0; a < g.dim; ++a) slope[a].v = d.d1[a];
    out.r = Field::sample(ng, [&](const double* y) {
        bool inside = true;
        for (int a = 0; a < g.dim; ++a) inside = inside && y[a] >= g.lo[a] && y[a] <= g.hi[a];
        if (inside) return interpolate(s.r, y);
        if (prof) return cfg.profile(y, s.t);
        double yc[2] = {0.0, 0.0};
        for (int a = 0; a < g.dim; ++a) yc[a] = std::clamp(y[a], g.lo[a], g.hi[a]);
        double v = interpolate(s.r, yc);
        for (int a = 0; a < g.dim; ++a) v += interpolate(slope[a], yc) * (y[a] - yc[a]);
        return v;
    });
    return out;
}

GraphState to_mcf(const GraphState& s, const SpacetimePoint& c)
{
    if (s.frame != Frame::RMCF) fail("frame-mismatch", "to_mcf expects an RMCF state");
    const double sc = std::exp(-0.5 * s.t);
    GraphState out = s;
    for (int a = 0; a < s.grid().dim; ++a) {
        out.r.grid.lo[a] = c.x[a] + sc * s.grid().lo[a];
        out.r.grid.hi[a] = c.x[a] + sc * s.grid().hi[a];
    }
    for (double& x : out.r.v) x *= sc;
    out.t = c.T - std::exp(-s.t);
    out.frame = Frame::MCF;
    return out;
}

GraphState to_rmcf(const GraphState& s, const SpacetimePoint& c)
{
    if (s.frame != Frame::MCF) fail("frame-mismatch", "to_rmcf expects an MCF state");
    const Grid& g = s.grid();
    for (int a = 0; a < g.dim; ++a)
        if (c.x[a] < g.lo[a] || c.x[a] > g.hi[a]) fail("center-outside-domain", "centre lies outside the grid");
    if (!(c.T > s.t)) fail("center-outside-domain", "centre time must lie after the state time");
    const double t = -std::log(c.T - s.t);
    const double sc = std::exp(0.5 * t);
    GraphState out = s;
    for (int a = 0; a < g.dim; ++a) {
        out.r.grid.lo[a] = sc * (g.lo[a] - c.x[a]);
        out.r.grid.hi[a] = sc * (g.hi[a] - c.x[a]);
    }
    for (double& x : out.r.v) x *= sc;
    out.t = t;
    out.frame = Frame::RMCF;
    return out;
}

namespace {

std::vector<double> c2_proxy(const GraphState& s)
{
    const Grid& g = s.grid();
    const Derivatives d = derivatives(s.r);
    std::vector<double> q(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double u = s.r.v[p] - s.spec.rho;
        if (g.dim == 1) {
            q[p] = std::abs(u) + std::abs(d.d1[0][p]) + std::abs(d.d2[0][p]);
        } else {
            const double grad = std::hypot(d.d1[0][p], d.d1[1][p]);
            const double hess = std::sqrt(d.d2[0][p] * d.d2[0][p] + d.d2[1][p] * d.d2[1][p] + 2 * d.d12[p] * d.d12[p]);
            q[p] = std::abs(u) + grad + hess;
        }
    }
    return q;
}

double node_norm(const Grid& g, std::size_t p)
{
    const double a = node_coord(g, p, 0);
    const double b = g.dim == 2 ? node_coord(g, p, 1) : 0.0;
    return std::hypot(a, b);
}

} // namespace

double graphical_radius(const GraphState& s, double eps0)
{
    const Grid& g = s.grid();
    const std::vector<double> q = c2_proxy(s);
    double R = g.radius();
    for (std::size_t p = 0; p < g.size(); ++p)
        if (q[p] > eps0) R = std::min(R, node_norm(g, p));
    return std::max(R, 0.0);
}

CurvatureField curvatures(const GraphState& s)
{
    const Grid& g = s.grid();
    const Derivatives d = derivatives(s.r);
    const double nk = s.spec.sphere_dim();
    CurvatureField c;
    c.H.resize(g.size());
    c.A.resize(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double r = s.r.v[p];
        if (g.dim == 1) {
            const double q = d.d1[0][p];
            const double gg = 1 + q * q;
            const double rot = 1.0 / (r * std::sqrt(gg));
            const double kap = -d.d2[0][p] / (gg * std::sqrt(gg));
            c.H[p] = nk * rot + kap;
            c.A[p] = std::sqrt(nk * rot * rot + kap * kap);
        } else {
            const double p1 = d.d1[0][p], p2 = d.d1[1][p];
            const double gg = 1 + p1 * p1 + p2 * p2;
            const double W = std::sqrt(gg);
            const double rot = 1.0 / (r * W);
            const double a11 = -d.d2[0][p] / W, a22 = -d.d2[1][p] / W, a12 = -d.d12[p] / W;
            // S = G^{-1} A with G^{-1} = I - p p^T / g
            const double i11 = 1 - p1 * p1 / gg, i22 = 1 - p2 * p2 / gg, i12 = -p1 * p2 / gg;
            const double s11 = i11 * a11 + i12 * a12, s12 = i11 * a12 + i12 * a22;
            const double s21 = i12 * a11 + i22 * a12, s22 = i12 * a12 + i22 * a22;
            const double tr = s11 + s22;
            const double tr2 = s11 * s11 + 2 * s12 * s21 + s22 * s22;
            c.H[p] = nk * rot + tr;
            c.A[p] = std::sqrt(nk * rot * rot + tr2);
        }
    }
    return c;
}

FlowDiagnostics curvature_diagnostics(const GraphState& s, std::optional<double> blowup_time, bool want_type_one,
                                      double eps0)
{
    const Grid& g = s.grid();
    FlowDiagnostics f;
    f.t = s.t;
    const CurvatureField c = curvatures(s);
    f.minH = *std::min_element(c.H.begin(), c.H.end());
    f.maxA = *std::max_element(c.A.begin(), c.A.end());
    f.minr = *std::min_element(s.r.v.begin(), s.r.v.end());
    const std::vector<double> u = s.u();
    f.l2 = std::sqrt(grid_weighted_sum(g, u, u));
    f.grad_radius = graphical_radius(s, eps0);
    const Derivatives d = derivatives(s.r);
    // C0 / C1 over the graphical ball (at least the node nearest the centre)
    double best = 1e300;
    std::size_t centre = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double rr = node_norm(g, p);
        double grad = std::abs(d.d1[0][p]);
        if (g.dim == 2) grad = std::hypot(d.d1[0][p], d.d1[1][p]);
        if (rr < best) {
            best = rr;
            centre = p;
        }
        if (rr <= f.grad_radius) {
            f.c0 = std::max(f.c0, std::abs(u[p]));
            f.c1 = std::max(f.c1, std::abs(u[p]) + grad);
        }
    }
    if (f.c1 == 0.0) {
        f.c0 = std::abs(u[centre]);
        f.c1 = f.c0 + std::abs(d.d1[0][centre]);
    }
    if (want_type_one) {
        if (!blowup_time) fail("blowup-time-not-set", "type-I ratio needs an estimated blow-up time");
        if (s.frame == Frame::MCF) {
            f.typeI = *blowup_time > s.t ? f.maxA * std::sqrt(*blowup_time - s.t) : std::nan("");
        } else {
            const double tau = -std::exp(-s.t);
            f.typeI = *blowup_time > tau ? std::exp(0.5 * s.t) * f.maxA * std::sqrt(*blowup_time - tau) : std::nan("");
        }
    }
    return f;
}

SingularityReport detect_singularity(const std::vector<PinchSample>& tr, bool pinched, int window)
{
    if (!pinched || tr.size() < 3) fail("no-pinch-observed", "the run ended without a pinch event");
    const int m = std::min<int>(window, int(tr.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = int(tr.size()) - m; i < int(tr.size()); ++i) {
        const double x = tr[i].tau, y = tr[i].min_r * tr[i].min_r;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = m * sxx - sx * sx;
    const double a = (m * sxy - sx * sy) / den;
    const double b = (sy - a * sx) / m;
    if (!(a < 0)) fail("no-pinch-observed", "min r^2 is not decreasing");
    SingularityReport rep;
    rep.T_hat = -b / a;
    rep.fit_slope = a;
    rep.x[0] = tr.back().x[0];
    rep.x[1] = tr.back().x[1];
    return rep;
}

DecayFit l2_decay_probe(const std::vector<std::pair<double, double>>& series)
{
    if (series.size() < 10) fail("insufficient-data", "need at least 10 snapshots");
    const int n = int(series.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> X(n), Y(n);
    for (int i = 0; i < n; ++i) {
        X[i] = std::log(series[i].first);
        Y[i] = std::log(series[i].second);
        sx += X[i];
        sy += Y[i];
        sxx += X[i] * X[i];
        sxy += X[i] * Y[i];
    }
    const double den = n * sxx - sx * sx;
    DecayFit f;
    f.samples = n;
    f.slope = (n * sxy - sx * sy) / den;
    const double b = (sy - f.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) ss += std::pow(Y[i] - b - f.slope * X[i], 2);
    const double se = std::sqrt(ss / std::max(1, n - 2) / (sxx - sx * sx / n));
    f.band = 2.0 * se;
    return f;
}

AreaResult f_functional(const GraphState& s, double tol)
{
    const Grid& g = s.grid();
    const Derivatives d = derivatives(s.r);
    const int nk = s.spec.sphere_dim();
    std::vector<double> integrand(g.size()), one(g.size(), 1.0);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double r = s.r.v[p];
        double q2 = d.d1[0][p] * d.d1[0][p];
        if (g.dim == 2) q2 += d.d1[1][p] * d.d1[1][p];
        integrand[p] = std::pow(r, nk) * std::sqrt(1 + q2) * std::exp(-0.25 * r * r);
    }
    AreaResult res;
    const double pref = std::pow(4 * M_PI, -0.5 * s.spec.n) * unit_sphere_area(nk);
    res.value = pref * grid_weighted_sum(g, integrand, one);
    // tail beyond the box: edge integrand times the Gaussian tail mass per unit edge length
    double edge = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double rr = node_norm(g, p);
        if (rr >= g.radius() - 1e-12) edge = std::max(edge, integrand[p] * std::exp(-0.25 * rr * rr));
    }
    const double R = g.radius();
    res.tail_estimate = pref * edge * (2.0 / std::max(R, 1e-12)) * std::pow(2 * std::sqrt(M_PI), g.dim - 1) * 2 * g.dim;
    res.tail_warning = res.tail_estimate > tol;
    return res;
}

bool FlowRunner::advance_to(GraphState& s, double t_target)
{
    const double stop = cfg_.stop_radius(s.spec);
    while (s.t < t_target - 1e-12) {
        if (cfg_.expand && s.frame == Frame::RMCF && cfg_.K * std::sqrt(s.t) > s.grid().radius() * cfg_.expand_ratio) {
            s = expand_domain(s, cfg_);
            reset_history();
        }
        double dt;
        if (cfg_.integrator == Integrator::IMEX && s.frame == Frame::RMCF) {
            dt = cfg_.imex_dt;
            const double rmin = *std::min_element(s.r.v.begin(), s.r.v.end());
            dt = std::min(dt, cfg_.c_react * rmin * rmin / s.spec.sphere_dim());
        } else {
            dt = stable_dt(s, cfg_);
        }
        if (t_target - s.t < dt * (1 + 1e-9)) dt = t_target - s.t;
        else if (t_target - s.t < 2 * dt) dt = 0.5 * (t_target - s.t);
        if (cfg_.integrator == Integrator::IMEX && s.frame == Frame::RMCF) {
            imex_step(s, dt);
        } else {
            s = rk4(s, cfg_, dt);
        }
        ++steps_;
        std::size_t where = 0;
        const double mr = min_radius(s, &where);
        PinchSample ps;
        ps.tau = s.t;
        ps.min_r = mr;
        ps.x[0] = node_coord(s.grid(), where, 0);
        if (s.grid().dim == 2) ps.x[1] = node_coord(s.grid(), where, 1);
        trace_.push_back(ps);
        if (trace_.size() > 4096) trace_.erase(trace_.begin(), trace_.begin() + 2048);
        if (mr < stop) return false;
    }
    return true;
}

} // namespace cylflow
