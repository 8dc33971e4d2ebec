#include "cylflow/error.hpp"
#include "cylflow/rotational.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cylflow {

namespace {

const double nan_v = std::numeric_limits<double>::quiet_NaN();

// w = u^2 of a snapshot at x, negative past a cap tip
double w_at(const RotationalGraph& s, double x)
{
    const int N = s.size();
    const double h = s.h();
    double q = (x - s.a) / h;
    const bool per = s.ends == Ends::Periodic;
    if (per) {
        q = std::fmod(q, double(N));
        if (q < 0) q += N;
    } else if (q < 0 || q > N - 1) {
        if (s.caps()) {
            // continue w linearly past the tip with the slope of the end fit
            const bool left = q < 0;
            const double w1 = left ? s.w[1] : s.w[N - 2], w2 = left ? s.w[2] : s.w[N - 3];
            const double slope = (4 * w1 - w2) / (2 * h);
            return -slope * (left ? -q : q - (N - 1)) * h;
        }
        q = std::clamp(q, 0.0, double(N - 1));
    }
    const int i0 = per ? int(std::floor(q)) - 1 : std::clamp(int(std::floor(q)) - 1, 0, N - 4);
    double r = 0.0;
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) l *= (q - (i0 + b)) / double(a - b);
        r += l * s.w[((i0 + a) % N + N) % N];
    }
    return r;
}

void require_mean_convex(const AagReport& run)
{
    if (run.snapshots.size() < 2) fail("missing-snapshots", "run the flow with keep_snapshots");
    if (!run.always_mean_convex) fail("not-mean-convex", "the flow was not mean-convex at every snapshot");
}

} // namespace

double arrival_at(const AagReport& run, double x, double r)
{
    require_mean_convex(run);
    const auto& S = run.snapshots;
    const double r2 = r * r;
    auto phi = [&](std::size_t j) { return w_at(S[j], x) - r2; };
    if (phi(0) <= 0.0) return nan_v;
    if (phi(S.size() - 1) > 0.0) return nan_v;
    std::size_t lo = 0, hi = S.size() - 1;   // phi(lo) > 0 >= phi(hi)
    while (hi - lo > 1) {
        const std::size_t m = (lo + hi) / 2;
        (phi(m) > 0.0 ? lo : hi) = m;
    }
    const double p0 = phi(lo), p1 = phi(hi);
    return S[lo].tau + (S[hi].tau - S[lo].tau) * p0 / (p0 - p1);
}

ArrivalTimeField arrival_time(const AagReport& run, const std::vector<double>& xs, const std::vector<double>& rs)
{
    require_mean_convex(run);
    ArrivalTimeField f;
    f.x = xs;
    f.r = rs;
    f.g.resize(xs.size() * rs.size());
    f.reached.resize(f.g.size());
    for (std::size_t j = 0; j < rs.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double g = arrival_at(run, xs[i], rs[j]);
            f.g[j * xs.size() + i] = g;
            f.reached[j * xs.size() + i] = std::isfinite(g);
        }
    return f;
}

RegularityProbe regularity_probe(const AagReport& run, double x0, double h0, int levels,
                                 const std::vector<double>& angles)
{
    require_mean_convex(run);
    if (levels < 3) fail("invalid-probe", "need at least 3 scales");
    RegularityProbe p;
    p.x0 = x0;
    p.T = run.T;
    for (double ang : angles) {
        ProbeLine L;
        L.angle = ang;
        const double c = std::cos(ang * M_PI / 180), s = std::sin(ang * M_PI / 180);
        for (int k = 0; k < levels; ++k) {
            const double h = h0 * std::ldexp(1.0, -k);
            // the far half-line is reflected through the axis
            const double gp = arrival_at(run, x0 + h * c, h * s);
            const double gm = arrival_at(run, x0 - h * c, h * s);
            L.scales.push_back(h);
            L.quotients.push_back((gp + gm - 2 * run.T) / (h * h));
            if (!std::isfinite(gp) || !std::isfinite(gm)) L.complete = false;
        }
        if (L.complete) {
            const auto& Q = L.quotients;
            const int m = levels;
            double qmax = 0.0;
            for (double q : Q) qmax = std::max(qmax, std::abs(q));
            const double lo = std::min({Q[m - 1], Q[m - 2], Q[m - 3]}), hi = std::max({Q[m - 1], Q[m - 2], Q[m - 3]});
            const double mean = (Q[m - 1] + Q[m - 2] + Q[m - 3]) / 3;
            L.stabilizing = hi - lo <= 0.01 * std::max(std::abs(mean), 1e-12);
            L.bounded = qmax <= 10.0 * std::max(std::abs(Q[0]), 1.0);
        }
        p.lines.push_back(std::move(L));
    }
    return p;
}

ProfileCurve read_profile_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail("io-error", "cannot open " + path);
    ProfileCurve c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, r;
        if (!(ss >> x >> r)) {
            if (lineno == 1) continue;   // header
            fail("parse-error", path + ":" + std::to_string(lineno) + ": expected x,r");
        }
        c.p.push_back({x, r});
    }
    if (c.p.size() < 4) fail("parse-error", path + ": need at least 4 points");
    const auto& f = c.p.front();
    const auto& l = c.p.back();
    c.closed = f[0] == l[0] && f[1] == l[1];
    if (c.closed) c.p.pop_back();
    return c;
}

void write_arrival_csv(const std::string& path, const ArrivalTimeField& f)
{
    std::ofstream out(path);
    if (!out) fail("io-error", "cannot write " + path);
    out << "x,r,g\n" << std::setprecision(17);
    for (std::size_t j = 0; j < f.r.size(); ++j)
        for (std::size_t i = 0; i < f.x.size(); ++i) {
            out << f.x[i] << ',' << f.r[j] << ',';
            const double g = f.at(int(i), int(j));
            if (std::isfinite(g))
                out << g;
            else
                out << "nan";
            out << '\n';
        }
}

} // namespace cylflow
