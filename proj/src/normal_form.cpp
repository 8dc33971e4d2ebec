#include "cylflow/normal_form.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cylflow {

double cutoff(double radius, double R)
{
    if (radius <= R - 1.0) return 1.0;
    if (radius >= R) return 0.0;
    const double s = R - radius;
    return s * s * s * (10 - 15 * s + 6 * s * s);
}

double neutral_to_profile(int k) { return 1.0 / (4.0 * std::pow(2.0 * std::sqrt(M_PI), k - 1)); }

NeutralMatrix neutral_matrix(const GraphState& s)
{
    const Grid& g = s.grid();
    const double R = g.radius();
    if (R < 4.0) fail("domain-too-small", "neutral projections need a domain radius >= 4");
    const int k = g.dim;
    std::vector<double> v(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double a = g.coord(0, int(q % g.n[0]));
        const double b = k == 2 ? g.coord(1, int(q / g.n[0])) : 0.0;
        v[q] = cutoff(std::hypot(a, b), R) * (s.r.v[q] - s.spec.rho);
    }
    NeutralMatrix nm;
    nm.t = s.t;
    nm.M = Eigen::MatrixXd::Zero(k, k);
    const double a = std::sqrt(2.0) * c0();
    std::vector<double> basis(g.size());
    for (int i = 0; i < k; ++i) {
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double y = i == 0 ? g.coord(0, int(q % g.n[0])) : g.coord(1, int(q / g.n[0]));
            basis[q] = hermite_eval(2, y);
        }
        nm.M(i, i) = a * grid_weighted_sum(g, v, basis);
    }
    if (k == 2) {
        for (std::size_t q = 0; q < g.size(); ++q)
            basis[q] = hermite_eval(1, g.coord(0, int(q % g.n[0]))) * hermite_eval(1, g.coord(1, int(q / g.n[0])));
        nm.M(0, 1) = nm.M(1, 0) = grid_weighted_sum(g, v, basis);
    }
    return nm;
}

Eigen::MatrixXd riccati_closed_form(const Eigen::MatrixXd& M0, double t0, double t, double gamma)
{
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M0.rows(), M0.cols());
    return M0 * (I + gamma * (t - t0) * M0).inverse();
}

NeutralMatrix riccati_flow(const NeutralMatrix& M0, double t1, double gamma)
{
    const double t0 = M0.t;
    if (!(t1 > t0) || !(t0 > 0)) fail("invalid-argument", "riccati_flow needs t1 > t0 > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M0.M + M0.M.transpose()));
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        if (l < 0 && gamma * (t1 - t0) * (-l) >= 1.0)
            fail("finite-time-blowup", "eigenvalue " + std::to_string(l) + " reaches its pole at t=" +
                                           std::to_string(t0 - 1.0 / (gamma * l)));
    }
    auto f = [&](const Eigen::MatrixXd& M) -> Eigen::MatrixXd { return -gamma * M * M; };
    Eigen::MatrixXd M = M0.M;
    double t = t0;
    while (t < t1) {
        const double rate = gamma * M.norm();
        double h = 1e-3 * std::min(t1 - t0, rate > 0 ? 1.0 / rate : 1e300);
        h = std::max(h, 1e-12 * (t1 - t0));
        if (t + h > t1) h = t1 - t;
        const Eigen::MatrixXd k1 = f(M);
        const Eigen::MatrixXd k2 = f(M + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = f(M + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = f(M + h * k3);
        M += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
        if (!M.allFinite()) fail("finite-time-blowup", "integration diverged");
    }
    NeutralMatrix out;
    out.M = 0.5 * (M + M.transpose());
    out.t = t1;
    return out;
}

const char* to_string(EigenLabel l)
{
    switch (l) {
    case EigenLabel::InverseT: return "1/(gamma t)";
    case EigenLabel::Zero: return "0";
    default: return "other";
    }
}

EigenTrack eigen_track(const std::vector<NeutralMatrix>& traj, double gamma)
{
    if (traj.size() < 10) fail("insufficient-span", "need at least 10 samples");
    const double span = traj.back().t / traj.front().t;
    if (!(span >= 4.0 - 1e-12)) fail("insufficient-span", "time span factor must be >= 4");
    const int k = int(traj.front().M.rows());
    EigenTrack tr;
    tr.lambda.assign(k, {});
    Eigen::MatrixXd prevV;
    for (const auto& s : traj) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s.M + s.M.transpose()));
        Eigen::VectorXd lam = es.eigenvalues();
        Eigen::MatrixXd V = es.eigenvectors();
        if (prevV.size()) {
            // permutation maximizing the total overlap with the previous eigenvectors
            std::vector<int> perm(k), best(k);
            std::iota(perm.begin(), perm.end(), 0);
            double bestScore = -1;
            do {
                double sc = 0;
                for (int i = 0; i < k; ++i) sc += std::abs(prevV.col(i).dot(V.col(perm[i])));
                if (sc > bestScore) {
                    bestScore = sc;
                    best = perm;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            Eigen::MatrixXd V2(k, k);
            Eigen::VectorXd l2(k);
            for (int i = 0; i < k; ++i) {
                V2.col(i) = V.col(best[i]);
                if (V2.col(i).dot(prevV.col(i)) < 0) V2.col(i) *= -1;
                l2(i) = lam(best[i]);
            }
            V = V2;
            lam = l2;
        }
        prevV = V;
        tr.t.push_back(s.t);
        for (int i = 0; i < k; ++i) tr.lambda[i].push_back(lam(i));
    }
    const std::size_t n = tr.t.size(), start = n / 2;
    for (int i = 0; i < k; ++i) {
        double mean = 0;
        for (std::size_t j = start; j < n; ++j) mean += gamma * tr.t[j] * tr.lambda[i][j];
        mean /= double(n - start);
        const double target = std::abs(mean - 1.0) < 0.25 ? 1.0 : (std::abs(mean) < 0.25 ? 0.0 : mean);
        double rms = 0;
        for (std::size_t j = start; j < n; ++j) rms += std::pow(gamma * tr.t[j] * tr.lambda[i][j] - target, 2);
        rms = std::sqrt(rms / double(n - start));
        tr.residual.push_back(rms);
        if (target == 1.0)
            tr.labels.push_back(EigenLabel::InverseT);
        else if (target == 0.0)
            tr.labels.push_back(EigenLabel::Zero);
        else
            tr.labels.push_back(EigenLabel::Other);
    }
    return tr;
}

Classification classify(const std::vector<NeutralMatrix>& traj, const ShrinkerSpec& spec, double t_lo, double t_hi)
{
    if (!(t_hi >= 4.0 * t_lo) || t_lo <= 0) fail("window-too-short", "need t_hi >= 4 t_lo");
    std::vector<const NeutralMatrix*> win;
    for (const auto& s : traj)
        if (s.t >= t_lo - 1e-9 && s.t <= t_hi + 1e-9) win.push_back(&s);
    if (win.size() < 2 || win.front()->t > t_lo + 0.25 * (t_hi - t_lo) || win.back()->t < t_hi - 0.25 * (t_hi - t_lo))
        fail("window-too-short", "trajectory does not cover the classification window");
    const int k = int(win.front()->M.rows());
    Classification c;
    c.t_lo = t_lo;
    c.t_hi = t_hi;
    Eigen::MatrixXd O = Eigen::MatrixXd::Identity(k, k);
    if (k == 2) {
        // rotation diagonalizing the late-time matrix, chosen closest to the identity
        const Eigen::MatrixXd& M = win.back()->M;
        const double diff = M(0, 0) - M(1, 1);
        double th = diff != 0.0 ? 0.5 * std::atan(2 * M(0, 1) / diff) : (M(0, 1) != 0.0 ? std::copysign(M_PI / 4, M(0, 1)) : 0.0);
        c.angle = th;
        O << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    }
    const double conv = neutral_to_profile(k);
    c.b.assign(k, 0.0);
    std::vector<std::vector<double>> ta(k);
    for (const auto* s : win) {
        const Eigen::MatrixXd D = O.transpose() * s->M * O;
        for (int i = 0; i < k; ++i) ta[i].push_back(s->t * conv * D(i, i));
    }
    const double rho = spec.rho;
    bool incon = false, all = true;
    for (int i = 0; i < k; ++i) {
        const double mean = std::accumulate(ta[i].begin(), ta[i].end(), 0.0) / double(ta[i].size());
        double rms = 0;
        for (double x : ta[i]) rms += (x - mean) * (x - mean);
        c.residuals.push_back(std::sqrt(rms / double(ta[i].size())));
        c.b[i] = mean;
        if (mean >= rho / 8.0)
            c.I.push_back(i + 1);
        else
            all = false;
        if (mean >= rho / 16.0 && mean < rho / 8.0) incon = true;
    }
    c.verdict = incon ? "inconclusive" : (all ? "nondegenerate" : "degenerate");
    return c;
}

Classification classify(const std::vector<GraphState>& traj, double t_lo, double t_hi)
{
    if (traj.empty()) fail("window-too-short", "empty trajectory");
    std::vector<NeutralMatrix> nm;
    for (const auto& s : traj) nm.push_back(neutral_matrix(s));
    return classify(nm, traj.front().spec, t_lo, t_hi);
}

namespace {

struct ProfileParts {
    double S = 0.0;    // sum (y_i^2 - 2)
    double Y2 = 0.0;   // sum y_i^2
};

ProfileParts parts(const std::vector<int>& I, const double* y)
{
    ProfileParts p;
    for (int i : I) {
        const double v = y[i - 1];
        p.S += v * v - 2.0;
        p.Y2 += v * v;
    }
    return p;
}

double root_arg(const ProfileParts& p, double t)
{
    const double q = 1.0 + p.S / (2.0 * t);
    if (!(q > 0.0)) fail("profile-domain", "square-root argument is not positive");
    return q;
}

} // namespace

double c1_profile(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    const ProfileParts p = parts(I, y);
    return spec.rho * std::sqrt(root_arg(p, t)) - spec.rho;
}

double profile_residual(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    const ProfileParts p = parts(I, y);
    const double Q = root_arg(p, t);
    const double rho = spec.rho, sq = std::sqrt(Q);
    const double F = rho * sq;
    const double ft = -rho * p.S / (4 * t * t * sq);
    double lap = 0, drift = 0;
    for (int i : I) {
        const double v = y[i - 1];
        lap += rho / (2 * t * sq) - rho * v * v / (4 * t * t * Q * sq);
        drift += v * rho * v / (2 * t * sq);
    }
    const double Lf = lap - 0.5 * drift + 0.5 * F - rho * rho / (2 * F);
    return ft - Lf;
}

double neck_residual_model(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    const ProfileParts p = parts(I, y);
    const double nk = spec.sphere_dim(), r2 = spec.rho * spec.rho;
    return -nk * nk * p.Y2 / (t * t * std::pow(r2 + r2 / (2 * t) * p.S, 1.5));
}

double neck_residual_closed_form(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    const ProfileParts p = parts(I, y);
    const double r2 = spec.rho * spec.rho;
    const double Q = r2 * root_arg(p, t);
    return -r2 * p.S / (4 * t * t * std::sqrt(Q)) + r2 * r2 * p.Y2 / (4 * t * t * Q * std::sqrt(Q));
}

double profile_h2_gap_model(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    const ProfileParts p = parts(I, y);
    const double d = std::sqrt(root_arg(p, t)) + 1.0;
    return spec.rho / (8 * t * t) * p.S * p.S / (d * d);
}

double profile_h2_gap_closed_form(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t)
{
    return -profile_h2_gap_model(spec, I, y, t);
}

double remainder_model(double w0, double t0, double t)
{
    // RK4 on w' = -2w/t in log time
    const int steps = 2000;
    const double h = (std::log(t) - std::log(t0)) / steps;
    double w = w0;
    for (int i = 0; i < steps; ++i) {
        auto f = [](double x) { return -2.0 * x; };   // dw/dlog t
        const double k1 = f(w), k2 = f(w + 0.5 * h * k1), k3 = f(w + 0.5 * h * k2), k4 = f(w + h * k3);
        w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return w;
}

RemainderReport remainder_decay(const std::vector<GraphState>& traj, const Classification& cls, double ball)
{
    RemainderReport rep;
    const double ca = std::cos(cls.angle), sa = std::sin(cls.angle);
    for (const auto& s : traj) {
        const Grid& g = s.grid();
        const double rho = s.spec.rho;
        Field w(g);
        for (std::size_t q = 0; q < g.size(); ++q) {
            double y[2] = {g.coord(0, int(q % g.n[0])), g.dim == 2 ? g.coord(1, int(q / g.n[0])) : 0.0};
            double z[2] = {ca * y[0] + sa * y[1], -sa * y[0] + ca * y[1]};   // O^T y
            if (g.dim == 1) z[0] = y[0];
            double model = 0;
            for (int i : cls.I) model += rho / (4 * s.t) * (z[i - 1] * z[i - 1] - 2);
            w.v[q] = s.r.v[q] - rho - model;
        }
        const Derivatives d = derivatives(w);
        double acc = 0;
        const double cell = g.dim == 2 ? g.h(0) * g.h(1) : g.h(0);
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double a = g.coord(0, int(q % g.n[0])), b = g.dim == 2 ? g.coord(1, int(q / g.n[0])) : 0.0;
            const double rr = a * a + b * b;
            if (rr > ball * ball) continue;
            double gr = d.d1[0][q] * d.d1[0][q];
            if (g.dim == 2) gr += d.d1[1][q] * d.d1[1][q];
            acc += (w.v[q] * w.v[q] + gr) * std::exp(-0.25 * rr);
        }
        const double nrm = std::sqrt(acc * cell);
        rep.t.push_back(s.t);
        rep.scaled.push_back(s.t * s.t * nrm);
        rep.sup = std::max(rep.sup, s.t * s.t * nrm);
    }
    if (!rep.t.empty()) {
        const double t0 = rep.t.front(), w0 = rep.scaled.front() / (t0 * t0);
        for (double t : rep.t) rep.model.push_back(t * t * remainder_model(w0, t0, t));
    }
    return rep;
}

} // namespace cylflow
