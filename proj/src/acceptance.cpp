#include "cylflow/acceptance.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace cylflow {

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // records one sub-check; the detail keeps every measured value, passing or not
    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [x]");
    }
};

std::string num(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// once ratio_0 >= 0.9 it must stay there
bool cone_persists(const std::vector<Checkpoint>& cps)
{
    bool entered = false;
    for (const auto& c : cps) {
        if (c.cone.ratio_0 >= 0.9) entered = true;
        else if (entered) return false;
    }
    return true;
}

void hermite(Outcome& o)
{
    double orth = 0;
    for (int m = 0; m <= 10; ++m)
        for (int n = 0; n <= 10; ++n) {
            const double v = weighted_inner([m](const double* y) { return hermite_eval(m, y[0]); },
                                            [n](const double* y) { return hermite_eval(n, y[0]); }, 1);
            orth = std::max(orth, std::abs(v - (m == n ? 1.0 : 0.0)));
        }
    o.check(orth <= 1e-10, "max |<h_m,h_n> - delta| = " + num(orth, 3));
    const double target = 2 * std::pow(M_PI, -0.25);
    const double tp = triple_product(2, 2, 2);
    const double quad = weighted_inner([](const double* y) { return std::pow(hermite_eval(2, y[0]), 2); },
                                       [](const double* y) { return hermite_eval(2, y[0]); }, 1);
    o.check(std::abs(tp - target) <= 1e-10 && std::abs(tp - quad) <= 1e-10 &&
                std::abs(8 * hermite_coeff(2) - target) <= 1e-10,
            "A_222 = " + num(tp, 12) + ", quadrature " + num(quad, 12));
}

void spectrum(Outcome& o)
{
    // Table 1 rows for every admissible (n, k)
    bool table = true;
    for (int n = 2; n <= 9; ++n)
        for (int k = 1; k < n; ++k) {
            const ShrinkerSpec s = make_shrinker(n, k);
            auto ev = [&](std::vector<int> m, int j) {
                ModeIndex mi;
                m.resize(k, 0);
                mi.m = m;
                mi.j = j;
                return mode_eigenvalue(s, mi);
            };
            double below = -1e300;
            for (int j = 0; j <= 3; ++j)
                for (const auto& m : multi_indices(k, 4)) {
                    ModeIndex mi;
                    mi.m = m;
                    mi.j = j;
                    const double l = mode_eigenvalue(s, mi);
                    if (l < -1e-12) below = std::max(below, l);
                }
            const double fourth = std::max(-1.0 / (n - k), -0.5);
            table = table && ev({0}, 0) == 1.0 && ev({1}, 0) == 0.5 && ev({0}, 1) == 0.5 && ev({2}, 0) == 0.0 &&
                    ev({1}, 1) == 0.0 && std::abs(below - fourth) < 1e-14;
        }
    o.check(table, "Table 1 rows for n <= 9");
    const auto g = eigenmode_growth(make_shrinker(2, 1), 6, 1e-4, 1.0, 1024, 12.0);
    std::string rates;
    bool ok = true;
    for (const auto& r : g) {
        const double tol = r.expected == 0.0 ? 0.01 : 0.01 * std::abs(r.expected);
        ok = ok && std::abs(r.measured - r.expected) <= tol;
        rates += (rates.empty() ? "" : " ") + num(r.measured, 5);
    }
    o.check(ok, "growth m=0..6: " + rates);
}

void solitons(Outcome& o)
{
    const SolitonReport s = soliton_regression(1024);
    o.check(std::abs(s.sphere_T / 0.25 - 1) <= 0.005, "sphere T = " + num(s.sphere_T, 8));
    o.check(std::abs(s.cylinder_T / 0.5 - 1) <= 0.005, "cylinder T = " + num(s.cylinder_T, 8));
    double worst = 0;
    for (double v : s.type_one) worst = std::max(worst, std::abs(v * std::sqrt(2.0) - 1));
    o.check(!s.type_one.empty() && worst <= 0.01,
            "type-I ratio within " + num(100 * worst, 3) + "% of 1/sqrt2 over " + std::to_string(s.type_one.size()) +
                " samples");
}

void normal_form(Outcome& o)
{
    const NeckpinchStudy st = neckpinch_study(512, 50, 200);
    const auto [lo, hi] = std::minmax_element(st.ta_ratio.begin(), st.ta_ratio.end());
    o.check(*lo >= 0.9 && *hi <= 1.1, "t a/(rho/4) in [" + num(*lo) + ", " + num(*hi) + "]");
    const double trend = loglog_slope(st.remainder.t, st.remainder.scaled);
    o.check(trend <= 0.1, "t^2 remainder " + num(st.remainder.scaled.front()) + " -> " +
                              num(st.remainder.scaled.back()) + ", log-log trend " + num(trend, 3));
}

void profile(Outcome& o)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> Y(-3, 3), T(10, 100);
    double e_res = 0, e_gap = 0, e_res_exact = 0, e_gap_exact = 0;
    for (int i = 0; i < 100; ++i) {
        const ShrinkerSpec spec = i % 2 ? make_shrinker(3, 2) : make_shrinker(2, 1);
        const std::vector<int> I = spec.k == 2 ? std::vector<int>{1, 2} : std::vector<int>{1};
        const double y[2] = {Y(rng), spec.k == 2 ? Y(rng) : 0.0};
        const double t = T(rng);
        const double res = profile_residual(spec, I, y, t);
        e_res = std::max(e_res, std::abs(res - neck_residual_model(spec, I, y, t)));
        e_res_exact = std::max(e_res_exact, std::abs(res - neck_residual_closed_form(spec, I, y, t)));
        double S = 0;
        for (int a : I) S += y[a - 1] * y[a - 1] - 2;
        const double gap = c1_profile(spec, I, y, t) - spec.rho / (4 * t) * S;
        e_gap = std::max(e_gap, std::abs(gap - profile_h2_gap_model(spec, I, y, t)));
        e_gap_exact = std::max(e_gap_exact, std::abs(gap - profile_h2_gap_closed_form(spec, I, y, t)));
    }
    o.check(e_res <= 1e-10, "displayed residual identity off by " + num(e_res, 3) + " (exact form " +
                                num(e_res_exact, 3) + ")");
    o.check(e_gap <= 1e-12, "displayed f - (rho/4t) S identity off by " + num(e_gap, 3) + " (exact form " +
                                num(e_gap_exact, 3) + ")");
}

void riccati(Outcome& o)
{
    const double gamma = neutral_gamma(make_shrinker(3, 2));
    Eigen::MatrixXd A(2, 2);
    A << 0.8, 0.3, 0.3, 0.5;
    NeutralMatrix M0{A, 1.0};
    const NeutralMatrix M1 = riccati_flow(M0, 100.0, gamma);
    const double err = (M1.M - riccati_closed_form(A, 1.0, 100.0, gamma)).cwiseAbs().maxCoeff();
    o.check(err <= 1e-9, "integrator vs closed form over t in [1, 100]: " + num(err, 3));

    const double c = std::cos(0.4), s = std::sin(0.4);
    Eigen::MatrixXd Q(2, 2);
    Q << c, -s, s, c;
    auto track = [&](double w1, double w2) {
        std::vector<NeutralMatrix> traj;
        for (int i = 0; i < 40; ++i) {
            const double t = 10.0 * std::pow(10.0, i / 39.0);
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
            D(0, 0) = w1 / (gamma * t) + 0.3 / (t * t);
            D(1, 1) = w2 / (gamma * t) - 0.2 / (t * t);
            traj.push_back({Q * D * Q.transpose(), t});
        }
        auto labels = eigen_track(traj, gamma).labels;
        std::sort(labels.begin(), labels.end());
        return labels;
    };
    using L = EigenLabel;
    const bool ok = track(1, 0) == std::vector<L>{L::InverseT, L::Zero} &&
                    track(1, 1) == std::vector<L>{L::InverseT, L::InverseT} &&
                    track(0, 0) == std::vector<L>{L::Zero, L::Zero};
    o.check(ok, "eigen_track labels on {1/(gt),0}, {1/(gt),1/(gt)}, {0,0} mixtures");
}

void semigroup(Outcome& o)
{
    double eig = 0;
    for (double tau : {0.5, 1.0, 2.0})
        for (double e : eigenrelation_errors(6, tau)) eig = std::max(eig, e);
    o.check(eig <= 1e-6, "S(tau) h_m eigen-relation error " + num(eig, 3));

    const Callable psi = [](const double* y) { return std::exp(-y[0] * y[0] / 8) * std::cos(y[0]); };
    const Callable Sb = apply_semigroup(psi, 0.7, 1);
    double sg = 0;
    for (double y = -3; y <= 3 + 1e-12; y += 0.5) {
        const double p[1] = {y};
        sg = std::max(sg, std::abs(apply_semigroup_at(Sb, 0.3, 1, p) - apply_semigroup_at(psi, 1.0, 1, p)));
    }
    o.check(sg <= 1e-8, "S(0.3) S(0.7) - S(1) = " + num(sg, 3));

    const auto base = velazquez_sweep({0.5, 1, 2, 4});
    const auto wide = velazquez_sweep({0.25, 0.5, 1, 2, 4, 8});
    o.check(std::isfinite(wide.max_ratio) && wide.max_ratio <= 1.1 * base.max_ratio,
            "Velazquez ratio sup " + num(base.max_ratio) + " (tau <= 4), " + num(wide.max_ratio) + " (tau <= 8)");
}

void regularization(Outcome& o)
{
    const double C0 = 1.0;
    const auto r = regularization_scaling(C0, {20, 40, 80});
    std::string other;
    for (double c : {0.5, 2.0})
        other += ", C0=" + num(c, 2) + ": " + num(regularization_scaling(c, {20, 40, 80}).exponent, 3);
    o.check(std::abs(r.exponent - (-2 + C0)) <= 0.3,
            "exponent " + num(r.exponent, 3) + " vs " + num(-2 + C0, 3) + " at C0=1 (info" + other + ")");
}

void cones(Outcome& o)
{
    const auto sm = step_map_series({1e-3, 2e-3, 4e-3, 8e-3});
    o.check(std::abs(sm.slope - 1) <= 0.1, "step-map ratio log-log slope " + num(sm.slope, 3));
    const NeckpinchStudy np = neckpinch_study(512, 50, 200);
    const RunResult base = stability_base(StabilityConfig{});
    o.check(cone_persists(np.run.checkpoints) && cone_persists(base.checkpoints),
            "cone persistence on k=1 neckpinch and k=2 nondegenerate runs");
}

void genericity(Outcome& o)
{
    GenericityConfig g;
    g.strict = false;
    const RunResult base = genericity_base(g);
    const auto r1 = genericity_experiment(g, &base);
    o.check(r1.perturbed.verdict == "nondegenerate" && r1.perturbed.I == std::vector<int>{1, 2},
            "eps=1e-3: " + r1.perturbed.verdict + " by t=" + num(r1.t_end));
    GenericityConfig g0 = g;
    g0.eps = 0.0;
    const auto r0 = genericity_experiment(g0, &base);
    o.check(r0.perturbed.verdict == "degenerate", "eps=0: " + r0.perturbed.verdict);
}

void stability(Outcome& o)
{
    StabilityConfig s;
    s.strict = false;
    const RunResult base = stability_base(s);
    int nd = 0;
    std::vector<double> eps = {1e-4, 2e-4, 4e-4}, disp;
    for (unsigned long long seed = 1; seed <= 5; ++seed) {
        s.seed = seed;
        const auto r = stability_experiment(s, &base);
        nd += r.cls.verdict == "nondegenerate";
        if (seed == 1) disp.push_back(r.displacement);
    }
    o.check(nd == 5, std::to_string(nd) + "/5 seeds nondegenerate");
    s.seed = 1;
    for (double e : {2e-4, 4e-4}) {
        s.eps0 = e;
        disp.push_back(stability_experiment(s, &base).displacement);
    }
    const double sl = loglog_slope(eps, disp);
    o.check(std::abs(sl - 1) <= 0.3, "displacement slope " + num(sl, 3));
}

void aag(Outcome& o)
{
    const auto fam = aag_family(20, 1);
    int ok = 0;
    for (const auto& f : fam) ok += f.extrema == 0 || f.singularities <= f.extrema;
    o.check(ok == 20, std::to_string(ok) + "/20 profiles with count <= strict extrema");
    const auto r = evolve_aag(dumbbell_graph(512));
    o.check(r.singularities.front().kind == "neck",
            "dumbbell first singularity " + r.singularities.front().kind + " at x=" + num(r.singularities.front().x));
}

void marriage_ring(Outcome& o)
{
    const RingStudy st = marriage_ring_study();
    o.check(st.uniform.spread < 0.01, "unsqueezed spread " + num(st.uniform.spread, 3));
    const double adv = (st.T_else - st.T_bump) / st.T_else;
    o.check(st.first_inside && adv >= 0.05,
            std::string("squeezed first pinch ") + (st.first_inside ? "inside" : "outside") + " the bump, T advantage " +
                num(100 * adv, 3) + "%");
}

void arrival_time(Outcome& o)
{
    const ArrivalStudy st = arrival_study(1024);
    o.check(st.sphere_err <= 0.01 && st.cylinder_err <= 0.01,
            "closed-form error sphere " + num(st.sphere_err, 3) + ", cylinder " + num(st.cylinder_err, 3));
    bool sph = true;
    for (const auto& L : st.sphere_probe.lines) sph = sph && L.complete && L.stabilizing;
    o.check(sph, "sphere second differences stabilize");
    bool bounded = true;
    for (const auto& L : st.neck_probe.lines) bounded = bounded && L.complete && L.bounded;
    const auto& radial = st.neck_probe.lines.front();
    o.check(bounded && !radial.stabilizing,
            "neck radial quotients " + num(radial.quotients.front()) + " -> " + num(radial.quotients.back()) +
                (radial.stabilizing ? " stabilizing" : " non-stabilizing") + (bounded ? ", bounded" : ", unbounded"));
}

struct Entry {
    void (*fn)(Outcome&);
    double budget;
};

const std::map<std::string, Entry>& registry()
{
    static const std::map<std::string, Entry> r = {
        {"hermite", {hermite, 1}},          {"spectrum", {spectrum, 10}},
        {"solitons", {solitons, 30}},       {"normal_form", {normal_form, 300}},
        {"profile", {profile, 1}},          {"riccati", {riccati, 1}},
        {"semigroup", {semigroup, 30}},     {"regularization", {regularization, 120}},
        {"cones", {cones, 120}},            {"genericity", {genericity, 600}},
        {"stability", {stability, 600}},    {"aag", {aag, 300}},
        {"marriage_ring", {marriage_ring, 300}}, {"arrival_time", {arrival_time, 300}}};
    return r;
}

} // namespace

const std::vector<std::string>& criterion_names()
{
    static const std::vector<std::string> names = {"hermite",   "spectrum",       "solitons", "normal_form",
                                                   "profile",   "riccati",        "semigroup", "regularization",
                                                   "cones",     "genericity",     "stability", "aag",
                                                   "marriage_ring", "arrival_time"};
    return names;
}

std::vector<std::string> select_criteria(const std::vector<std::string>& only, std::vector<std::string>& unknown)
{
    const auto& all = criterion_names();
    if (only.empty()) return all;
    static const std::map<std::string, std::vector<std::string>> groups = {
        {"all", all},
        {"spectral", {"hermite", "spectrum"}},
        {"normalform", {"normal_form", "profile", "riccati"}},
        {"linear", {"semigroup", "regularization"}},
        {"dynamics", {"cones", "genericity", "stability"}},
        {"rotational", {"solitons", "aag", "marriage_ring", "arrival_time"}}};
    std::vector<bool> on(all.size(), false);
    for (std::string name : only) {
        std::replace(name.begin(), name.end(), '-', '_');
        std::vector<std::string> hit;
        if (auto g = groups.find(name); g != groups.end()) hit = g->second;
        else if (std::find(all.begin(), all.end(), name) != all.end()) hit = {name};
        else if (!name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) {
            const int i = std::stoi(name);
            if (i >= 1 && i <= int(all.size())) hit = {all[i - 1]};
        }
        if (hit.empty()) unknown.push_back(name);
        for (const auto& h : hit) on[std::find(all.begin(), all.end(), h) - all.begin()] = true;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (on[i]) out.push_back(all[i]);
    return out;
}

CriterionResult run_criterion(const std::string& name)
{
    CriterionResult r;
    r.name = name;
    const auto& all = criterion_names();
    r.id = int(std::find(all.begin(), all.end(), name) - all.begin()) + 1;
    const auto it = registry().find(name);
    if (it == registry().end()) {
        r.detail = "skipped-unknown";
        return r;
    }
    r.budget = it->second.budget;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        it->second.fn(o);
    } catch (const std::exception& e) {
        o.check(false, std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(r.seconds <= r.budget, "runtime " + num(r.seconds, 3) + "s of " + num(r.budget, 4) + "s");
    r.pass = o.pass;
    r.detail = o.detail.str();
    return r;
}

std::string format_result(const CriterionResult& r)
{
    char head[64];
    std::snprintf(head, sizeof head, "%-4s %2d %-15s ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    return head + r.detail;
}

int run_acceptance(const std::vector<std::string>& only, std::ostream& out)
{
    std::vector<std::string> unknown;
    const auto sel = select_criteria(only, unknown);
    for (const auto& u : unknown) out << "SKIP    " << u << " skipped-unknown\n";
    int failed = 0;
    for (const auto& name : sel) {
        const CriterionResult r = run_criterion(name);
        out << format_result(r) << std::endl;
        failed += !r.pass;
    }
    return failed;
}

} // namespace cylflow
