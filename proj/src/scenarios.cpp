#include "cylflow/scenarios.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/output.hpp"
#include "cylflow/studies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cylflow {

namespace {

using nlohmann::json;

struct Checked {};

struct Ctx {
    const ExperimentConfig& cfg;
    std::string dir;
    std::ostream& log;
    ScenarioResult res;
    std::unique_ptr<OutputWriter> out;
    bool check_only = false;

    // call once every field has been read
    void start()
    {
        cfg.check_unused();
        if (check_only) throw Checked{};
        out = std::make_unique<OutputWriter>(dir, cfg.hash_hex(), cfg.seed(), cfg.scenario());
    }
    void keep(const std::string& path) { res.files.push_back(path); }
};

int positive_int(const ExperimentConfig& c, const std::string& key, long long fallback, long long lo = 1)
{
    const long long v = c.get_int(key, fallback);
    if (v < lo) c.field_error(key, "must be >= " + std::to_string(lo));
    return int(v);
}

double positive(const ExperimentConfig& c, const std::string& key, double fallback)
{
    const double v = c.get_double(key, fallback);
    if (!(v > 0)) c.field_error(key, "must be positive");
    return v;
}

ShrinkerSpec read_shrinker(const ExperimentConfig& c, int n0, int k0)
{
    const int n = positive_int(c, "shrinker.n", n0);
    const int k = positive_int(c, "shrinker.k", k0);
    if (k >= n) c.field_error("shrinker.k", "need 1 <= k < n");
    if (k > 2) c.field_error("shrinker.k", "desk-scale runs support k <= 2");
    return make_shrinker(n, k);
}

json classification_json(const Classification& c)
{
    return {{"verdict", c.verdict}, {"I", c.I}, {"b", c.b}, {"t_lo", c.t_lo}, {"t_hi", c.t_hi},
            {"angle", c.angle}, {"residuals", c.residuals}};
}

json transform_json(const ConformalTransform& T)
{
    return {{"lambda", T.lambda}, {"d", {T.d[0], T.d[1]}}, {"angle", T.angle}, {"size", T.size()}};
}

std::vector<NeutralMatrix> matrices(const RunResult& r)
{
    std::vector<NeutralMatrix> m;
    for (const auto& c : r.checkpoints) m.push_back(c.nm);
    return m;
}

// ---- scenarios --------------------------------------------------------------

void spectrum(Ctx& x)
{
    const auto& c = x.cfg;
    const ShrinkerSpec spec = read_shrinker(c, 2, 1);
    const int degree = positive_int(c, "spectrum.max_degree", 4, 0);
    const int max_j = positive_int(c, "spectrum.max_j", 2, 0);
    const bool growth = c.get_bool("spectrum.growth", true);
    const int nodes = positive_int(c, "grid.nodes", 1024, 16);
    const double K = positive(c, "grid.K", 12.0);
    const double amp = positive(c, "growth.amplitude", 1e-4);
    const double span = positive(c, "time.span", 1.0);
    x.start();

    std::vector<std::vector<double>> rows;
    std::vector<std::string> cols;
    for (int a = 1; a <= spec.k; ++a) cols.push_back("m" + std::to_string(a));
    cols.insert(cols.end(), {"j", "lambda"});
    json table = json::array();
    x.log << "eigenvalues of L on the cylinder (n=" << spec.n << ", k=" << spec.k << ")\n";
    for (int j = 0; j <= max_j; ++j)
        for (const auto& m : multi_indices(spec.k, degree)) {
            ModeIndex mi;
            mi.m = m;
            mi.j = j;
            const double l = mode_eigenvalue(spec, mi);
            std::vector<double> row(m.begin(), m.end());
            row.push_back(j);
            row.push_back(l);
            rows.push_back(row);
            table.push_back({{"m", m}, {"j", j}, {"lambda", l}});
            std::ostringstream label;
            for (std::size_t a = 0; a < m.size(); ++a) label << (a ? "," : "") << m[a];
            x.log << "  m=(" << label.str() << ") j=" << j << "  lambda=" << format_number(l) << "\n";
        }
    x.keep(x.out->csv("eigenvalues.csv", cols, rows));
    json rep = {{"n", spec.n}, {"k", spec.k}, {"rho", spec.rho}, {"eigenvalues", table}};

    if (growth) {
        const auto g = eigenmode_growth(spec, degree, amp, span, nodes, K);
        std::vector<std::vector<double>> grows;
        std::vector<double> mx, my;
        json gj = json::array();
        for (const auto& r : g) {
            grows.push_back({double(r.m), r.expected, r.measured});
            mx.push_back(r.m);
            my.push_back(r.measured);
            gj.push_back({{"m", r.m}, {"expected", r.expected}, {"measured", r.measured}});
            x.log << "  growth m=" << r.m << " measured " << format_number(r.measured) << " expected "
                  << format_number(r.expected) << "\n";
        }
        x.keep(x.out->csv("growth.csv", {"m", "expected", "measured"}, grows));
        x.keep(x.out->dat("growth.dat", mx, my));
        rep["growth"] = gj;
    }
    x.keep(x.out->json("report.json", rep));
    x.res.summary = "spectrum: " + std::to_string(rows.size()) + " eigenvalues";
}

void flow(Ctx& x)
{
    const auto& c = x.cfg;
    const ShrinkerSpec spec = read_shrinker(c, 2, 1);
    const std::string family = c.get_string("initial.family", "neckpinch");
    const double t0 = positive(c, "time.t0", 10.0);
    const double t_end = positive(c, "time.t_end", spec.k == 1 ? 200.0 : 80.0);
    RunConfig rc = neckpinch_config(spec.n, spec.k, t0, t_end);
    rc.nodes = positive_int(c, "grid.nodes", rc.nodes, 16);
    if (spec.k == 1)
        rc.solver.K = positive(c, "grid.K", rc.solver.K);
    else
        rc.half_width = positive(c, "grid.K", rc.half_width);
    const double t_lo = c.get_double("classify.t_lo", t_end / 4);
    if (!(t_end > t0 + 1)) c.field_error("time.t_end", "must exceed time.t0 + 1");
    std::vector<int> I;
    if (family == "neckpinch") {
        for (int a = 1; a <= spec.k; ++a) I.push_back(a);
    } else if (family == "degenerate" && spec.k == 2) {
        I = {2};
        rc.parity = true;
    } else {
        c.field_error("initial.family", "unknown family '" + family + "' for k=" + std::to_string(spec.k));
    }
    x.start();

    const RunResult run =
        run_checkpointed(rc, [&](const double* y) { return spec.rho + c1_profile(spec, I, y, t0); });
    if (!run.failure.empty()) fail(run.failure, "run stopped at t=" + std::to_string(run.t_reached));

    std::vector<std::string> cols = {"t"};
    for (int a = 0; a < spec.k; ++a)
        for (int b = a; b < spec.k; ++b) cols.push_back("M" + std::to_string(a + 1) + std::to_string(b + 1));
    cols.insert(cols.end(), {"ratio_0", "unstable_before", "unstable_after"});
    std::vector<std::vector<double>> rows;
    std::vector<double> ts, ta;
    for (const auto& cp : run.checkpoints) {
        std::vector<double> r = {cp.t};
        for (int a = 0; a < spec.k; ++a)
            for (int b = a; b < spec.k; ++b) r.push_back(cp.nm.M(a, b));
        r.insert(r.end(), {cp.cone.ratio_0, cp.unstable_before, cp.unstable_after});
        rows.push_back(r);
        ts.push_back(cp.t);
        ta.push_back(cp.t * cp.nm.M(0, 0) * neutral_to_profile(spec.k) / (spec.rho / 4));
    }
    x.keep(x.out->csv("trajectory.csv", cols, rows));
    x.keep(x.out->dat("ta_ratio.dat", ts, ta));

    json rep = {{"n", spec.n}, {"k", spec.k}, {"family", family}, {"pinched", run.pinched},
                {"t_reached", run.t_reached}, {"transform_size", run.transform_size}};
    std::string verdict = "run-stopped";
    if (!run.pinched && run.t_reached >= t_end - 1e-9) {
        const Classification cls = classify(matrices(run), spec, t_lo, t_end);
        rep["classification"] = classification_json(cls);
        verdict = cls.verdict;
    }
    rep["verdict"] = verdict;
    x.keep(x.out->json("classification.json", rep));
    x.log << "flow: verdict " << verdict << "\n";
    x.res.summary = "flow: " + verdict;
    if (verdict == "inconclusive") x.res.exit_code = 2;
    if (verdict == "run-stopped") fail("run-stopped", "pinched at t=" + std::to_string(run.t_reached));
}

void normalform(Ctx& x)
{
    const auto& c = x.cfg;
    const int nodes = positive_int(c, "grid.nodes", 512, 16);
    const double t_lo = positive(c, "time.t_lo", 50.0);
    const double t_hi = positive(c, "time.t_hi", 200.0);
    if (!(t_hi > t_lo + 4)) c.field_error("time.t_hi", "must exceed time.t_lo + 4");
    x.start();

    const NeckpinchStudy st = neckpinch_study(nodes, t_lo, t_hi);
    x.keep(x.out->dat("ta_ratio.dat", st.t, st.ta_ratio));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < st.remainder.t.size(); ++i)
        rows.push_back({st.remainder.t[i], st.remainder.scaled[i], st.remainder.model[i]});
    x.keep(x.out->csv("remainder.csv", {"t", "t2_remainder", "model"}, rows));
    const auto [lo, hi] = std::minmax_element(st.ta_ratio.begin(), st.ta_ratio.end());
    json rep = {{"classification", classification_json(st.cls)},
                {"verdict", st.cls.verdict},
                {"ta_ratio_min", *lo},
                {"ta_ratio_max", *hi},
                {"remainder_sup", st.remainder.sup}};
    x.keep(x.out->json("report.json", rep));
    x.log << "normalform: verdict " << st.cls.verdict << ", t a/(rho/4) in [" << format_number(*lo) << ", "
          << format_number(*hi) << "]\n";
    x.res.summary = "normalform: " + st.cls.verdict;
    if (st.cls.verdict == "inconclusive") x.res.exit_code = 2;
}

void semigroup(Ctx& x)
{
    const auto& c = x.cfg;
    const double tau = positive(c, "semigroup.tau", 1.0);
    const int degree = positive_int(c, "semigroup.max_degree", 6, 0);
    const double r = positive(c, "velazquez.r", 2.0);
    const double r_tilde = positive(c, "velazquez.r_tilde", 1.0);
    const std::vector<double> taus = c.get_list("velazquez.tau", {0.25, 0.5, 1, 2, 4, 8});
    const double C0 = positive(c, "regularization.C0", 1.0);
    const std::vector<double> t0s = c.get_list("regularization.t0", {20, 40, 80});
    x.start();

    const auto err = eigenrelation_errors(degree, tau);
    std::vector<std::vector<double>> rows;
    for (int m = 0; m <= degree; ++m) rows.push_back({double(m), std::exp((1 - m / 2.0) * tau), err[m]});
    x.keep(x.out->csv("eigenrelation.csv", {"m", "factor", "max_error"}, rows));

    const auto vs = velazquez_sweep(taus, r, r_tilde);
    x.keep(x.out->dat("velazquez.dat", vs.tau, vs.ratio));

    const auto reg = regularization_scaling(C0, t0s);
    rows.clear();
    for (std::size_t i = 0; i < reg.t0.size(); ++i)
        rows.push_back({reg.t0[i], reg.s_prime[i], reg.amplification[i],
                        reg.amplification[i] / (reg.s_prime[i] * reg.s_prime[i])});
    x.keep(x.out->csv("regularization.csv", {"t0", "s_prime", "amplification", "scaled"}, rows));
    json rep = {{"tau", tau},
                {"eigenrelation_max_error", *std::max_element(err.begin(), err.end())},
                {"velazquez_max_ratio", vs.max_ratio},
                {"regularization", {{"C0", C0}, {"exponent", reg.exponent}, {"predicted", -2 + C0}}}};
    x.keep(x.out->json("report.json", rep));
    x.log << "semigroup: regularization exponent " << format_number(reg.exponent) << " (C0 = " << C0 << ")\n";
    x.res.summary = "semigroup: done";
}

void centering_scenario(Ctx& x)
{
    const auto& c = x.cfg;
    const ShrinkerSpec spec = read_shrinker(c, 2, 1);
    const double t0 = positive(c, "time.t0", 20.0);
    const int nodes = positive_int(c, "grid.nodes", spec.k == 1 ? 512 : 128, 16);
    const double K = positive(c, "grid.K", spec.k == 1 ? std::max(4.5, 2 * std::sqrt(t0)) : 16.0);
    const double shift = c.get_double("centering.shift", 0.05);
    const double lift = c.get_double("centering.const", 1e-3);
    x.start();

    std::vector<int> I;
    for (int a = 1; a <= spec.k; ++a) I.push_back(a);
    const GraphState s = make_state(spec, make_grid(spec.k, nodes, K), [&](const double* y) {
        double z[2] = {y[0] - shift, spec.k == 2 ? y[1] + shift : 0.0};
        return spec.rho + c1_profile(spec, I, z, t0) + lift;
    }, t0);
    const CenteringResult r = centering(s);
    const CenteringModes b = centering_modes(s), a = centering_modes(r.state);
    x.keep(x.out->csv("modes.csv", {"stage", "c", "B1", "B2", "A1", "A2", "size"},
                      {{0, b.c, b.B[0], b.B[1], b.A[0], b.A[1], b.size},
                       {1, a.c, a.B[0], a.B[1], a.A[0], a.A[1], a.size}}));
    json rep = {{"before", r.before}, {"after", r.after}, {"iterations", r.iterations},
                {"contraction", r.after > 0 ? r.before / r.after : 0.0}, {"transform", transform_json(r.T)}};
    x.keep(x.out->json("report.json", rep));
    x.log << "centering: " << format_number(r.before) << " -> " << format_number(r.after) << "\n";
    x.res.summary = "centering: done";
}

void genericity(Ctx& x)
{
    const auto& c = x.cfg;
    GenericityConfig g;
    g.n = positive_int(c, "shrinker.n", 3, 3);
    if (c.get_int("shrinker.k", 2) != 2) c.field_error("shrinker.k", "genericity needs k = 2");
    g.t0 = positive(c, "time.t0", g.t0);
    g.eps = c.get_double("genericity.eps", g.eps);
    g.t_end = c.get_double("time.t_end", 0.0);
    g.nodes = positive_int(c, "grid.nodes", g.nodes, 16);
    g.half_width = positive(c, "grid.K", g.half_width);
    g.dt = positive(c, "solver.dt", g.dt);
    g.theta = positive(c, "solver.theta", g.theta);
    g.strict = c.get_bool("classify.strict", true);
    x.start();

    const GenericityReport r = genericity_experiment(g);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.measured.size(); ++i) {
        const double pred = i < r.predicted.size() ? r.predicted[i].a1 : std::nan("");
        rows.push_back({r.measured[i].t, r.measured[i].a1, pred, r.measured[i].a2, r.measured[i].a12});
    }
    const std::string series = x.out->csv("modes.csv", {"t", "a1", "a1_predicted", "a2", "a12"}, rows);
    x.keep(series);
    rows.clear();
    json transforms = json::array();
    for (std::size_t i = 0; i < r.transforms.size(); ++i) {
        const auto& T = r.transforms[i];
        rows.push_back({r.measured[i].t, T.lambda, T.d[0], T.d[1], T.angle});
        transforms.push_back(transform_json(T));
    }
    x.keep(x.out->csv("transforms.csv", {"t", "lambda", "d1", "d2", "angle"}, rows));
    json rep = {{"verdict", r.perturbed.verdict},
                {"base", classification_json(r.base)},
                {"perturbed", classification_json(r.perturbed)},
                {"eps", g.eps},
                {"t_end", r.t_end},
                {"riccati_pole", r.riccati_pole},
                {"max_rel_dev", r.max_rel_dev},
                {"transform_size", r.transform_size},
                {"transforms", transforms},
                {"mode_series", "modes.csv"},
                {"seeds", {c.seed()}},
                {"note", r.note}};
    x.keep(x.out->json("report.json", rep));
    x.log << "genericity: base " << r.base.verdict << ", perturbed " << r.perturbed.verdict << "\n";
    x.res.summary = "genericity: " + r.perturbed.verdict;
    if (r.perturbed.verdict == "inconclusive") x.res.exit_code = 2;
}

void stability(Ctx& x)
{
    const auto& c = x.cfg;
    StabilityConfig s;
    s.n = positive_int(c, "shrinker.n", 3, 3);
    if (c.get_int("shrinker.k", 2) != 2) c.field_error("shrinker.k", "stability needs k = 2");
    s.t0 = positive(c, "time.t0", s.t0);
    s.t_end = positive(c, "time.t_end", s.t_end);
    s.nodes = positive_int(c, "grid.nodes", s.nodes, 16);
    s.half_width = positive(c, "grid.K", s.half_width);
    s.dt = positive(c, "solver.dt", s.dt);
    s.strict = c.get_bool("classify.strict", true);
    const std::vector<double> eps = c.get_list("stability.eps0", {1e-4});
    const int seeds = positive_int(c, "stability.seeds", 5);
    x.start();

    const RunResult base = stability_base(s);
    struct Job {
        double eps;
        unsigned long long seed;
    };
    std::vector<Job> jobs;
    for (double e : eps)
        for (int i = 0; i < seeds; ++i) jobs.push_back({e, c.seed() + i});
    std::vector<StabilityReport> reps(jobs.size());
    parallel_for(int(jobs.size()), [&](int i) {
        StabilityConfig sc = s;
        sc.eps0 = jobs[i].eps;
        sc.seed = jobs[i].seed;
        reps[i] = stability_experiment(sc, &base);
    });
    std::vector<std::vector<double>> rows;
    json runs = json::array();
    std::vector<unsigned long long> seed_list;
    bool all = true;
    for (const auto& r : reps) {
        const bool nd = r.cls.verdict == "nondegenerate";
        all = all && nd;
        rows.push_back({double(r.seed), r.eps0, nd ? 1.0 : 0.0, r.dT, r.dx[0], r.dx[1], r.displacement});
        runs.push_back({{"seed", r.seed}, {"eps0", r.eps0}, {"verdict", r.cls.verdict}, {"displacement", r.displacement},
                        {"cutoff_ratio", r.cutoff_ratio}});
        seed_list.push_back(r.seed);
    }
    x.keep(x.out->csv("runs.csv", {"seed", "eps0", "nondegenerate", "dT", "dx1", "dx2", "displacement"}, rows));
    json rep = {{"verdict", all ? "nondegenerate" : "mixed"}, {"runs", runs}, {"seeds", seed_list}};
    x.keep(x.out->json("report.json", rep));
    x.log << "stability: " << reps.size() << " runs, " << (all ? "all nondegenerate" : "not all nondegenerate") << "\n";
    x.res.summary = std::string("stability: ") + (all ? "nondegenerate" : "mixed");
}

void aag(Ctx& x)
{
    const auto& c = x.cfg;
    const int count = positive_int(c, "aag.count", 20);
    const int nodes = positive_int(c, "grid.nodes", 256, 16);
    const bool dumbbell = c.get_bool("aag.dumbbell", true);
    x.start();

    const auto fam = aag_family(count, c.seed(), nodes);
    std::vector<std::vector<double>> rows;
    bool ok = true;
    for (const auto& f : fam) {
        ok = ok && (f.extrema == 0 || f.singularities <= f.extrema);
        rows.push_back({double(f.seed), double(f.extrema), double(f.singularities), f.kind == "neck" ? 0.0 : 1.0, f.T});
    }
    x.keep(x.out->csv("family.csv", {"seed", "extrema", "singularities", "cap", "T"}, rows));
    json rep = {{"count", count}, {"count_bound_holds", ok}};
    if (dumbbell) {
        const RotationalGraph g = dumbbell_graph(512);
        const AagReport r = evolve_aag(g);
        std::vector<double> xs, us;
        for (int i = 0; i < g.size(); ++i) {
            xs.push_back(g.x(i));
            us.push_back(g.u(i));
        }
        x.keep(x.out->dat("dumbbell.dat", xs, us));
        const auto& s = r.singularities.front();
        rep["dumbbell"] = {{"kind", s.kind}, {"x", s.x}, {"T", s.T}, {"extrema", r.initial_extrema}};
        x.log << "aag: dumbbell first singularity " << s.kind << " at x=" << format_number(s.x) << "\n";
    }
    x.keep(x.out->json("report.json", rep));
    x.res.summary = std::string("aag: count bound ") + (ok ? "holds" : "violated");
}

void marriage_ring(Ctx& x)
{
    const auto& c = x.cfg;
    const double R = positive(c, "torus.R", 1.0);
    const double a = positive(c, "torus.a", 0.05);
    const int meridians = positive_int(c, "torus.meridians", 256, 8);
    const double eps = c.get_double("squeeze.eps", 0.05);
    const double p = c.get_double("squeeze.p", M_PI / 2);
    const double width = positive(c, "squeeze.width", 0.5);
    const bool curve = c.get_bool("curve.enabled", true);
    const std::string path = c.get_string("curve.path", "");
    x.start();

    const RingStudy st = marriage_ring_study(R, a, meridians, eps, p, width, curve && path.empty());
    const TorusRing ring = thin_torus(R, a, meridians);
    std::vector<std::vector<double>> rows;
    std::vector<double> phi;
    for (int i = 0; i < meridians; ++i) {
        phi.push_back(ring.phi(i));
        rows.push_back({ring.phi(i), st.uniform.T[i], st.squeezed.T[i]});
    }
    x.keep(x.out->csv("ring.csv", {"phi", "T_uniform", "T_squeezed"}, rows));
    x.keep(x.out->dat("squeezed_T.dat", phi, st.squeezed.T));
    json rep = {{"uniform", {{"T", st.uniform.T_first}, {"spread", st.uniform.spread}, {"tie", st.uniform.tie}}},
                {"squeezed",
                 {{"T_bump", st.T_bump},
                  {"T_else", st.T_else},
                  {"advantage", (st.T_else - st.T_bump) / st.T_else},
                  {"first_phi", ring.phi(st.squeezed.first)},
                  {"first_inside", st.first_inside}}}};
    if (curve && path.empty()) rep["curve_T"] = st.curve_T;
    if (!path.empty()) {
        const CurveReport cr = evolve_curve(read_profile_csv(path));
        rep["curve_T"] = cr.T;
        std::vector<double> cx, cr_;
        for (const auto& q : cr.final_curve.p) {
            cx.push_back(q[0]);
            cr_.push_back(q[1]);
        }
        x.keep(x.out->dat("final_curve.dat", cx, cr_));
    }
    x.keep(x.out->json("report.json", rep));
    x.log << "marriage-ring: squeezed torus pinches first at phi=" << format_number(ring.phi(st.squeezed.first))
          << (st.first_inside ? " (inside the bump)" : " (outside the bump)") << "\n";
    x.res.summary = "marriage-ring: done";
}

RotationalGraph arrival_profile(const ExperimentConfig& c, const std::string& family, int nodes)
{
    if (family == "sphere")
        return make_graph([](double s) { return std::sqrt(std::max(0.0, 1 - s * s)); }, -1, 1, nodes, 2, Ends::Caps);
    if (family == "cylinder") return make_graph([](double) { return 1.0; }, 0, 1, 64, 2, Ends::Periodic);
    if (family == "dumbbell") return mean_convex_dumbbell(nodes);
    if (family == "csv") {
        const ProfileCurve pc = read_profile_csv(c.require_string("profile.path"));
        auto pts = pc.p;
        if (pts.size() < 4) c.field_error("profile.path", "need at least 4 points");
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (!(pts[i][0] > pts[i - 1][0])) c.field_error("profile.path", "x must increase along the profile");
        const bool caps = pts.front()[1] <= 1e-12 && pts.back()[1] <= 1e-12;
        auto u = [pts](double s) {
            auto it = std::lower_bound(pts.begin(), pts.end(), s,
                                       [](const std::array<double, 2>& q, double v) { return q[0] < v; });
            if (it == pts.begin()) return pts.front()[1];
            if (it == pts.end()) return pts.back()[1];
            const auto& b = *it;
            const auto& a = *(it - 1);
            return a[1] + (b[1] - a[1]) * (s - a[0]) / (b[0] - a[0]);
        };
        return make_graph(u, pts.front()[0], pts.back()[0], nodes, 2, caps ? Ends::Caps : Ends::Neumann);
    }
    c.field_error("profile.family", "unknown family '" + family + "'");
}

void arrival(Ctx& x)
{
    const auto& c = x.cfg;
    const std::string family = c.get_string("profile.family", "dumbbell");
    const int nodes = positive_int(c, "grid.nodes", 1024, 16);
    AagConfig ac;
    ac.keep_snapshots = true;
    ac.stop_fraction = positive(c, "arrival.stop_fraction", 1e-5);
    const int nx = positive_int(c, "arrival.x_points", 61, 2);
    const int nr = positive_int(c, "arrival.r_points", 31, 2);
    const double h0 = positive(c, "probe.h0", 0.2);
    const int levels = positive_int(c, "probe.levels", 5, 3);
    const RotationalGraph g = arrival_profile(c, family, nodes);
    x.start();

    const AagReport run = evolve_aag(g, ac);
    double umax = 0;
    for (int i = 0; i < g.size(); ++i) umax = std::max(umax, g.u(i));
    std::vector<double> xs, rs;
    for (int i = 0; i < nx; ++i) xs.push_back(g.a + (g.b - g.a) * i / (nx - 1));
    for (int j = 0; j < nr; ++j) rs.push_back(umax * j / (nr - 1));
    const ArrivalTimeField f = arrival_time(run, xs, rs);
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < nx; ++i) rows.push_back({xs[i], rs[j], f.at(i, j)});
    x.keep(x.out->csv("arrival.csv", {"x", "r", "g"}, rows));

    const Singularity& s = run.singularities.front();
    const RegularityProbe pr = regularity_probe(run, s.x, h0, levels);
    rows.clear();
    json lines = json::array();
    for (const auto& L : pr.lines) {
        for (std::size_t q = 0; q < L.scales.size(); ++q) rows.push_back({L.angle, L.scales[q], L.quotients[q]});
        lines.push_back({{"angle", L.angle}, {"quotients", L.quotients}, {"complete", L.complete},
                         {"stabilizing", L.stabilizing}, {"bounded", L.bounded}});
    }
    x.keep(x.out->csv("probe.csv", {"angle", "h", "quotient"}, rows));
    json rep = {{"family", family},
                {"T", run.T},
                {"singularity", {{"kind", s.kind}, {"x", s.x}, {"T", s.T}}},
                {"always_mean_convex", run.always_mean_convex},
                {"snapshots", run.snapshots.size()},
                {"probe", lines}};
    x.keep(x.out->json("report.json", rep));
    x.log << "arrival-time: " << family << " first singularity " << s.kind << " at x=" << format_number(s.x)
          << ", T=" << format_number(run.T) << "\n";
    x.res.summary = "arrival-time: done";
}

} // namespace

ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                            bool check_only)
{
    const std::string from_cfg = cfg.get_string("output.dir", "out/" + cfg.scenario());
    Ctx x{cfg, out_dir.empty() ? from_cfg : out_dir, log, {}, nullptr, check_only};
    static const std::map<std::string, void (*)(Ctx&)> table = {
        {"spectrum", spectrum},     {"flow", flow},             {"normalform", normalform},
        {"semigroup", semigroup},   {"centering", centering_scenario}, {"genericity", genericity},
        {"stability", stability},   {"aag", aag},               {"marriage-ring", marriage_ring},
        {"arrival-time", arrival}};
    const auto it = table.find(cfg.scenario());
    if (it == table.end()) cfg.field_error("scenario", "unknown scenario '" + cfg.scenario() + "'");
    try {
        it->second(x);
    } catch (const Checked&) {
        x.res.summary = cfg.scenario() + ": config ok";
    }
    return x.res;
}

int run_scenario_cli(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err,
                     bool check_only)
{
    try {
        const ScenarioResult r = run_scenario(cfg, out_dir, out, check_only);
        if (check_only) out << r.summary << "\n";
        for (const auto& f : r.files) out << "wrote " << f << "\n";
        return r.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.name() == "classification-inconclusive" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace cylflow
