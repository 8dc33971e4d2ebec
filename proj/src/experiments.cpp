#include "cylflow/experiments.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"

#include <algorithm>
#include <cmath>

namespace cylflow {

RunResult run_checkpointed(const RunConfig& cfg, const std::function<double(const double*)>& radius,
                           bool keep_states, double keep_from)
{
    const int k = cfg.spec.k;
    SolverConfig sc = cfg.solver;
    double R = cfg.half_width;
    if (R > 0) {
        sc.expand = false;
    } else {
        R = std::max(4.5, sc.K * std::sqrt(cfg.t0));
        sc.expand = true;
    }
    GraphState s = make_state(cfg.spec, make_grid(k, cfg.nodes, R), radius, cfg.t0);
    FlowRunner run(sc);
    RunResult res;
    res.t_reached = cfg.t0;
    for (double T = std::floor(cfg.t0) + 1; T <= cfg.t_end + 1e-9; T += 1.0) {
        Checkpoint cp;
        try {
            if (!run.advance_to(s, T)) {
                res.pinched = true;
                break;
            }
            if (cfg.parity) symmetrize_even(s.r);
            if (cfg.center) {
                CenteringResult c = centering(s);
                s = std::move(c.state);
                run.reset_history();
                cp.transform = c.T;
                cp.unstable_before = c.before;
                cp.unstable_after = c.after;
                res.dT += 2.0 * (1.0 / c.T.lambda - 1.0) * std::exp(-s.t);
                for (int a = 0; a < k; ++a) res.dx[a] -= c.T.d[a] * std::exp(-0.5 * s.t);
                res.transform_size += c.T.size();
            }
            cp.t = s.t;
            cp.nm = neutral_matrix(s);
            cp.modes = measure_modes(s);
            Field u(s.grid());
            for (std::size_t q = 0; q < u.v.size(); ++q) u.v[q] = s.r.v[q] - cfg.spec.rho;
            cp.cone = cone_ratios(u);
        } catch (const Error& e) {
            res.failure = e.name();
            break;
        }
        res.t_reached = s.t;
        res.checkpoints.push_back(cp);
        if (keep_states && s.t >= keep_from - 1e-9) res.states.push_back(s);
    }
    return res;
}

RunConfig neckpinch_config(int n, int k, double t0, double t_end)
{
    RunConfig c;
    c.spec = make_shrinker(n, k);
    c.t0 = t0;
    c.t_end = t_end;
    if (k == 1) {
        c.nodes = 512;
        c.solver.K = 2.0;
        c.solver.integrator = Integrator::RK4;
    } else {
        c.nodes = 256;
        c.half_width = 16.0;
        c.solver.integrator = Integrator::IMEX;
        c.solver.imex_dt = 0.1;
    }
    return c;
}

namespace {

std::vector<NeutralMatrix> matrices(const RunResult& r)
{
    std::vector<NeutralMatrix> out;
    for (const auto& c : r.checkpoints) out.push_back(c.nm);
    return out;
}

std::vector<int> all_axes(int k)
{
    std::vector<int> I;
    for (int i = 1; i <= k; ++i) I.push_back(i);
    return I;
}

} // namespace

namespace {

double genericity_t_end(const GenericityConfig& cfg, const ShrinkerSpec& spec)
{
    const double horizon = 8.0 * spec.rho / (4.0 * std::max(std::abs(cfg.eps), 1e-3));
    return cfg.t_end > 0 ? cfg.t_end : std::ceil(cfg.t0 + horizon);
}

RunConfig genericity_run_config(const GenericityConfig& cfg)
{
    RunConfig rc;
    rc.spec = make_shrinker(cfg.n, 2);
    rc.t0 = cfg.t0;
    rc.t_end = genericity_t_end(cfg, rc.spec);
    rc.nodes = cfg.nodes;
    rc.half_width = cfg.half_width;
    rc.solver.integrator = Integrator::IMEX;
    rc.solver.imex_dt = cfg.dt;
    rc.solver.imex_theta = cfg.theta;
    rc.parity = true;
    return rc;
}

} // namespace

RunResult genericity_base(const GenericityConfig& cfg)
{
    const RunConfig rc = genericity_run_config(cfg);
    const ShrinkerSpec spec = rc.spec;
    return run_checkpointed(rc, [&](const double* y) { return spec.rho + c1_profile(spec, {2}, y, cfg.t0); });
}

GenericityReport genericity_experiment(const GenericityConfig& cfg, const RunResult* base_in)
{
    const RunConfig rc = genericity_run_config(cfg);
    const ShrinkerSpec spec = rc.spec;
    GenericityReport rep;
    rep.t_end = rc.t_end;
    auto base_r = [&](const double* y) { return spec.rho + c1_profile(spec, {2}, y, cfg.t0); };
    RunResult own;
    if (!base_in) {
        own = genericity_base(cfg);
        base_in = &own;
    }
    const RunResult& base = *base_in;
    if (!base.failure.empty() || base.pinched)
        fail("base-run-failed", "degenerate base run stopped at t=" + std::to_string(base.t_reached) +
                                    (base.failure.empty() ? " (pinch)" : " (" + base.failure + ")"));
    const double lo = rep.t_end / 4, hi = rep.t_end;
    rep.base = classify(matrices(base), spec, lo, hi);
    if (rep.base.verdict != "degenerate" || rep.base.I != std::vector<int>{2})
        fail("base-not-degenerate", "base run must classify degenerate with I = {2}, got " + rep.base.verdict);

    if (cfg.eps == 0.0) {
        rep.perturbed = rep.base;
        rep.note = "eps = 0: perturbed run coincides with the base run";
        return rep;
    }

    const double c2 = hermite_coeff(2);
    try {
        perturb_ode({cfg.t0, cfg.eps / c2, 0.0, 0.0}, rep.t_end, spec, 100);
    } catch (const Error& e) {
        if (e.name() != "blowup") throw;
        rep.riccati_pole = true;
    }
    auto pert_r = [&](const double* y) { return base_r(y) + cfg.eps * (y[0] * y[0] - 2.0); };
    const RunResult pert = run_checkpointed(rc, pert_r);
    rep.transform_size = pert.transform_size;
    const std::size_t m = std::min(pert.checkpoints.size(), base.checkpoints.size());
    for (std::size_t i = 0; i < m; ++i) {
        rep.transforms.push_back(pert.checkpoints[i].transform);
        ModeTriple a = pert.checkpoints[i].modes;
        a.a2 -= base.checkpoints[i].modes.a2;
        a.a12 -= base.checkpoints[i].modes.a12;
        rep.measured.push_back(a);
    }
    if (rep.measured.size() >= 2) {
        try {
            rep.predicted = perturb_ode(rep.measured.front(), rep.measured.back().t, spec, int(rep.measured.size()) - 1);
        } catch (const Error& e) {
            if (e.name() != "blowup") throw;
            rep.riccati_pole = true;
        }
        for (std::size_t i = 0; i < rep.predicted.size() && i < rep.measured.size(); ++i)
            rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(rep.measured[i].a1 - rep.predicted[i].a1) /
                                                            std::abs(rep.predicted[i].a1));
    }
    if (pert.pinched || !pert.failure.empty() || pert.t_reached < hi - 1e-9) {
        rep.perturbed.verdict = rep.riccati_pole ? "riccati-pole" : "run-stopped";
        rep.note = "perturbed run stopped at t=" + std::to_string(pert.t_reached) +
                   (pert.failure.empty() ? " (pinch)" : " (" + pert.failure + ")");
        return rep;
    }
    rep.perturbed = classify(matrices(pert), spec, lo, hi);
    if (cfg.strict && rep.perturbed.verdict == "inconclusive")
        fail("classification-inconclusive", "perturbed run is inconclusive on [" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + "]");
    return rep;
}

namespace {

RunConfig stability_run_config(const StabilityConfig& cfg)
{
    RunConfig rc;
    rc.spec = make_shrinker(cfg.n, 2);
    rc.t0 = cfg.t0;
    rc.t_end = cfg.t_end;
    rc.nodes = cfg.nodes;
    rc.half_width = cfg.half_width;
    rc.solver.integrator = Integrator::IMEX;
    rc.solver.imex_dt = cfg.dt;
    return rc;
}

} // namespace

RunResult stability_base(const StabilityConfig& cfg)
{
    const RunConfig rc = stability_run_config(cfg);
    const ShrinkerSpec spec = rc.spec;
    return run_checkpointed(rc, [&](const double* y) { return spec.rho + c1_profile(spec, {1, 2}, y, cfg.t0); });
}

StabilityReport stability_experiment(const StabilityConfig& cfg, const RunResult* base_in)
{
    const RunConfig rc = stability_run_config(cfg);
    const ShrinkerSpec spec = rc.spec;
    RunResult own;
    if (!base_in) {
        own = stability_base(cfg);
        base_in = &own;
    }
    const RunResult& base = *base_in;
    if (!base.failure.empty() || base.pinched) fail("base-run-failed", "nondegenerate base run stopped early");
    const double lo = cfg.t_end / 4, hi = cfg.t_end;
    const Classification bc = classify(matrices(base), spec, lo, hi);
    if (bc.verdict != "nondegenerate") fail("base-not-nondegenerate", "base run classified " + bc.verdict);

    StabilityReport rep;
    rep.eps0 = cfg.eps0;
    rep.seed = cfg.seed;
    const Grid g = make_grid(2, cfg.nodes, cfg.half_width);
    const Field phi = random_perturbation(g, cfg.eps0, cfg.seed);
    {
        std::vector<double> cut(g.size());
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double y0 = g.coord(0, int(q % g.n[0])), y1 = g.coord(1, int(q / g.n[0]));
            cut[q] = cutoff(std::hypot(y0, y1), 8.0) * phi.v[q];
        }
        const double c2 = c2_size(phi);
        if (c2 > 0) rep.cutoff_ratio = std::sqrt(grid_weighted_sum(g, cut, cut)) / (std::exp(-16.0) * c2);
    }
    const RunResult pert = run_checkpointed(rc, [&](const double* y) {
        return spec.rho + c1_profile(spec, all_axes(2), y, cfg.t0) + interpolate(phi, y);
    });
    if (!pert.failure.empty() || pert.pinched || pert.t_reached < hi - 1e-9)
        fail("run-stopped", "perturbed run stopped at t=" + std::to_string(pert.t_reached) +
                                (pert.failure.empty() ? "" : " (" + pert.failure + ")"));
    rep.cls = classify(matrices(pert), spec, lo, hi);
    rep.checkpoints = pert.checkpoints;
    rep.transform_size = pert.transform_size;
    rep.dT = pert.dT - base.dT;
    rep.dx[0] = pert.dx[0] - base.dx[0];
    rep.dx[1] = pert.dx[1] - base.dx[1];
    rep.displacement = std::sqrt(rep.dT * rep.dT + rep.dx[0] * rep.dx[0] + rep.dx[1] * rep.dx[1]);
    if (cfg.strict && rep.cls.verdict == "inconclusive")
        fail("classification-inconclusive", "perturbed run is inconclusive");
    return rep;
}

} // namespace cylflow
