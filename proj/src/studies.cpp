#include "cylflow/studies.hpp"

#include "cylflow/error.hpp"
#include "cylflow/hermite.hpp"
#include "cylflow/mode_dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace cylflow {

int lab_threads()
{
    if (const char* env = std::getenv("LAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& body)
{
    const int workers = std::min(lab_threads(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Field deviation(const GraphState& s)
{
    Field u = s.r;
    for (double& v : u.v) v -= s.spec.rho;
    return u;
}

} // namespace

std::vector<GrowthRate> eigenmode_growth(const ShrinkerSpec& spec, int max_degree, double amplitude, double t1,
                                         int nodes, double half_width)
{
    // the axis grid is one-dimensional whatever k is: h_m(y_1) only excites the y_1 direction
    ShrinkerSpec s1 = make_shrinker(spec.n - spec.k + 1, 1);
    const Grid g = make_grid(1, nodes, half_width);
    std::vector<GrowthRate> out(max_degree + 1);
    parallel_for(max_degree + 1, [&](int m) {
        GraphState st = make_state(s1, g, [&](const double* y) {
            return s1.rho + amplitude * hermite_eval(m, y[0]) * cutoff(std::abs(y[0]), 8.0);
        }, 1.0);
        ModeIndex mi;
        mi.m = {m};
        const double p0 = project_mode(deviation(st), mi, s1);
        FlowRunner run(SolverConfig{});
        if (!run.advance_to(st, 1.0 + t1)) fail("nonpositive-radius", "growth run pinched");
        const double p1 = project_mode(deviation(st), mi, s1);
        out[m] = {m, 1.0 - m / 2.0, std::log(p1 / p0) / t1};
    });
    return out;
}

double max_curvature(const RotationalGraph& g)
{
    const int N = g.size();
    const double h = g.h();
    const bool periodic = g.ends == Ends::Periodic;
    double best = 0.0;
    for (int i = periodic ? 0 : 1; i < (periodic ? N : N - 1); ++i) {
        const double wm = g.w[(i - 1 + N) % N], w0 = g.w[i], wp = g.w[(i + 1) % N];
        const double wx = (wp - wm) / (2 * h), wxx = (wp - 2 * w0 + wm) / (h * h);
        const double q = 4 * w0 + wx * wx;
        const double k_rot = 2.0 / std::sqrt(q);
        const double k_prof = -2.0 * (2 * w0 * wxx - wx * wx) / (q * std::sqrt(q));
        best = std::max(best, std::sqrt(k_prof * k_prof + (g.n - 1) * k_rot * k_rot));
    }
    return best;
}

SolitonReport soliton_regression(int nodes)
{
    SolitonReport rep;
    AagConfig cfg;
    cfg.keep_snapshots = true;
    const auto sphere = evolve_aag(
        make_graph([](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }, -1, 1, nodes, 2, Ends::Caps), cfg);
    const auto cyl = evolve_aag(make_graph([](double) { return 1.0; }, 0, 1, 64, 2, Ends::Periodic), cfg);
    rep.sphere_T = sphere.T;
    rep.cylinder_T = cyl.T;
    for (const auto* run : {&sphere, &cyl})
        for (const auto& s : run->snapshots) {
            const double left = run->T - s.tau;
            if (left < 0.01 * run->T || left > 0.1 * run->T) continue;
            rep.type_one_tau.push_back(s.tau);
            rep.type_one.push_back(max_curvature(s) * std::sqrt(left));
        }
    return rep;
}

NeckpinchStudy neckpinch_study(int nodes, double t_lo, double t_hi)
{
    RunConfig rc = neckpinch_config(2, 1, 10.0, t_hi);
    rc.nodes = nodes;
    const ShrinkerSpec spec = rc.spec;
    const double t0 = rc.t0;
    NeckpinchStudy st;
    st.run = run_checkpointed(rc, [&](const double* y) {
        return spec.rho * std::sqrt(1 + (y[0] * y[0] - 2) / (2 * t0));
    }, true, t_lo);
    if (!st.run.failure.empty() || st.run.pinched)
        fail("run-stopped", "neckpinch run stopped at t=" + std::to_string(st.run.t_reached));
    st.cls = classify(st.run.states, t_lo, t_hi);
    for (const auto& cp : st.run.checkpoints) {
        if (cp.t < t_lo - 1e-9) continue;
        st.t.push_back(cp.t);
        st.ta_ratio.push_back(cp.t * cp.nm.M(0, 0) * neutral_to_profile(1) / (spec.rho / 4));
    }
    st.remainder = remainder_decay(st.run.states, st.cls, 3.0);
    st.run.states.clear();
    return st;
}

RegularizationScaling regularization_scaling(double C0, const std::vector<double>& t0s)
{
    RegularizationScaling rep;
    LinearEvolveOptions opt;
    opt.C0 = C0;
    std::vector<double> lx, ly;
    for (double t0 : t0s) {
        const auto r = linear_evolve([](double y) { return std::exp(-y * y / 8); },
                                     [C0](double, double t) { return C0 / t; }, t0, opt);
        rep.t0.push_back(t0);
        rep.amplification.push_back(r.amplification);
        rep.s_prime.push_back(r.s_prime);
        lx.push_back(std::log(t0));
        ly.push_back(std::log(r.amplification / (r.s_prime * r.s_prime)));
    }
    rep.exponent = slope(lx, ly);
    return rep;
}

VelazquezSweep velazquez_sweep(const std::vector<double>& taus, double r, double r_tilde, int n)
{
    const std::vector<Callable> psis = {
        [](const double* y) { return std::exp(-y[0] * y[0] / 8); },
        [](const double* y) { return std::exp(-(y[0] - 1.5) * (y[0] - 1.5)); },
        [](const double* y) { return hermite_eval(2, y[0]) * cutoff(std::abs(y[0]), 6.0); },
    };
    VelazquezSweep rep;
    rep.tau = taus;
    rep.ratio.assign(taus.size(), 0.0);
    parallel_for(int(taus.size()), [&](int i) {
        for (const auto& psi : psis)
            rep.ratio[i] = std::max(rep.ratio[i], velazquez_ratio(psi, r, r_tilde, taus[i], n, 1));
    });
    for (double v : rep.ratio) rep.max_ratio = std::max(rep.max_ratio, v);
    return rep;
}

std::vector<double> eigenrelation_errors(int max_degree, double tau)
{
    std::vector<double> err(max_degree + 1, 0.0);
    for (int m = 0; m <= max_degree; ++m) {
        const double f = std::exp((1.0 - m / 2.0) * tau);
        const Callable hm = [m](const double* y) { return hermite_eval(m, y[0]); };
        for (double y = -3.0; y <= 3.0 + 1e-12; y += 0.25) {
            const double p[1] = {y};
            err[m] = std::max(err[m], std::abs(apply_semigroup_at(hm, tau, 1, p) - f * hermite_eval(m, y)));
        }
    }
    return err;
}

StepMapSeries step_map_series(const std::vector<double>& amplitudes, int nodes)
{
    const ShrinkerSpec spec = make_shrinker(2, 1);
    const Grid g = make_grid(1, nodes, 12.0);
    StepMapSeries rep;
    rep.amplitude = amplitudes;
    rep.ratio.resize(amplitudes.size());
    parallel_for(int(amplitudes.size()), [&](int i) {
        const double A = amplitudes[i];
        GraphState s = make_state(spec, g, [&](const double* y) {
            const double p = hermite_eval(0, y[0]) + hermite_eval(1, y[0]) + hermite_eval(2, y[0]);
            return spec.rho + A * p * cutoff(std::abs(y[0]), 8.0);
        }, 0.0);
        const Field v0 = deviation(s);
        FlowRunner run(SolverConfig{});
        if (!run.advance_to(s, 1.0)) fail("nonpositive-radius", "step-map run pinched");
        rep.ratio[i] = step_map_check(v0, deviation(s)).ratio;
    });
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        lx.push_back(std::log(amplitudes[i]));
        ly.push_back(std::log(rep.ratio[i]));
    }
    rep.slope = slope(lx, ly);
    return rep;
}

std::function<double(double)> random_profile(unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int J = 4;
    std::vector<double> c(J), phi(J);
    double sum = 0;
    for (int j = 0; j < J; ++j) {
        c[j] = U(rng);
        phi[j] = 2 * M_PI * U(rng);
        sum += c[j];
    }
    const double scale = 0.35 * (0.3 + 0.7 * U(rng)) / sum;
    for (double& v : c) v *= scale;
    return [c, phi](double x) {
        double u = 0.6;
        for (std::size_t j = 0; j < c.size(); ++j) u += c[j] * std::cos(M_PI * double(j + 1) * x / 2 + phi[j]);
        return u;
    };
}

RotationalGraph dumbbell_graph(int nodes)
{
    return make_graph([](double x) { return 0.5 + 0.3 * std::cos(2 * M_PI * x); }, 0, 1, nodes, 2, Ends::Periodic);
}

RotationalGraph mean_convex_dumbbell(int nodes)
{
    return make_graph([](double x) { return std::sqrt(std::max(0.0, 1 - x * x / 9)) * (1 - 0.6 * std::exp(-x * x)); },
                      -3, 3, nodes, 2, Ends::Caps);
}

std::vector<AagFamilyResult> aag_family(int count, unsigned long long seed, int nodes)
{
    std::vector<AagFamilyResult> out(count);
    parallel_for(count, [&](int i) {
        AagFamilyResult& r = out[i];
        r.seed = seed + i;
        const auto rep = evolve_aag(make_graph(random_profile(r.seed), 0, 4, nodes, 2, Ends::Periodic));
        r.extrema = rep.initial_extrema;
        r.singularities = int(rep.singularities.size());
        r.kind = rep.singularities.front().kind;
        r.T = rep.T;
    });
    return out;
}

RingStudy marriage_ring_study(double R, double a, int meridians, double eps, double p, double width, bool with_curve)
{
    RingStudy st;
    st.p = p;
    st.width = width;
    const TorusRing ring = thin_torus(R, a, meridians);
    st.uniform = evolve_ring(ring);
    st.squeezed = evolve_ring(squeeze_perturbation(ring, p, eps, width));
    st.T_bump = st.squeezed.T_first;
    st.T_else = std::numeric_limits<double>::infinity();
    for (int i = 0; i < meridians; ++i)
        if (std::abs(std::remainder(ring.phi(i) - p, 2 * M_PI)) >= width)
            st.T_else = std::min(st.T_else, st.squeezed.T[i]);
    st.first_inside = std::abs(std::remainder(ring.phi(st.squeezed.first) - p, 2 * M_PI)) < width;
    if (with_curve) st.curve_T = evolve_curve(circle_profile(R, a, 64)).T;
    return st;
}

ArrivalStudy arrival_study(int nodes)
{
    ArrivalStudy st;
    AagConfig cfg;
    cfg.keep_snapshots = true;
    cfg.stop_fraction = 1e-5;

    const auto sphere = evolve_aag(
        make_graph([](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }, -1, 1, nodes, 2, Ends::Caps), cfg);
    for (double x = -0.9; x <= 0.9 + 1e-12; x += 0.1)
        for (double r = 0.05; r < 0.95; r += 0.1) {
            if (x * x + r * r >= 1) continue;
            const double exact = (1 - x * x - r * r) / 4;
            st.sphere_err = std::max(st.sphere_err, std::abs(arrival_at(sphere, x, r) - exact) / 0.25);
        }
    st.sphere_probe = regularity_probe(sphere, 0.0, 0.25, 5);

    const auto cyl = evolve_aag(make_graph([](double) { return 1.0; }, 0, 1, 64, 2, Ends::Periodic), cfg);
    for (double r = 0.05; r < 1; r += 0.1)
        st.cylinder_err = std::max(st.cylinder_err, std::abs(arrival_at(cyl, 0.3, r) - (1 - r * r) / 2) / 0.5);

    st.neck_run = evolve_aag(mean_convex_dumbbell(nodes), cfg);
    st.neck_probe = regularity_probe(st.neck_run, st.neck_run.singularities.front().x, 0.2, 5);
    st.neck_run.snapshots.clear();
    return st;
}

} // namespace cylflow
