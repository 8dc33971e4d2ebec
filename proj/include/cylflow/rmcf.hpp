#pragma once

#include "cylflow/grid.hpp"
#include "cylflow/shrinker.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cylflow {

enum class Frame { MCF, RMCF };
enum class BoundaryMode { Profile, Extrapolate };
enum class Integrator { RK4, IMEX };

// Radius field r = rho + u over a 1-D or 2-D axis grid. `t` is RMCF time, or MCF time tau.
struct GraphState {
    ShrinkerSpec spec;
    Field r;
    double t = 0.0;
    Frame frame = Frame::RMCF;

    const Grid& grid() const { return r.grid; }
    std::vector<double> u() const;
};

GraphState make_state(const ShrinkerSpec& spec, const Grid& grid, const std::function<double(const double*)>& radius,
                      double t, Frame frame = Frame::RMCF);

// target radius at (y, t) used by the boundary sponge and by domain expansion
using BoundaryProfile = std::function<double(const double* y, double t)>;

struct SolverConfig {
    double c_cfl = 0.2;        // dt <= c_cfl h^2 (RK4)
    double c_adv = 1.0;        // dt <= c_adv h / max|y/2|
    double c_react = 0.25;     // dt <= c_react min r^2 / (n-k)
    double K = 1.0;            // domain policy R = K sqrt(t)
    double eps0 = 0.5;         // graphical threshold
    double r_min_stop = -1.0;  // negative: 1e-3 rho
    int stencil_order = 4;
    Integrator integrator = Integrator::RK4;
    double imex_dt = 0.05;
    double imex_theta = 0.5;   // implicitness of the ADI sweeps
    BoundaryMode boundary = BoundaryMode::Extrapolate;
    BoundaryProfile profile;   // required for BoundaryMode::Profile
    bool expand = false;       // regrid to K sqrt(t) as t grows
    double expand_ratio = 1.02;

    double stop_radius(const ShrinkerSpec& s) const { return r_min_stop > 0 ? r_min_stop : 1e-3 * s.rho; }
};

std::vector<double> rmcf_rhs(const GraphState& state);

// sup |rhs(rho + eps d) - eps L d + eps^2 d^2/(2 rho)| over interior nodes
double quadratic_residual_check(const ShrinkerSpec& spec, double eps, const Field& direction);

double stable_dt(const GraphState& state, const SolverConfig& cfg);

// One classical RK4 step followed by the boundary sponge.
GraphState step(const GraphState& state, const SolverConfig& cfg, double dt);

// Regrid to [-K sqrt t, K sqrt t]^k keeping the node count (or to `radius` if given).
GraphState expand_domain(const GraphState& state, const SolverConfig& cfg, std::optional<double> radius = {});

struct SpacetimePoint {
    double x[2] = {0.0, 0.0};
    double T = 0.0;
};

GraphState to_mcf(const GraphState& state, const SpacetimePoint& center = {});
GraphState to_rmcf(const GraphState& state, const SpacetimePoint& center = {});

double graphical_radius(const GraphState& state, double eps0);

struct FlowDiagnostics {
    double t = 0.0;
    double grad_radius = 0.0;
    double l2 = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double minH = 0.0;
    double maxA = 0.0;
    double typeI = std::numeric_limits<double>::quiet_NaN();
    double minr = 0.0;
    double ratio_0 = std::numeric_limits<double>::quiet_NaN();
    double ratio_geq0 = std::numeric_limits<double>::quiet_NaN();
    double ratio_1 = std::numeric_limits<double>::quiet_NaN();
};

struct CurvatureField {
    std::vector<double> H;
    std::vector<double> A;   // |A|
};

CurvatureField curvatures(const GraphState& state);

// `blowup_time` is the MCF singular time used for the type-I ratio; required only when
// `want_type_one` is set.
FlowDiagnostics curvature_diagnostics(const GraphState& state, std::optional<double> blowup_time = {},
                                      bool want_type_one = false, double eps0 = 0.5);

struct PinchSample {
    double tau = 0.0;
    double min_r = 0.0;
    double x[2] = {0.0, 0.0};
};

struct SingularityReport {
    double T_hat = 0.0;
    double x[2] = {0.0, 0.0};
    std::string model = "unclassified";
    double fit_slope = 0.0;   // d(min r^2)/d tau
};

SingularityReport detect_singularity(const std::vector<PinchSample>& trajectory, bool pinched, int window = 20);

struct DecayFit {
    double slope = 0.0;
    double band = 0.0;   // two standard errors
    int samples = 0;
};

DecayFit l2_decay_probe(const std::vector<std::pair<double, double>>& series);

// Gaussian area of the symmetric hypersurface r(y) over the axis grid (RMCF frame, centre 0).
struct AreaResult {
    double value = 0.0;
    bool tail_warning = false;
    double tail_estimate = 0.0;
};
AreaResult f_functional(const GraphState& state, double tol = 1e-10);

// Drives a run: picks dt, handles the IMEX history, domain growth and checkpoints.
class FlowRunner {
public:
    explicit FlowRunner(SolverConfig cfg) : cfg_(std::move(cfg)) {}

    // Advances until t_target or a pinch; returns false on pinch.
    bool advance_to(GraphState& state, double t_target);
    // Call after any external modification of the state (centering, regridding).
    void reset_history() { prevN_.clear(); }

    const SolverConfig& config() const { return cfg_; }
    SolverConfig& config() { return cfg_; }
    const std::vector<PinchSample>& pinch_trace() const { return trace_; }
    long steps() const { return steps_; }

private:
    void imex_step(GraphState& s, double dt);

    SolverConfig cfg_;
    std::vector<double> prevN_;
    std::vector<PinchSample> trace_;
    long steps_ = 0;
};

// Sets the outer layers of `r` from the boundary rule at time t.
void apply_boundary(const SolverConfig& cfg, Field& r, double t, int layers, bool sponge);

} // namespace cylflow
