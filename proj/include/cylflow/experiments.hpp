#pragma once

#include "cylflow/mode_dynamics.hpp"
#include "cylflow/normal_form.hpp"

#include <string>
#include <vector>

namespace cylflow {

// Checkpointed k-dimensional run: unit-time checkpoints with centering.
struct RunConfig {
    ShrinkerSpec spec;
    double t0 = 10.0;
    double t_end = 200.0;
    int nodes = 512;
    double half_width = 0.0;   // > 0: fixed box; otherwise K sqrt(t) with expansion
    SolverConfig solver;
    bool parity = false;       // symmetrize even data at checkpoints
    bool center = true;
};

struct Checkpoint {
    double t = 0.0;
    NeutralMatrix nm;
    ModeTriple modes;
    ConformalTransform transform;
    double unstable_before = 0.0, unstable_after = 0.0;
    ConeRatios cone;
};

struct RunResult {
    std::vector<Checkpoint> checkpoints;
    std::vector<GraphState> states;   // kept only when requested
    bool pinched = false;
    std::string failure;              // module error name if the run stopped early
    double t_reached = 0.0;
    double dT = 0.0;                  // accumulated spacetime shift of the singular point
    double dx[2] = {0.0, 0.0};
    double transform_size = 0.0;      // sum of |T_j - id|
};

RunResult run_checkpointed(const RunConfig& cfg, const std::function<double(const double*)>& radius,
                           bool keep_states = false, double keep_from = 0.0);

// the standard rotationally symmetric neckpinch start rho sqrt(1 + sum_{i in I} (y_i^2 - 2)/(2 t0))
RunConfig neckpinch_config(int n, int k, double t0, double t_end);

struct GenericityConfig {
    int n = 3;
    double t0 = 10.0;
    double eps = 1e-3;
    double t_end = 0.0;        // 0: t0 + 8 rho / (4 |eps|)
    int nodes = 256;
    double half_width = 16.0;
    double dt = 0.25;
    double theta = 0.6;        // ADI implicitness; 1/2 lets edge modes grow at this dt
    bool strict = true;        // throw classification-inconclusive
};

struct GenericityReport {
    Classification base;
    Classification perturbed;
    double t_end = 0.0;
    double transform_size = 0.0;
    std::vector<ConformalTransform> transforms;
    std::vector<ModeTriple> measured;    // a1 of the perturbed run, a2 and a12 relative to the base
    std::vector<ModeTriple> predicted;   // perturb_ode from the first checkpoint
    double max_rel_dev = 0.0;            // |a1 measured - predicted| / |predicted|
    bool riccati_pole = false;
    std::string note;
};

// The degenerate base run is recomputed unless supplied (it depends on n, t0, t_end, nodes, dt).
RunResult genericity_base(const GenericityConfig& cfg);
GenericityReport genericity_experiment(const GenericityConfig& cfg, const RunResult* base = nullptr);

struct StabilityConfig {
    int n = 3;
    double t0 = 10.0;
    double t_end = 80.0;
    double eps0 = 1e-4;
    unsigned long long seed = 1;
    int nodes = 256;
    double half_width = 16.0;
    double dt = 0.1;
    bool strict = true;
};

struct StabilityReport {
    Classification cls;
    double eps0 = 0.0;
    unsigned long long seed = 0;
    double dT = 0.0, dx[2] = {0.0, 0.0};
    double displacement = 0.0;
    double transform_size = 0.0;
    // ||chi_R phi|| / (e^{-R^2/4} ||phi||_{C^2}) for the seeded perturbation, R = 8; logged, not asserted
    double cutoff_ratio = 0.0;
    std::vector<Checkpoint> checkpoints;
};

// The base run is recomputed unless supplied.
StabilityReport stability_experiment(const StabilityConfig& cfg, const RunResult* base = nullptr);
RunResult stability_base(const StabilityConfig& cfg);

} // namespace cylflow
