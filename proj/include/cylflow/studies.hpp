#pragma once

// Desk-scale studies shared by the lab scenarios, the acceptance binary and the bindings.

#include "cylflow/experiments.hpp"
#include "cylflow/ou_semigroup.hpp"
#include "cylflow/rotational.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace cylflow {

// LAB_THREADS if set and positive, otherwise the hardware concurrency
int lab_threads();
// runs body(i) for i < count on up to lab_threads() workers; rethrows the first failure
void parallel_for(int count, const std::function<void(int)>& body);

struct GrowthRate {
    int m = 0;
    double expected = 0.0;
    double measured = 0.0;
};

// seeds rho + amplitude h_m (cut off beyond |y| = 8) and reads the growth of the h_m projection
std::vector<GrowthRate> eigenmode_growth(const ShrinkerSpec& spec, int max_degree, double amplitude = 1e-4,
                                         double t1 = 1.0, int nodes = 1024, double half_width = 12.0);

struct SolitonReport {
    double sphere_T = 0.0, cylinder_T = 0.0;
    std::vector<double> type_one_tau, type_one;   // |A| sqrt(T - tau) over the last decade
};

SolitonReport soliton_regression(int nodes = 1024);

// max over interior nodes of the second fundamental form norm of the rotated graph
double max_curvature(const RotationalGraph& g);

struct NeckpinchStudy {
    RunResult run;
    Classification cls;
    std::vector<double> t, ta_ratio;   // t a(t) / (rho/4)
    RemainderReport remainder;
};

NeckpinchStudy neckpinch_study(int nodes = 512, double t_lo = 50.0, double t_hi = 200.0);

struct RegularizationScaling {
    std::vector<double> t0, amplification, s_prime;
    double exponent = 0.0;   // least-squares slope of log(amplification / s'^2) against log t0
};

RegularizationScaling regularization_scaling(double C0, const std::vector<double>& t0s);

// sup over a few test functions psi of the Velazquez ratio N_r(S(tau) psi) / (factor N_r~(psi))
struct VelazquezSweep {
    std::vector<double> tau, ratio;
    double max_ratio = 0.0;
};

VelazquezSweep velazquez_sweep(const std::vector<double>& taus, double r = 2.0, double r_tilde = 1.0, int n = 2);

// max |S(tau) h_m - e^{(1 - m/2) tau} h_m| over |y| <= 3, per m <= max_degree
std::vector<double> eigenrelation_errors(int max_degree, double tau);

struct StepMapSeries {
    std::vector<double> amplitude, ratio;
    double slope = 0.0;   // log-log
};

// cylinder plus amplitude * (h_0 + h_1 + h_2) (cut off beyond |y| = 8), one unit of flow
StepMapSeries step_map_series(const std::vector<double>& amplitudes, int nodes = 512);

// smooth periodic profile on [0, 4): 0.6 + sum_j c_j cos(pi j x / 2 + phi_j), |c| sum <= 0.35
std::function<double(double)> random_profile(unsigned long long seed);
RotationalGraph dumbbell_graph(int nodes);            // periodic 0.5 + 0.3 cos(2 pi x)
RotationalGraph mean_convex_dumbbell(int nodes);      // closed, caps at x = +-3

struct AagFamilyResult {
    unsigned long long seed = 0;
    int extrema = 0;
    int singularities = 0;
    std::string kind;
    double T = 0.0;
};

std::vector<AagFamilyResult> aag_family(int count, unsigned long long seed, int nodes = 256);

struct RingStudy {
    RingReport uniform, squeezed;
    double T_bump = 0.0, T_else = 0.0;
    bool first_inside = false;
    double p = 0.0, width = 0.0;
    double curve_T = 0.0;   // full profile-curve flow of the unsqueezed torus, 64 nodes
};

RingStudy marriage_ring_study(double R = 1.0, double a = 0.05, int meridians = 256, double eps = 0.05,
                              double p = M_PI / 2, double width = 0.5, bool with_curve = true);

struct ArrivalStudy {
    double sphere_err = 0.0, cylinder_err = 0.0;   // max |g - exact| / T
    RegularityProbe sphere_probe, neck_probe;
    AagReport neck_run;
};

ArrivalStudy arrival_study(int nodes = 1024);

} // namespace cylflow
