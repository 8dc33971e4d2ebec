#pragma once

#include "cylflow/rmcf.hpp"

#include <vector>

namespace cylflow {

struct ConeRatios {
    double ratio_0 = 0.0;      // |m| = 2 part
    double ratio_geq0 = 0.0;   // |m| <= 2 part
    double ratio_1 = 0.0;      // constant part
};

enum class ConeVariant { GeqZero, Zero, One };

struct ConeSpec {
    double kappa = 0.9;
    ConeVariant variant = ConeVariant::Zero;
};

// H^1 ratios from a Hermite truncation at |m| <= degree, against the full grid H^1 norm.
ConeRatios cone_ratios(const Field& u, int degree = 8);
bool in_cone(const Field& u, const ConeSpec& cone);

// weighted H^1(R^k) norm of a grid field
double h1_norm(const Field& v);

struct StepMapResult {
    double ratio = 0.0;
    bool zero_input = false;
};

// ||v1 - S(1) v0||_{H^1} / ||v0||_{H^1}
StepMapResult step_map_check(const Field& v0, const Field& v1);

// y -> lambda O y + d acting on the axis coordinates of the surface
struct ConformalTransform {
    int k = 1;
    double lambda = 1.0;
    double d[2] = {0.0, 0.0};
    double angle = 0.0;   // k = 2 only

    double size() const;
    // this after `first`
    ConformalTransform after(const ConformalTransform& first) const;
    void map(const double* y, double* out) const;
};

// Radius field of the transformed surface, resampled on the same grid. Throws
// regraph-failure if the new field is not a positive finite graph.
Field apply_transform(const Field& r, const ConformalTransform& T);

struct CenteringModes {
    double c = 0.0;                // coefficient of 1
    double B[2] = {0.0, 0.0};      // coefficients of y_i
    double A[2] = {0.0, 0.0};      // coefficients of y_i^2 - 2
    double size = 0.0;             // |Pi_1| + sum |Pi_{y_i}|, normalized projections
};

CenteringModes centering_modes(const GraphState& s);

struct CenteringResult {
    ConformalTransform T;
    GraphState state;
    double before = 0.0, after = 0.0;
    int iterations = 0;
};

CenteringResult centering(const GraphState& s, double floor = 1e-12);

// r(O^T y) with bicubic resampling, O the rotation by `angle`
Field axis_rotate(const Field& r, double angle);

struct ModeTriple {
    double t = 0.0;
    double a1 = 0.0, a2 = 0.0, a12 = 0.0;
};

// three-mode system with the error terms dropped; rho enters the rates
std::vector<ModeTriple> perturb_ode(const ModeTriple& a0, double t1, const ShrinkerSpec& spec, int samples = 200);
double perturb_ode_a1_closed_form(double a1_0, double t0, double t, const ShrinkerSpec& spec);

// measured (a1, a2, a12) of a field in the ODE normalization: a_i = A_i / c2, a12 = B / c1^2
ModeTriple measure_modes(const GraphState& s);

} // namespace cylflow

namespace cylflow {

// average over the reflections y_a -> -y_a (exact for even data; removes round-off seeds of odd modes)
void symmetrize_even(Field& r);

// seeded Hermite series with |m| <= degree, scaled to C^2 size eps0 on the grid
Field random_perturbation(const Grid& g, double eps0, unsigned long long seed, int degree = 6);

// sup over nodes of |f| + |grad f| + |hess f|_F
double c2_size(const Field& f);

} // namespace cylflow
