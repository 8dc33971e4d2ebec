#pragma once

#include "cylflow/grid.hpp"
#include "cylflow/hermite.hpp"

#include <functional>
#include <vector>

namespace cylflow {

struct KernelParams {
    double tau = 1.0;
    int k = 1;
    bool circle = false;   // include the heat kernel of the circle S^1(rho)
    double rho = 1.0;
};

// e^tau (4 pi (1 - e^{-tau}))^{-k/2} exp(-|y e^{-tau/2} - z|^2 / (4 (1 - e^{-tau}))) [x circle part]
double mehler_kernel(const KernelParams& p, const double* y, const double* z, double theta = 0.0, double eta = 0.0);

// heat kernel of S^1(rho) in angle variables, per unit arc length
double circle_heat_kernel(double tau, double rho, double theta, double eta);

struct SemigroupOptions {
    int npoints = 48;
    bool* underflow_warning = nullptr;   // set when tau < 1e-3
};

// S(tau) psi at y by Gauss quadrature in the Mehler representation.
double apply_semigroup_at(const Callable& psi, double tau, int k, const double* y, const SemigroupOptions& opt = {});
Callable apply_semigroup(Callable psi, double tau, int k, SemigroupOptions opt = {});
// grid version: psi is interpolated (zero outside the grid)
Field apply_semigroup(const Field& psi, double tau, const SemigroupOptions& opt = {});

// sup over a xi-lattice (spacing <= h, |xi| <= r) of (int psi^2 e^{-|y-xi|^2/4})^{1/2}
double nr_norm(const Callable& psi, double r, int k, double h = 0.05, int npoints = 48);

double velazquez_factor(int n, double r, double r_tilde, double tau);
double velazquez_ratio(const Callable& psi, double r, double r_tilde, double tau, int n, int k, double h = 0.05,
                       int npoints = 48);

using Potential = std::function<double(double y, double t)>;

struct LinearEvolveOptions {
    double K0 = 1.0;
    double delta1 = 1.0;
    double C0 = 1.0;        // bound |P| <= C0 / t used in the predicted scaling
    double h = 0.05;
    double margin = 10.0;   // grid extends K0 sqrt(s') + margin
};

struct LinearEvolveReport {
    double s = 0.0, s_prime = 0.0;
    double sup_ball = 0.0;      // sup over |y| <= K0 sqrt(s') of |v(s')|
    double l2_initial = 0.0;    // ||v(t0)||_{L^2}
    double amplification = 0.0;
    double predicted = 0.0;     // (s')^2 t0^{-2+C0}
    Field final_field;
};

// s solving e^{(s-t0)/2} = K0 sqrt(s) with s >= t0 + delta1 and s >= K0/15
double regularization_time(double t0, double K0, double delta1);

LinearEvolveReport linear_evolve(const std::function<double(double)>& v0, const Potential& P, double t0,
                                 const LinearEvolveOptions& opt = {});

} // namespace cylflow
