#pragma once

#include <vector>

namespace cylflow {

// c0 = (4 pi)^{-1/4}, the constant Hermite function.
double c0();

struct ShrinkerSpec {
    int n = 2;
    int k = 1;
    double rho = 0.0;

    int sphere_dim() const { return n - k; }
};

struct ModeIndex {
    std::vector<int> m;   // Hermite degree per axis direction
    int j = 0;            // spherical harmonic degree

    int degree() const;
};

ShrinkerSpec make_shrinker(int n, int k);

double sphere_eigenvalue(const ShrinkerSpec& spec, int j);
double mode_eigenvalue(const ShrinkerSpec& spec, const ModeIndex& mode);

// area of the unit d-sphere in R^{d+1}
double unit_sphere_area(int d);

double gaussian_sphere_factor(const ShrinkerSpec& spec);
double gamma_constant(const ShrinkerSpec& spec);
// Riccati constant for neutral matrices built with the R^k-weighted inner product
// (no sphere factor); equals gamma_constant(spec) * gaussian_sphere_factor(spec).
double neutral_gamma(const ShrinkerSpec& spec);

enum class ShapeTag { Hyperplane, Sphere, Cylinder };

struct AnalyticShape {
    ShapeTag tag = ShapeTag::Cylinder;
    int n = 2;   // hypersurface dimension
    int k = 1;   // axis dimension (cylinders only)
};

// Gaussian area (4 pi)^{-n/2} int e^{-|x|^2/4}; equals entropy on shrinkers.
double f_functional(const AnalyticShape& shape);
double entropy(const AnalyticShape& shape);

} // namespace cylflow
