#pragma once

#include "cylflow/grid.hpp"
#include "cylflow/shrinker.hpp"

#include <functional>
#include <map>
#include <vector>

namespace cylflow {

// h_m(y) = c_m H_m(y/2), orthonormal against e^{-y^2/4} on R.
double hermite_coeff(int m);
double hermite_eval(int m, double y);
// h_0(y) .. h_M(y)
void hermite_all(int M, double y, double* out);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss rule for the weight e^{-y^2/4} on R (Gauss-Hermite after y = 2x).
const GaussRule& gauss_nodes(int npoints);

using Callable = std::function<double(const double*)>;

enum class Measure { Axis, Shrinker };

// <f, g> over R^k by tensor Gauss quadrature; Measure::Shrinker multiplies by the
// sphere factor (theta-independent fields on Sigma^k).
double weighted_inner(const Callable& f, const Callable& g, int k, const ShrinkerSpec* spec = nullptr,
                      Measure measure = Measure::Axis, int npoints = 64);
// Same for grid fields (trapezoid rule, spectrally accurate for decaying integrands).
double weighted_inner(const Field& f, const Field& g, const ShrinkerSpec* spec = nullptr,
                      Measure measure = Measure::Axis);

double triple_product(int m, int n, int l);

// Product of h_{m_i}(y_i); unit norm in L^2(R^k, e^{-|y|^2/4}).
double hermite_product(const std::vector<int>& m, const double* y);

// Projection onto the L^2(Sigma^k)-normalized eigenfunction of `mode`.
double project_mode(const Field& v, const ModeIndex& mode, const ShrinkerSpec& spec);
double project_mode(const Callable& v, const ModeIndex& mode, const ShrinkerSpec& spec, int npoints = 64);

// L u = Delta u - y.grad u / 2 + u with fourth-order differences (one-sided at the edges).
Field apply_L(const Field& v);

struct SpectralCoeffs {
    int degree = 0;   // truncation |m| <= degree
    int k = 1;
    std::map<std::vector<int>, double> c;   // coefficients against the R^k-normalized products

    double norm2() const;
};

SpectralCoeffs spectral_decompose(const Field& v, int degree);
Field spectral_reconstruct(const SpectralCoeffs& s, const Grid& g);
// all multi-indices in N^k with |m| <= degree
std::vector<std::vector<int>> multi_indices(int k, int degree);

} // namespace cylflow
