#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace cylflow {

// Uniform tensor grid in 1 or 2 dimensions. Node (i0, i1) is stored at i0 + n[0]*i1.
struct Grid {
    int dim = 1;
    std::array<int, 2> n{1, 1};
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    double h(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
    double coord(int axis, int i) const { return lo[axis] + i * h(axis); }
    std::size_t size() const { return std::size_t(n[0]) * std::size_t(dim == 2 ? n[1] : 1); }
    std::size_t index(int i0, int i1 = 0) const { return std::size_t(i0) + std::size_t(n[0]) * std::size_t(i1); }
    // half-width of the largest centred box contained in the grid
    double radius() const;
    bool same_as(const Grid& o) const;
};

Grid make_grid(int dim, int nodes, double half_width);

struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g, double value = 0.0) : grid(g), v(g.size(), value) {}

    template <class F>
    static Field sample(const Grid& g, F&& f)
    {
        Field out(g);
        if (g.dim == 1) {
            for (int i = 0; i < g.n[0]; ++i) {
                double y[2] = {g.coord(0, i), 0.0};
                out.v[i] = f(y);
            }
        } else {
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    double y[2] = {g.coord(0, i), g.coord(1, j)};
                    out.v[g.index(i, j)] = f(y);
                }
        }
        return out;
    }
};

// Fourth-order finite differences along one grid line; the two nodes at each end use
// one-sided fourth-order stencils.
void fd_d1(const double* f, std::ptrdiff_t stride, int n, double h, double* out, std::ptrdiff_t ostride);
void fd_d2(const double* f, std::ptrdiff_t stride, int n, double h, double* out, std::ptrdiff_t ostride);

struct Derivatives {
    std::array<std::vector<double>, 2> d1;
    std::array<std::vector<double>, 2> d2;
    std::vector<double> d12;
};

Derivatives derivatives(const Field& f);
Derivatives derivatives(const Grid& g, const std::vector<double>& v);

enum class Extrap { Polynomial, Linear, Clamp, Zero };

// Cubic (tensor 4-point Lagrange) interpolation at an arbitrary point.
double interpolate(const Field& f, const double* y, Extrap mode = Extrap::Polynomial);

// Resample onto another grid.
Field resample(const Field& f, const Grid& target, Extrap mode = Extrap::Polynomial);

// Gaussian-weighted trapezoid integral of f*g*e^{-|y|^2/4} over the grid.
double grid_weighted_sum(const Grid& g, const std::vector<double>& f, const std::vector<double>& w);

} // namespace cylflow
