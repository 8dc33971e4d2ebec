#pragma once

#include "cylflow/rmcf.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace cylflow {

// Neutral-mode matrix. Diagonal m_ii = sqrt(2) c0 <v, h2(y_i)>, off-diagonal
// m_ij = <v, h1(y_i) h1(y_j)>, with inner products over R^k (weight e^{-|y|^2/4}).
struct NeutralMatrix {
    Eigen::MatrixXd M;
    double t = 0.0;
};

// smooth cutoff: 1 on [0, R-1], 0 beyond R
double cutoff(double radius, double R);

NeutralMatrix neutral_matrix(const GraphState& state);
// (y_i^2 - 2)-coefficient per unit neutral-matrix entry: 1 / (4 (2 sqrt(pi))^{k-1})
double neutral_to_profile(int k);

Eigen::MatrixXd riccati_closed_form(const Eigen::MatrixXd& M0, double t0, double t, double gamma);
NeutralMatrix riccati_flow(const NeutralMatrix& M0, double t1, double gamma);

enum class EigenLabel { InverseT, Zero, Other };
const char* to_string(EigenLabel l);

struct EigenTrack {
    std::vector<double> t;
    std::vector<std::vector<double>> lambda;   // lambda[i][sample]
    std::vector<EigenLabel> labels;
    std::vector<double> residual;
};

EigenTrack eigen_track(const std::vector<NeutralMatrix>& traj, double gamma);

struct Classification {
    std::vector<int> I;           // 1-based active directions in the diagonalizing frame
    std::vector<double> b;        // mean of t a_i(t) per direction
    std::string verdict;          // nondegenerate | degenerate | inconclusive
    double t_lo = 0.0, t_hi = 0.0;
    double angle = 0.0;           // axis rotation used for k = 2
    std::vector<double> residuals;   // rms of t a_i(t) - b_i
};

Classification classify(const std::vector<NeutralMatrix>& traj, const ShrinkerSpec& spec, double t_lo, double t_hi);
Classification classify(const std::vector<GraphState>& traj, double t_lo, double t_hi);

// f = rho sqrt(1 + sum_{i in I}(y_i^2-2)/(2t)) - rho; I is 1-based.
double c1_profile(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);

// d_t f - Lf by analytic differentiation, with Lf = Delta f - y.grad f/2 + (rho+f)/2 - rho^2/(2(rho+f)).
double profile_residual(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);
// The y^2-only closed form -(n-k)^2 sum y_i^2 / (t^2 (rho^2 + rho^2 S/(2t))^{3/2}).
double neck_residual_model(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);
// Exact closed form: -rho^2 S/(4 t^2 sqrt Q) + rho^4 sum y_i^2/(4 t^2 Q^{3/2}), Q = rho^2 (1 + S/(2t)).
double neck_residual_closed_form(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);
// f - (rho/4t) S: the (rho/8t^2) S^2 (sqrt(1+S/2t)+1)^{-2} form and the exact (negative) form.
double profile_h2_gap_model(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);
double profile_h2_gap_closed_form(const ShrinkerSpec& spec, const std::vector<int>& I, const double* y, double t);

struct RemainderReport {
    double sup = 0.0;
    std::vector<double> t;
    std::vector<double> scaled;   // t^2 ||remainder||_{H^1(B)}
    std::vector<double> model;    // t^2 w(t) from w' = -2w/t
};

RemainderReport remainder_decay(const std::vector<GraphState>& traj, const Classification& cls, double ball = 3.0);

// w' = -2 w / t integrated numerically from (t0, w0)
double remainder_model(double w0, double t0, double t);

} // namespace cylflow
