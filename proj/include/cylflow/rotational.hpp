#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace cylflow {

// ---- rotational graphs r = u(x) ------------------------------------------

enum class Ends { Periodic, Caps, Neumann };

// Stored as w = u^2 on a uniform grid over [a, b]. For Caps the endpoints are the
// tips (w = 0 there) and move; for Periodic the node at b is omitted.
struct RotationalGraph {
    double a = 0.0, b = 1.0;
    std::vector<double> w;
    int n = 2;
    double tau = 0.0;
    Ends ends = Ends::Periodic;

    int size() const { return int(w.size()); }
    double h() const { return ends == Ends::Periodic ? (b - a) / size() : (b - a) / (size() - 1); }
    double x(int i) const { return a + i * h(); }
    double u(int i) const;
    bool caps() const { return ends == Ends::Caps; }
};

RotationalGraph make_graph(const std::function<double(double)>& u, double a, double b, int nodes, int n,
                           Ends ends);

// du/dtau = u_xx/(1+u_x^2) - (n-1)/u at every node (0 at cap tips)
std::vector<double> aag_rhs(const RotationalGraph& g);
// same law for w = u^2 in the moving-endpoint frame, plus the tip speeds
std::vector<double> aag_w_rhs(const RotationalGraph& g, double* da = nullptr, double* db = nullptr);

int strict_extrema(const RotationalGraph& g);
// (n-1)/u - u_xx/(1+u_x^2) > -tol at every interior node
bool mean_convex(const RotationalGraph& g, double tol = 1e-9);

struct AagConfig {
    double dt = 0.0;            // fixed step; 0 picks cfl * h * u_min / (2n)
    double cfl = 0.5;
    double stop_fraction = 0.02; // stop when min u < stop_fraction * max u(0)
    double snapshot_tol = 0.02;  // relative change in w between stored snapshots
    long max_steps = 50000000;
    bool keep_snapshots = false;
};

struct Singularity {
    std::string kind;   // "neck" or "cap"
    double x = 0.0;
    double T = 0.0;     // extrapolated singular time
};

struct AagReport {
    std::vector<Singularity> singularities;   // simultaneous first events
    double T = 0.0;                           // earliest extrapolated time
    double tau_stop = 0.0;
    long steps = 0;
    int initial_extrema = 0;
    bool count_ok = true;
    bool always_mean_convex = true;
    std::vector<RotationalGraph> snapshots;
    RotationalGraph final_state;
};

AagReport evolve_aag(const RotationalGraph& g0, const AagConfig& cfg = {});

// ---- arrival time -----------------------------------------------------------

struct ArrivalTimeField {
    std::vector<double> x, r;         // node coordinates
    std::vector<double> g;            // size x.size()*r.size(), index j*x.size()+i
    std::vector<unsigned char> reached;
    double at(int i, int j) const { return g[std::size_t(j) * x.size() + i]; }
};

// first time the point (x, r) leaves the solid; NaN if outside initially or never swept
double arrival_at(const AagReport& run, double x, double r);
ArrivalTimeField arrival_time(const AagReport& run, const std::vector<double>& xs, const std::vector<double>& rs);

struct ProbeLine {
    double angle = 0.0;            // degrees from the axis
    std::vector<double> scales;
    std::vector<double> quotients;  // (g(p+hv) - 2g(p) + g(p-hv)) / h^2
    bool complete = true;           // every point swept before T
    bool stabilizing = false;       // last three quotients agree to 1%
    bool bounded = false;           // max |Q| <= 10 max(|Q_0|, 1)
};

struct RegularityProbe {
    double x0 = 0.0, T = 0.0;
    std::vector<ProbeLine> lines;
};

// second-difference quotients of g through (x0, 0) at scales h0 2^-k
RegularityProbe regularity_probe(const AagReport& run, double x0, double h0, int levels = 7,
                                 const std::vector<double>& angles = {90.0, 60.0, 45.0});

// ---- torus profile curves -----------------------------------------------------

struct ProfileCurve {
    std::vector<std::array<double, 2>> p;   // (x, r)
    bool closed = true;                     // open curves have both ends on the axis
    double tau = 0.0;
};

ProfileCurve circle_profile(double center_r, double a, int nodes);
ProfileCurve semicircle_profile(double R, int nodes);

// outward normal speed -(kappa + nu_r / r); outward normals via out (optional)
std::vector<double> torus_rhs(const ProfileCurve& c, std::vector<std::array<double, 2>>* normals = nullptr);
void remesh(ProfileCurve& c);
bool self_intersects(const ProfileCurve& c);
double enclosed_area(const ProfileCurve& c);

struct CurveConfig {
    double dt_factor = 0.1;      // dt = dt_factor * ds^2
    int remesh_every = 1;
    double r_min_stop = 1e-4;
    double stop_fraction = 0.05; // stop when the size drops below this fraction
    long max_steps = 50000000;
};

struct CurveReport {
    double T = 0.0;          // extrapolated extinction time
    double tau_stop = 0.0;
    long steps = 0;
    double initial_rate = 0.0;   // d(size)/dtau at the start
    ProfileCurve final_curve;
};

CurveReport evolve_curve(const ProfileCurve& c0, const CurveConfig& cfg = {});

// thin torus reduced per meridian: tube radius a(phi) around a ring of radius R
struct TorusRing {
    double R = 1.0;
    std::vector<double> a;   // per meridian, phi_i = 2 pi i / size
    double tau = 0.0;
    double phi(int i) const;
};

TorusRing thin_torus(double R, double a, int meridians);
// a(phi) <- a(phi) (1 - eps bump((phi - p) / width)), bump = exp(1 - 1/(1 - s^2)) on |s| < 1
TorusRing squeeze_perturbation(const TorusRing& t, double p, double eps, double width = 0.5);
std::vector<double> ring_rhs(const TorusRing& t);

struct RingReport {
    std::vector<double> T;        // extrapolated pinch time per meridian
    double T_first = 0.0;
    int first = 0;                // meridian index of the earliest pinch
    std::vector<int> tied;        // meridian clusters within tolerance of T_first
    bool tie = false;
    double spread = 0.0;          // (max T - min T) / min T
    double tau_stop = 0.0;
    double dt_last = 0.0;
};

RingReport evolve_ring(const TorusRing& t0, double stop_fraction = 0.02, double dt_factor = 0.2);

// ---- CSV ----------------------------------------------------------------------

ProfileCurve read_profile_csv(const std::string& path);
void write_arrival_csv(const std::string& path, const ArrivalTimeField& f);

} // namespace cylflow
