#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thinprobe/geometry.hpp"
#include "thinprobe/model.hpp"

namespace thinprobe {

// Structured grid on the mapped probe subdomain: x1 along the curve, eta in
// [0, 1] across it, x2 = gamma(x1) + eps * eta.
struct Grid2D {
    ProbeSubdomain sub;
    int n1 = 17, n_eta = 17, nt = 16;
    double T = 1.0;
    double eps = 0.1, l = 1.0;
    std::vector<double> x1, eta;
    std::vector<double> gamma, gamma1, gamma2;

    static Grid2D make(const ProbeSubdomain& sub, int n1, int n_eta, int nt, double T);

    double h1() const { return x1[1] - x1[0]; }
    double h_eta() const { return eta[1] - eta[0]; }
    double dt() const { return T / nt; }
    double time(int k) const { return k * dt(); }
    double jacobian() const { return eps; }
    int index(int i, int j) const { return i * n_eta + j; }
    int nodes() const { return n1 * n_eta; }
    bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n_eta - 1; }
    Vec3 point(int i, int j) const;
    // Smallest physical spacing, used by the step-size check.
    double min_spacing() const;
};

class SpaceTimeField {
public:
    Grid2D grid;
    std::vector<double> values;  // (nt + 1) x n1 x n_eta, time-major

    SpaceTimeField() = default;
    explicit SpaceTimeField(const Grid2D& g) : grid(g), values(static_cast<size_t>(g.nt + 1) * g.nodes(), 0.0) {}

    double& at(int k, int i, int j) { return values[static_cast<size_t>(k) * grid.nodes() + grid.index(i, j)]; }
    double at(int k, int i, int j) const { return values[static_cast<size_t>(k) * grid.nodes() + grid.index(i, j)]; }
    // Physical gradient, central differences inside and second-order one-sided ones at the edges.
    Vec3 grad(int k, int i, int j) const;
    // Time levels k with t_k in [T1, T2].
    std::pair<int, int> window(double T1, double T2) const;
};

using InitialFn = std::function<double(const Vec3&)>;
using BoundaryFn = std::function<double(const Vec3&, double)>;

struct SolverOptions {
    double linear_tol = 1e-10;
    int linear_max_iter = 2000;
};

SpaceTimeField solve_forward(const ConfigTriplet& cfg, const Grid2D& grid, const BoundaryFn& psi,
                             const InitialFn& u_init, const SolverOptions& opt = {});

struct MeasurementTrace {
    Piece piece = Piece::G1;
    std::vector<double> times;
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;
    std::vector<std::vector<double>> u_trace;     // [time][node]
    std::vector<std::vector<double>> dnu_trace;   // d_nu u alone
    std::vector<std::vector<double>> flux_trace;  // d_nu u + h_F
    std::vector<std::vector<double>> hF_trace;    // nu . F(x, t, u) / mu
};

MeasurementTrace boundary_measurement(const SpaceTimeField& field, const ConfigTriplet& cfg, Piece piece, double T1,
                                      double T2);

struct PieceMismatch {
    Piece piece = Piece::G1;
    double u_sup = 0.0;
    double flux_sup = 0.0;
};

struct PairSolve {
    SpaceTimeField field1, field2;
    std::vector<PieceMismatch> mismatch;
    double max_u_mismatch = 0.0;
    double max_flux_mismatch = 0.0;
};

PairSolve solve_pair_with_shared_dirichlet(const ConfigTriplet& cfg1, const ConfigTriplet& cfg2, const Grid2D& grid,
                                           const BoundaryFn& psi, const InitialFn& u_init,
                                           const SolverOptions& opt = {});

struct ConvergenceStudy {
    std::vector<int> n;
    std::vector<int> nt;
    std::vector<double> h;
    std::vector<double> errors;  // max nodal error at the final time
    std::vector<double> orders;  // log2 of successive error ratios

    double min_order() const;
};

// Manufactured-solution refinement study: exact supplies psi, u_init and the
// compensating forcing. Level k uses (n0 - 1) 2^k + 1 nodes per axis and nt0 4^k steps.
ConvergenceStudy mms_convergence(ConfigTriplet cfg, const ProbeSubdomain& sub, const ScalarField& exact, double T,
                                 int n0, int nt0, int levels, const SolverOptions& opt = {});

// CSV rows "t,x1,eta,value" for external plotting.
std::string field_csv(const SpaceTimeField& field);
void write_field_csv(const SpaceTimeField& field, const std::string& path);

}  // namespace thinprobe
