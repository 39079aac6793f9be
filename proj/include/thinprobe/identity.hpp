#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "thinprobe/cgo.hpp"
#include "thinprobe/fit.hpp"
#include "thinprobe/geometry.hpp"
#include "thinprobe/model.hpp"
#include "thinprobe/quadrature.hpp"
#include "thinprobe/solver.hpp"

namespace thinprobe {

// A field with its derivatives at one space-time point; complex so that CGO
// probes and real fields share the same Green machinery.
struct FieldEval {
    cplx v;
    CVec3 grad{};
    cplx lap;
    cplx dt;
};

using FieldFn = std::function<FieldEval(const Vec3&, double)>;

FieldFn as_field(const ScalarField& f, int dim);
FieldFn as_field(const CgoParams& p);

struct GreenSides {
    cplx volume;    // int int (g Lap f - f Lap g)
    cplx boundary;  // int int_{dD} (g d_nu f - f d_nu g)
    cplx residual() const { return volume - boundary; }
    double relative() const;
};

// QuadRule counts: 2D {n_along, n_eta, n_t}, 3D {n_cross, n_along, n_eta, n_t}.
GreenSides green_sides(const FieldFn& f, const FieldFn& g, const ProbeSubdomain& sub, double T1, double T2,
                       const QuadRule& rule);
cplx green_residual(const FieldFn& f, const FieldFn& g, const ProbeSubdomain& sub, double T1, double T2,
                    const QuadRule& rule);

struct IdentityReport {
    int dim = 2;
    DomainKind kind = DomainKind::nozzle;
    std::map<std::string, cplx> terms;  // I1..I6 (2D, nozzle), I1..I8 (slab)
    cplx residual;                      // formula residual
    cplx lateral_defect;                // lateral boundary contribution the identity assumes away
    cplx residual_with_lateral;
    cplx ablated_residual;  // slab only: residual with I7 + I8 dropped
    double max_term = 0.0;
    double relative_residual = 0.0;
    double relative_re = 0.0;
    double relative_im = 0.0;
    double relative_ablated = 0.0;
    double relative_with_lateral = 0.0;
    double T1 = 0.0, T2 = 0.0;
    std::vector<int> counts;

    cplx term(const std::string& name) const;
};

// Default identity window: T2 - T1 = eps^window_exponent, starting at T1.
double default_window(double eps, double window_exponent = 2.0);

IdentityReport eval_terms_2d(const ManufacturedPair& pair, const CgoParams& cgo, const ProbeSubdomain& sub, double T1,
                             double T2, const QuadRule& rule);

struct SolverPair {
    SpaceTimeField u, v;
    ConfigTriplet cfg_u, cfg_v;  // fluxes in the subdomain frame
};

// Quadrature on the solver grid itself; [T1, T2] must span an even number of steps.
IdentityReport eval_terms_2d(const SolverPair& pair, const CgoParams& cgo, double T1, double T2);

IdentityReport eval_terms_3d(const ManufacturedPair& pair, const CgoParams& cgo, const ProbeSubdomain& sub, double T1,
                             double T2, const QuadRule& rule, DomainKind kind);

// Frozen-coefficient split of I4: for each component k, the gap frozen at a
// reference point times int int rho_k u0 / sqrt(mu), and the remainder. The
// along-curve component is frozen at the local origin, the others at x0.
struct I4Split {
    std::map<std::string, cplx> parts;  // I41..I44 in 2D, I41..I46 in 3D
    cplx total;
};

I4Split decompose_I4(const ManufacturedPair& pair, const CgoParams& cgo, const ProbeSubdomain& sub, double T1,
                     double T2, const QuadRule& rule, const Vec3& x0, double t0);

// Everything one epsilon of a sweep needs.
struct TermContext {
    ManufacturedPair pair;
    CgoParams cgo;
    CgoSchedule schedule;
    AlphaPack alphas;
    double T1 = 0.0, T2 = 0.0;
    QuadRule rule;
    Vec3 x0 = Vec3::Zero();
    double t0 = 0.0;
};

using TermFamily = std::function<TermContext(double eps)>;

// Predicted decay exponent in eps for a term, with s = eps^-beta substituted;
// NaN when no estimate is registered for the term.
double predicted_exponent(const std::string& term, double l, double beta, const AlphaPack& al);

// Value of one term for a context: I1..I8, I41..I46, or "I43_ratio" (|I43| / (s eps^{2+l})).
cplx term_value(const TermContext& ctx, const std::string& term);

SweepResult term_scaling_sweep(const TermFamily& family, const std::string& term, const std::vector<double>& eps_list,
                               double tolerance = 0.15, double floor = 1e-14);

struct LowerBoundReport {
    std::string status;  // "pass", "fail", "skipped: zero flux gap"
    std::vector<double> eps;
    std::vector<double> ratios;
    double reference = 0.0;
    double worst_fraction = 0.0;  // min ratio / reference
    bool pass = false;
};

LowerBoundReport lower_bound_check_I43(const TermFamily& family, const std::vector<double>& eps_list);

// Sweep CSV with columns eps,s,term,re,im,abs,predicted_exponent,measured_slope_so_far.
std::string sweep_csv(const std::vector<SweepResult>& sweeps);

}  // namespace thinprobe
