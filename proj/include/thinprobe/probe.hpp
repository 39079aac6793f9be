#pragma once

#include <string>
#include <vector>

#include "thinprobe/cgo.hpp"
#include "thinprobe/fit.hpp"
#include "thinprobe/identity.hpp"
#include "thinprobe/model.hpp"

namespace thinprobe {

// Piecewise stability exponent of case a; p is the alpha-product.
double tau_case_a(double l, double p);

enum class Tau1Variant { theorem, proof };

// a * b^2 / (1 + a b); (a, b) = (alpha1, alpha3) for the theorem variant,
// (alpha2, alpha4) for the proof variant.
double tau1(double a, double b);
double tau1(const AlphaPack& al, Tau1Variant v);

struct ExponentTable {
    double l = 1.0;
    AlphaPack alphas;
    ProductChoice product = ProductChoice::theorem;
    double p = 0.25;
    double tau_theorem = 0.0;  // NaN when l is outside the branch range for that product
    double tau_proof = 0.0;
    double tau1_theorem = 0.0;
    double tau1_proof = 0.0;
    double beta_case_a = 0.0;
    double beta_case_b = 0.0;
    bool products_differ = false;
    bool tau1_differ = false;

    double tau() const { return product == ProductChoice::theorem ? tau_theorem : tau_proof; }
};

ExponentTable make_exponent_table(double l, const AlphaPack& al, ProductChoice product);

// |F~1(u) - F~2(u)| at (x, t) on the rotated components the geometry designates:
// 2D k = 2; 3D nozzle k = 1, 3; 3D slab k = 3. x is in subdomain coordinates.
double flux_gap(const ManufacturedPair& pair, const Vec3& x, double t);
// Same, for a point given in global coordinates and the frame that maps it.
double flux_gap(const ManufacturedPair& pair, const Frame& frame, const Vec3& X, double t);

double source_gap(const ManufacturedPair& pair, const Vec3& x, double t);
// |f1 - f2| of two configurations at a common state (u, grad u).
double source_gap(const ConfigTriplet& c1, const ConfigTriplet& c2, const Vec3& x, double t, double u,
                  const Vec3& grad_u);

struct TheoremCheck {
    ProbeCase probe_case = ProbeCase::a;
    double tau = 0.0;
    double beta = 0.0;
    std::vector<double> eps;
    std::vector<double> gaps;
    std::vector<double> bounds;  // C eps^tau
    double C = 0.0;
    SlopeFit fit;
    bool slope_ok = false;  // reported only: slope >= tau - 0.2
    bool bound_holds = false;
    std::vector<HypothesisReport> hypotheses;
};

struct TheoremCheckOptions {
    int samples = 1000;
    std::uint64_t seed = 1;
    double slope_tolerance = 0.2;
};

// Throws HypothesisError naming the failing condition and eps when the validator rejects a member.
TheoremCheck theorem_bound_check(const TermFamily& family, ProbeCase pc, const ExponentTable& ex,
                                 const std::vector<double>& eps_list, const TheoremCheckOptions& opt = {});

}  // namespace thinprobe
