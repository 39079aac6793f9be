#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "thinprobe/geometry.hpp"
#include "thinprobe/jet.hpp"

namespace thinprobe {

// Declared Hoelder exponent and constant for one slot of the admissible class.
struct Holder {
    double alpha = 0.5;
    double C = 1.0;
};

class StateMap {
public:
    enum class Kind { identity, cubic_floor };

    Kind kind = Kind::identity;
    std::string id = "identity";
    double delta = 0.0;
    Holder holder;
    bool c1_class = false;  // validated in C^{1,alpha1} instead of C^{0,alpha1}

    Jet apply(const Jet& z) const;
    double value(double z) const;
    double deriv(double z) const;
    double deriv2(double z) const;
    double min_derivative() const;
    // Solve H(u) = y; guarded Newton, tolerance 1e-12, at most 50 iterations.
    double invert(double y, double guess) const;
};

StateMap make_state_map(const std::string& id, const std::vector<double>& params, Holder holder,
                        bool c1_class = false);

class FluxMap {
public:
    enum class Kind { constant_advection, rotational_advection, burgers_like, space_modulated, affine_advection };

    Kind kind = Kind::constant_advection;
    std::string id = "constant-advection";
    int dim = 2;
    std::vector<double> params;
    Holder holder;

    // advection velocity c0 + A X (affine kinds) / modulation data
    Vec3 c0 = Vec3::Zero();
    Mat3 A = Mat3::Zero();
    double amp = 0.0;
    double wavenumber = 0.0;
    double scale = 1.0;

    // Global coordinates.
    JetVec eval(const JetPoint& X, const Jet& z) const;
    Vec3 value(const Vec3& X, double t, double z) const;
};

FluxMap make_flux(const std::string& id, const std::vector<double>& params, int dim, Holder holder);

// Additive x,t-dependent flux term in local coordinates, with its divergence.
struct FluxOffset {
    std::function<Vec3(const Vec3&, double)> value;
    std::function<double(const Vec3&, double)> divergence;
};

// F'(x, t, z) = R F(R^T x + T, t, z) plus optional local offsets.
class RotatedFlux {
public:
    FluxMap base;
    Frame frame;
    std::vector<FluxOffset> offsets;

    int dim() const { return base.dim; }
    // Rotated base flux on jets (offsets excluded).
    JetVec eval(const JetPoint& x, const Jet& z) const;
    Vec3 value(const Vec3& x, double t, double z) const;
    Vec3 base_value(const Vec3& x, double t, double z) const;
    // Divergence in x at frozen z, including offsets.
    double explicit_divergence(const Vec3& x, double t, double z) const;
    Vec3 dz(const Vec3& x, double t, double z) const;
    // Divergence of x -> F'(x, t, u(x, t)) given u and grad u at the point.
    double divergence_along(const Vec3& x, double t, double u, const Vec3& grad_u) const;
};

RotatedFlux rotate_flux(const FluxMap& F, const Frame& frame);

class SourceMap {
public:
    enum class Kind { zero, logistic, gradient_quadratic, custom };

    Kind kind = Kind::zero;
    std::string id = "zero";
    std::vector<double> params;
    Holder holder;
    std::function<double(const Vec3&, double, double, const Vec3&)> custom;
    // Optional additive x,t field (manufactured compensation or perturbation).
    std::function<double(const Vec3&, double)> forcing;

    double reaction(const Vec3& x, double t, double z, const Vec3& p) const;
    double value(const Vec3& x, double t, double z, const Vec3& p) const;
};

SourceMap make_source(const std::string& id, const std::vector<double>& params, Holder holder);

struct ConfigTriplet {
    StateMap H;
    RotatedFlux F;
    SourceMap f;
    double mu = 1.0;

    int dim() const { return F.dim(); }
};

ConfigTriplet make_config(const StateMap& H, const FluxMap& F, const SourceMap& f, double mu);
// Same triplet with the flux viewed in a local frame.
ConfigTriplet in_frame(ConfigTriplet cfg, const Frame& frame);

struct FieldDerivs {
    double v = 0.0;
    Vec3 grad = Vec3::Zero();
    double lap = 0.0;
    double dt = 0.0;
};

// Closed-form space-time field in local coordinates, evaluated on jets so that
// gradients, Laplacians and time derivatives come out exactly.
class ScalarField {
public:
    using Fn = std::function<Jet(const JetPoint&)>;

    ScalarField() = default;
    explicit ScalarField(Fn fn) : fn_(std::move(fn)) {}

    Jet operator()(const JetPoint& p) const { return fn_(p); }
    double value(const Vec3& x, double t) const { return fn_(constant_point(x, t)).v; }
    FieldDerivs derivs(const Vec3& x, double t, int dim) const;
    explicit operator bool() const { return static_cast<bool>(fn_); }

private:
    Fn fn_;
};

ScalarField operator-(const ScalarField& a, const ScalarField& b);

// Registry of base fields on a probe subdomain, written in mapped coordinates
// (along, eta, xi): trig, smooth, heat [mu], slow, constant [c].
ScalarField make_base_field(const std::string& id, const std::vector<double>& params, const ProbeSubdomain& sub);

using SpaceTimeFn = std::function<double(const Vec3&, double)>;

// f := d/dt H(u) + div F(x, t, u) - mu Lap u.
SpaceTimeFn mms_source(const ScalarField& u, const StateMap& H, const RotatedFlux& F, double mu, int dim);
// Extra x,t forcing that makes u an exact solution of cfg, i.e. mms_source minus cfg.f's reaction along u.
SpaceTimeFn mms_forcing(const ScalarField& u, const ConfigTriplet& cfg);

enum class TransverseProfile { bubble, quartic, wave };
enum class AlongProfile { one, ramp, bump, decay };

TransverseProfile profile_from_name(const std::string& s);
AlongProfile psi_from_name(const std::string& s);
std::string profile_name(TransverseProfile p);
std::string psi_name(AlongProfile p);

struct PairSettings {
    double q = 1.0;            // w scales as eps^q
    double amplitude = 1.0;
    TransverseProfile profile = TransverseProfile::bubble;
    AlongProfile psi = AlongProfile::ramp;
    bool gradient_flux_gap = true;  // G' = F' - mu grad w; off means G' = F'
    double drift = 0.0;             // tangential drift, adds a constant source gap
    double raw_flux_gap = 0.0;      // constant transverse flux gap; breaks lateral balance
    Holder source_holder{0.5, 10.0};
    Holder solution_holder{0.5, 10.0};
};

// Everything the identity terms need at one space-time point.
struct PairSample {
    double w = 0.0;
    Vec3 grad_w = Vec3::Zero();
    Vec3 D = Vec3::Zero();  // F'(x,t,u) - G'(x,t,v)
    double src_gap = 0.0;   // f - g
    double H_gap = 0.0;     // H(u) - H(v)
};

class ManufacturedPair {
public:
    ProbeSubdomain sub;
    ScalarField u, w, v;
    StateMap H;
    RotatedFlux F_prime, G_prime;
    double mu = 1.0;
    PairSettings settings;
    SpaceTimeFn f, g;

    int dim() const { return sub.dim; }
    double amplitude_exponent() const { return settings.q; }
    // F'(u) - G'(u) at the same state: the flux gap field.
    Vec3 flux_gap_field(const Vec3& x, double t) const;
    double h(const Vec3& x, double t, const Vec3& normal) const;
    PairSample sample(const Vec3& x, double t) const;
    ConfigTriplet cfg_u() const;
    ConfigTriplet cfg_v() const;
    // Residual of the w-equation of the coupled system at (x, t).
    double coupled_residual(const Vec3& x, double t) const;
    double residual_u(const Vec3& x, double t) const;
    double residual_v(const Vec3& x, double t) const;
};

ManufacturedPair manufacture_identity_pair(const ProbeSubdomain& sub, const ScalarField& base_u, const FluxMap& F,
                                           const StateMap& H, double mu, const PairSettings& settings);

// Affine velocity c(X) = c0 + A X in global coordinates.
struct VelocityField {
    Vec3 c0 = Vec3::Zero();
    Mat3 A = Mat3::Zero();
    int dim = 2;
};

ConfigTriplet rdc_to_balance(const VelocityField& c, const SourceMap& R, double mu, Holder flux_holder = {0.5, 10.0});

struct SamplingDomain {
    int dim = 2;
    std::function<Vec3(double, double, double)> map;  // unit cube -> x
    double t_lo = 0.0, t_hi = 1.0;
    double z_lo = -1.0, z_hi = 1.0;
    double p_radius = 1.0;
};

SamplingDomain box_domain(int dim, double lo, double hi, double t_lo, double t_hi, double z_lo, double z_hi,
                          double p_radius);
SamplingDomain subdomain_domain(const ProbeSubdomain& sub, double t_lo, double t_hi, double z_lo, double z_hi,
                                double p_radius);

struct ConditionReport {
    std::string name;
    double alpha = 0.0;
    double declared_C = 0.0;
    double worst_quotient = 0.0;
    std::string worst_slot;
    double sup_abs = 0.0;
    bool pass = true;
};

struct AdmissibilityReport {
    std::vector<ConditionReport> conditions;
    bool pass = true;
    const ConditionReport* find(const std::string& name) const;
};

AdmissibilityReport validate_admissibility(const ConfigTriplet& cfg, int samples, const SamplingDomain& dom,
                                           std::uint64_t seed = 1);
// Unit-box domain with states in [-1, 1].
AdmissibilityReport validate_admissibility(const ConfigTriplet& cfg, int samples, std::uint64_t seed = 1);

struct HypothesisReport {
    AdmissibilityReport cfg_u, cfg_v;
    std::vector<ConditionReport> regularity;  // C^{1,alpha4} quotients of u and v
    double lateral_w = 0.0;                   // max |w| on the lateral boundary
    double lateral_dnw = 0.0;                 // max |d_nu w - h|
    double lateral_balance = 0.0;             // max |nu.(F'-G') - mu h|
    double h_sup = 0.0;
    bool lateral_pass = true;
    bool pass = true;
    std::string failure;  // first failing condition
};

HypothesisReport validate_pair(const ManufacturedPair& pair, double T1, double T2, int samples,
                               std::uint64_t seed = 1);

}  // namespace thinprobe
