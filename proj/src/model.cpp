#include "thinprobe/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "thinprobe/errors.hpp"

namespace thinprobe {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string join_params(const std::vector<double>& p) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << "]";
    return os.str();
}

void expect_params(const std::string& id, const std::vector<double>& p, size_t lo, size_t hi) {
    if (p.size() < lo || p.size() > hi)
        throw ConfigError("'" + id + "' expects " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                          " parameters, got " + join_params(p));
}

}  // namespace

// ---------------------------------------------------------------- H

Jet StateMap::apply(const Jet& z) const {
    if (kind == Kind::identity) return z;
    return cube(z) + delta * z;
}

double StateMap::value(double z) const { return kind == Kind::identity ? z : z * z * z + delta * z; }
double StateMap::deriv(double z) const { return kind == Kind::identity ? 1.0 : 3.0 * z * z + delta; }
double StateMap::deriv2(double z) const { return kind == Kind::identity ? 0.0 : 6.0 * z; }
double StateMap::min_derivative() const { return kind == Kind::identity ? 1.0 : delta; }

double StateMap::invert(double y, double guess) const {
    if (kind == Kind::identity) return y;
    const double tol = 1e-12 * std::max(1.0, std::abs(y));
    double x = guess;
    double r = value(x) - y;
    if (std::abs(r) <= tol) return x;
    // bracket [lo, hi] with H(lo) <= y <= H(hi); H is increasing
    double lo, hi;
    const double hmin = min_derivative();
    if (hmin > 0) {
        const double step = std::abs(r) / hmin;
        lo = r > 0 ? x - step : x;
        hi = r > 0 ? x : x + step;
    } else {
        double step = std::max(1.0, std::abs(x));
        lo = hi = x;
        while (value(lo) > y) lo -= (step *= 2.0);
        step = std::max(1.0, std::abs(x));
        while (value(hi) < y) hi += (step *= 2.0);
    }
    for (int it = 0; it < 50; ++it) {
        const double dp = deriv(x);
        double xn = dp > 0 ? x - r / dp : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        r = value(x) - y;
        if (std::abs(r) <= tol) return x;
        if (r > 0)
            hi = x;
        else
            lo = x;
    }
    throw SolverError("H inversion did not converge in 50 iterations (target " + std::to_string(y) + ")");
}

StateMap make_state_map(const std::string& id, const std::vector<double>& params, Holder holder, bool c1_class) {
    StateMap H;
    H.id = id;
    H.holder = holder;
    H.c1_class = c1_class;
    if (id == "identity") {
        expect_params(id, params, 0, 0);
        H.kind = StateMap::Kind::identity;
    } else if (id == "cubic-with-floor") {
        expect_params(id, params, 1, 1);
        if (params[0] < 0) throw ConfigError("cubic-with-floor: floor delta must be >= 0");
        H.kind = StateMap::Kind::cubic_floor;
        H.delta = params[0];
    } else {
        throw ConfigError("unknown H registry id '" + id + "'");
    }
    return H;
}

// ---------------------------------------------------------------- F

JetVec FluxMap::eval(const JetPoint& X, const Jet& z) const {
    JetVec out{Jet(0.0), Jet(0.0), Jet(0.0)};
    switch (kind) {
        case Kind::constant_advection:
            for (int k = 0; k < dim; ++k) out[k] = c0[k] * z;
            break;
        case Kind::rotational_advection:
            out[0] = -scale * X.x[1] * z;
            out[1] = scale * X.x[0] * z;
            break;
        case Kind::burgers_like:
            out[0] = 0.5 * scale * z * z;
            break;
        case Kind::space_modulated: {
            const Jet m = 1.0 + amp * sin(wavenumber * X.x[0]);
            for (int k = 0; k < dim; ++k) out[k] = c0[k] * m * z;
            break;
        }
        case Kind::affine_advection:
            for (int k = 0; k < dim; ++k) {
                Jet c = c0[k];
                for (int j = 0; j < dim; ++j) c += A(k, j) * X.x[j];
                out[k] = c * z;
            }
            break;
    }
    return out;
}

Vec3 FluxMap::value(const Vec3& X, double t, double z) const { return values_of(eval(constant_point(X, t), z)); }

FluxMap make_flux(const std::string& id, const std::vector<double>& params, int dim, Holder holder) {
    if (dim != 2 && dim != 3) throw DomainError("flux dimension must be 2 or 3");
    FluxMap F;
    F.id = id;
    F.dim = dim;
    F.params = params;
    F.holder = holder;
    const size_t d = static_cast<size_t>(dim);
    if (id == "constant-advection") {
        expect_params(id, params, d, d);
        F.kind = FluxMap::Kind::constant_advection;
        for (int k = 0; k < dim; ++k) F.c0[k] = params[k];
    } else if (id == "rotational-advection") {
        expect_params(id, params, 1, 1);
        F.kind = FluxMap::Kind::rotational_advection;
        F.scale = params[0];
    } else if (id == "burgers-like") {
        expect_params(id, params, 0, 1);
        F.kind = FluxMap::Kind::burgers_like;
        F.scale = params.empty() ? 1.0 : params[0];
    } else if (id == "space-modulated") {
        expect_params(id, params, d + 2, d + 2);
        F.kind = FluxMap::Kind::space_modulated;
        for (int k = 0; k < dim; ++k) F.c0[k] = params[k];
        F.amp = params[d];
        F.wavenumber = params[d + 1];
    } else if (id == "zero") {
        expect_params(id, params, 0, 0);
        F.kind = FluxMap::Kind::constant_advection;
    } else {
        throw ConfigError("unknown F registry id '" + id + "'");
    }
    return F;
}

// ---------------------------------------------------------------- rotated flux

JetVec RotatedFlux::eval(const JetPoint& x, const Jet& z) const {
    const Mat3& R = frame.R;
    const int n = base.dim;
    JetPoint X;
    X.t = x.t;
    for (int i = 0; i < 3; ++i) {
        Jet acc = frame.translation[i];
        for (int j = 0; j < n; ++j) acc += R(j, i) * x.x[j];
        X.x[i] = i < n ? acc : Jet(0.0);
    }
    const JetVec F = base.eval(X, z);
    JetVec out{Jet(0.0), Jet(0.0), Jet(0.0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += R(i, j) * F[j];
    return out;
}

Vec3 RotatedFlux::base_value(const Vec3& x, double t, double z) const {
    return values_of(eval(constant_point(x, t), Jet(z)));
}

Vec3 RotatedFlux::value(const Vec3& x, double t, double z) const {
    Vec3 v = base_value(x, t, z);
    for (const auto& off : offsets) v += off.value(x, t);
    return v;
}

double RotatedFlux::explicit_divergence(const Vec3& x, double t, double z) const {
    double div = 0.0;
    for (int k = 0; k < dim(); ++k) div += eval(seeded_point(x, t, k), Jet(z))[k].d;
    for (const auto& off : offsets) div += off.divergence(x, t);
    return div;
}

Vec3 RotatedFlux::dz(const Vec3& x, double t, double z) const {
    return firsts_of(eval(constant_point(x, t), Jet::seed(z)));
}

double RotatedFlux::divergence_along(const Vec3& x, double t, double u, const Vec3& grad_u) const {
    return explicit_divergence(x, t, u) + dz(x, t, u).dot(grad_u);
}

RotatedFlux rotate_flux(const FluxMap& F, const Frame& frame) {
    if (F.dim != frame.dim)
        throw DomainError("rotate_flux: flux is " + std::to_string(F.dim) + "D but frame is " +
                          std::to_string(frame.dim) + "D");
    RotatedFlux r;
    r.base = F;
    r.frame = frame;
    return r;
}

// ---------------------------------------------------------------- f

double SourceMap::reaction(const Vec3& x, double t, double z, const Vec3& p) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::logistic: return params.empty() ? z * (1.0 - z) : params[0] * z * (1.0 - z);
        case Kind::gradient_quadratic: return params[0] * p.squaredNorm();
        case Kind::custom: return custom(x, t, z, p);
    }
    return 0.0;
}

double SourceMap::value(const Vec3& x, double t, double z, const Vec3& p) const {
    const double r = reaction(x, t, z, p);
    return forcing ? r + forcing(x, t) : r;
}

SourceMap make_source(const std::string& id, const std::vector<double>& params, Holder holder) {
    SourceMap f;
    f.id = id;
    f.params = params;
    f.holder = holder;
    if (id == "zero") {
        expect_params(id, params, 0, 0);
        f.kind = SourceMap::Kind::zero;
    } else if (id == "logistic") {
        expect_params(id, params, 0, 1);
        f.kind = SourceMap::Kind::logistic;
    } else if (id == "gradient-quadratic") {
        expect_params(id, params, 1, 1);
        f.kind = SourceMap::Kind::gradient_quadratic;
    } else {
        throw ConfigError("unknown f registry id '" + id + "'");
    }
    return f;
}

ConfigTriplet make_config(const StateMap& H, const FluxMap& F, const SourceMap& f, double mu) {
    if (!(mu > 0)) throw DomainError("mu must be positive");
    Frame id;
    id.dim = F.dim;
    return {H, rotate_flux(F, id), f, mu};
}

ConfigTriplet in_frame(ConfigTriplet cfg, const Frame& frame) {
    if (!cfg.F.offsets.empty()) throw DomainError("in_frame: flux already carries local offsets");
    cfg.F = rotate_flux(cfg.F.base, frame);
    return cfg;
}

// ---------------------------------------------------------------- fields

FieldDerivs ScalarField::derivs(const Vec3& x, double t, int dim) const {
    FieldDerivs out;
    for (int k = 0; k < dim; ++k) {
        const Jet j = fn_(seeded_point(x, t, k));
        out.v = j.v;
        out.grad[k] = j.d;
        out.lap += j.dd;
    }
    out.dt = fn_(seeded_point(x, t, 3)).d;
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return ScalarField([a, b](const JetPoint& p) { return a(p) - b(p); });
}

namespace {

struct Mapped {
    Jet along, eta, xi;
};

Mapped mapped_coords(const ProbeSubdomain& sub, const JetPoint& p) {
    const Jet& a = p.x[sub.along_axis()];
    Mapped m{a, (p.x[sub.trans_axis()] - sub.graph.eval(a)) / sub.eps, Jet(0.0)};
    if (sub.dim == 3) m.xi = p.x[sub.cross_axis()] / sub.eps;
    return m;
}

Jet profile_jet(TransverseProfile prof, const Jet& e) {
    switch (prof) {
        case TransverseProfile::bubble: return e * (1.0 - e);
        case TransverseProfile::quartic: return square(e * (1.0 - e));
        case TransverseProfile::wave: return sin(2.0 * kPi * e) / (2.0 * kPi);
    }
    return Jet(0.0);
}

}  // namespace

ScalarField make_base_field(const std::string& id, const std::vector<double>& params, const ProbeSubdomain& sub) {
    if (id == "trig") {
        expect_params(id, params, 0, 0);
        return ScalarField([sub](const JetPoint& p) {
            const Mapped m = mapped_coords(sub, p);
            Jet u = exp(-p.t) * sin(kPi * m.along) * cos(kPi * m.eta);
            if (sub.dim == 3) u = u * (1.0 + 0.5 * m.xi);
            return u;
        });
    }
    if (id == "smooth") {
        expect_params(id, params, 0, 0);
        return ScalarField([sub](const JetPoint& p) {
            const Mapped m = mapped_coords(sub, p);
            return exp(-p.t) * (1.0 + m.along) * cos(kPi * m.eta);
        });
    }
    if (id == "heat") {
        expect_params(id, params, 1, 1);
        const double rate = kPi * kPi * params[0] / (sub.eps * sub.eps);
        return ScalarField([sub, rate](const JetPoint& p) {
            const Mapped m = mapped_coords(sub, p);
            return exp(-rate * p.t) * sin(kPi * m.eta);
        });
    }
    if (id == "slow") {
        // No eps-scale variation: derivatives stay bounded as the strip thins.
        expect_params(id, params, 0, 0);
        return ScalarField([sub](const JetPoint& p) {
            const Jet& a = p.x[sub.along_axis()];
            const Jet& b = p.x[sub.trans_axis()];
            return exp(-p.t) * (1.0 + 0.25 * sin(a) + 0.25 * b);
        });
    }
    if (id == "constant") {
        expect_params(id, params, 1, 1);
        const double c = params[0];
        return ScalarField([c](const JetPoint&) { return Jet(c); });
    }
    throw ConfigError("unknown base field '" + id + "'");
}

SpaceTimeFn mms_source(const ScalarField& u, const StateMap& H, const RotatedFlux& F, double mu, int dim) {
    return [u, H, F, mu, dim](const Vec3& x, double t) {
        const FieldDerivs d = u.derivs(x, t, dim);
        return H.deriv(d.v) * d.dt + F.divergence_along(x, t, d.v, d.grad) - mu * d.lap;
    };
}

SpaceTimeFn mms_forcing(const ScalarField& u, const ConfigTriplet& cfg) {
    const SpaceTimeFn full = mms_source(u, cfg.H, cfg.F, cfg.mu, cfg.dim());
    const SourceMap f = cfg.f;
    const int n = cfg.dim();
    return [full, f, u, n](const Vec3& x, double t) {
        const FieldDerivs d = u.derivs(x, t, n);
        return full(x, t) - f.reaction(x, t, d.v, d.grad);
    };
}

TransverseProfile profile_from_name(const std::string& s) {
    if (s == "bubble") return TransverseProfile::bubble;
    if (s == "quartic") return TransverseProfile::quartic;
    if (s == "wave") return TransverseProfile::wave;
    throw ConfigError("unknown transverse profile '" + s + "'");
}

AlongProfile psi_from_name(const std::string& s) {
    if (s == "one") return AlongProfile::one;
    if (s == "ramp") return AlongProfile::ramp;
    if (s == "bump") return AlongProfile::bump;
    if (s == "decay") return AlongProfile::decay;
    throw ConfigError("unknown along-curve profile '" + s + "'");
}

std::string profile_name(TransverseProfile p) {
    switch (p) {
        case TransverseProfile::bubble: return "bubble";
        case TransverseProfile::quartic: return "quartic";
        case TransverseProfile::wave: return "wave";
    }
    return "?";
}

std::string psi_name(AlongProfile p) {
    switch (p) {
        case AlongProfile::one: return "one";
        case AlongProfile::ramp: return "ramp";
        case AlongProfile::bump: return "bump";
        case AlongProfile::decay: return "decay";
    }
    return "?";
}

// ---------------------------------------------------------------- manufactured pair

Vec3 ManufacturedPair::flux_gap_field(const Vec3& x, double t) const {
    const double u0 = u.value(x, t);
    return F_prime.value(x, t, u0) - G_prime.value(x, t, u0);
}

double ManufacturedPair::h(const Vec3& x, double t, const Vec3& normal) const {
    return normal.dot(w.derivs(x, t, dim()).grad);
}

PairSample ManufacturedPair::sample(const Vec3& x, double t) const {
    const int n = dim();
    const FieldDerivs U = u.derivs(x, t, n);
    const FieldDerivs W = w.derivs(x, t, n);
    FieldDerivs V;
    V.v = U.v - W.v;
    V.grad = U.grad - W.grad;
    V.lap = U.lap - W.lap;
    V.dt = U.dt - W.dt;
    PairSample s;
    s.w = W.v;
    s.grad_w = W.grad;
    s.D = F_prime.value(x, t, U.v) - G_prime.value(x, t, V.v);
    const double fu = H.deriv(U.v) * U.dt + F_prime.divergence_along(x, t, U.v, U.grad) - mu * U.lap;
    const double gv = H.deriv(V.v) * V.dt + G_prime.divergence_along(x, t, V.v, V.grad) - mu * V.lap;
    s.src_gap = fu - gv;
    s.H_gap = H.value(U.v) - H.value(V.v);
    return s;
}

ConfigTriplet ManufacturedPair::cfg_u() const {
    SourceMap src = make_source("zero", {}, settings.source_holder);
    src.forcing = f;
    return {H, F_prime, src, mu};
}

ConfigTriplet ManufacturedPair::cfg_v() const {
    SourceMap src = make_source("zero", {}, settings.source_holder);
    src.forcing = g;
    return {H, G_prime, src, mu};
}

double ManufacturedPair::residual_u(const Vec3& x, double t) const {
    const FieldDerivs U = u.derivs(x, t, dim());
    return H.deriv(U.v) * U.dt + F_prime.divergence_along(x, t, U.v, U.grad) - mu * U.lap - f(x, t);
}

double ManufacturedPair::residual_v(const Vec3& x, double t) const {
    const FieldDerivs V = v.derivs(x, t, dim());
    return H.deriv(V.v) * V.dt + G_prime.divergence_along(x, t, V.v, V.grad) - mu * V.lap - g(x, t);
}

double ManufacturedPair::coupled_residual(const Vec3& x, double t) const {
    const int n = dim();
    const FieldDerivs U = u.derivs(x, t, n);
    const FieldDerivs V = v.derivs(x, t, n);
    const FieldDerivs W = w.derivs(x, t, n);
    const double dtH = H.deriv(U.v) * U.dt - H.deriv(V.v) * V.dt;
    const double divD = F_prime.divergence_along(x, t, U.v, U.grad) - G_prime.divergence_along(x, t, V.v, V.grad);
    return dtH + divD - mu * W.lap - (f(x, t) - g(x, t));
}

ManufacturedPair manufacture_identity_pair(const ProbeSubdomain& sub, const ScalarField& base_u, const FluxMap& F,
                                           const StateMap& H, double mu, const PairSettings& settings) {
    if (settings.q < 0) throw DomainError("manufacture_identity_pair: amplitude exponent q must be >= 0");
    if (!(mu > 0)) throw DomainError("manufacture_identity_pair: mu must be positive");
    if (F.dim != sub.dim) throw DomainError("manufacture_identity_pair: flux dimension does not match subdomain");

    ManufacturedPair pr;
    pr.sub = sub;
    pr.u = base_u;
    pr.H = H;
    pr.mu = mu;
    pr.settings = settings;

    const double scale = settings.amplitude * std::pow(sub.eps, settings.q);
    const double ext = sub.extent();
    const PairSettings st = settings;
    pr.w = ScalarField([sub, scale, ext, st](const JetPoint& p) {
        const Mapped m = mapped_coords(sub, p);
        Jet psi(1.0);
        switch (st.psi) {
            case AlongProfile::one: break;
            case AlongProfile::ramp: psi = m.along * (ext - m.along); break;
            case AlongProfile::bump: psi = 4.0 * m.along * (ext - m.along) / (ext * ext); break;
            case AlongProfile::decay: psi = exp(-p.t) * 4.0 * m.along * (ext - m.along) / (ext * ext); break;
        }
        Jet w = scale * psi * profile_jet(st.profile, m.eta);
        if (sub.dim == 3) {
            if (sub.kind == DomainKind::nozzle)
                w = w * (4.0 * m.xi * (1.0 - m.xi));
            else
                w = w * (1.0 + m.xi);
        }
        return w;
    });
    pr.v = pr.u - pr.w;

    pr.F_prime = rotate_flux(F, sub.frame);
    pr.G_prime = pr.F_prime;

    const ScalarField wf = pr.w;
    const int n = sub.dim;
    const int T = sub.trans_axis(), A = sub.along_axis();
    const double kappa = settings.gradient_flux_gap ? 1.0 : 0.0;
    const double drift = settings.drift, raw = settings.raw_flux_gap;
    const LocalGraph graph = sub.graph;
    if (kappa != 0.0 || drift != 0.0 || raw != 0.0) {
        FluxOffset off;
        off.value = [wf, n, T, A, kappa, drift, raw, mu, graph](const Vec3& x, double t) {
            Vec3 K = Vec3::Zero();
            if (kappa != 0.0) K = kappa * mu * wf.derivs(x, t, n).grad;
            if (drift != 0.0) {
                K[A] += drift * x[A];
                K[T] += drift * x[A] * graph.eval(x[A]).g1;
            }
            K[T] += raw;
            return Vec3(-K);
        };
        off.divergence = [wf, n, kappa, drift, mu](const Vec3& x, double t) {
            double d = drift;
            if (kappa != 0.0) d += kappa * mu * wf.derivs(x, t, n).lap;
            return -d;
        };
        pr.G_prime.offsets.push_back(off);
    }
    pr.f = mms_source(pr.u, H, pr.F_prime, mu, n);
    pr.g = mms_source(pr.v, H, pr.G_prime, mu, n);
    return pr;
}

// ---------------------------------------------------------------- RDC mapping

ConfigTriplet rdc_to_balance(const VelocityField& c, const SourceMap& R, double mu, Holder flux_holder) {
    const int n = c.dim;
    if (n != 2 && n != 3) throw DomainError("rdc_to_balance: velocity dimension must be 2 or 3");
    FluxMap F;
    F.dim = n;
    F.holder = flux_holder;
    F.kind = FluxMap::Kind::affine_advection;
    F.id = "affine-advection";
    F.c0 = c.c0;
    F.A = c.A;
    // divergence of c on a sampled grid of [-1, 1]^n, via F = c z at z = 1
    double worst = 0.0;
    const int m = 5;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < (n == 3 ? m : 1); ++k) {
                Vec3 X(-1.0 + 2.0 * i / (m - 1), -1.0 + 2.0 * j / (m - 1), n == 3 ? -1.0 + 2.0 * k / (m - 1) : 0.0);
                double div = 0.0;
                for (int a = 0; a < n; ++a) div += F.eval(seeded_point(X, 0.0, a), Jet(1.0))[a].d;
                worst = std::max(worst, std::abs(div));
            }
    if (worst > 1e-8)
        throw DomainError("rdc_to_balance: velocity field is compressible (max |div c| = " + std::to_string(worst) + ")");

    const Mat3 Ablk = c.A;
    bool linear_zero = Ablk.topLeftCorner(n, n).isZero(0.0);
    if (linear_zero) {
        F.kind = FluxMap::Kind::constant_advection;
        F.id = "constant-advection";
        F.params.assign(c.c0.data(), c.c0.data() + n);
    } else if (c.c0.isZero(0.0) && Ablk(0, 0) == 0.0 && Ablk(1, 1) == 0.0 && Ablk(0, 1) == -Ablk(1, 0)) {
        bool rest_zero = true;
        if (n == 3)
            for (int a = 0; a < 3; ++a) rest_zero = rest_zero && Ablk(2, a) == 0.0 && Ablk(a, 2) == 0.0;
        if (rest_zero) {
            F.kind = FluxMap::Kind::rotational_advection;
            F.id = "rotational-advection";
            F.scale = Ablk(1, 0);
            F.params = {F.scale};
        }
    }
    return make_config(make_state_map("identity", {}, {0.5, 10.0}), F, R, mu);
}

// ---------------------------------------------------------------- admissibility

const ConditionReport* AdmissibilityReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

SamplingDomain box_domain(int dim, double lo, double hi, double t_lo, double t_hi, double z_lo, double z_hi,
                          double p_radius) {
    SamplingDomain d;
    d.dim = dim;
    d.map = [dim, lo, hi](double a, double b, double c) {
        Vec3 x(lo + (hi - lo) * a, lo + (hi - lo) * b, dim == 3 ? lo + (hi - lo) * c : 0.0);
        return x;
    };
    d.t_lo = t_lo;
    d.t_hi = t_hi;
    d.z_lo = z_lo;
    d.z_hi = z_hi;
    d.p_radius = p_radius;
    return d;
}

SamplingDomain subdomain_domain(const ProbeSubdomain& sub, double t_lo, double t_hi, double z_lo, double z_hi,
                                double p_radius) {
    SamplingDomain d;
    d.dim = sub.dim;
    const double ext = sub.extent();
    d.map = [sub, ext](double a, double b, double c) { return sub.point(a * ext, b, c); };
    d.t_lo = t_lo;
    d.t_hi = t_hi;
    d.z_lo = z_lo;
    d.z_hi = z_hi;
    d.p_radius = p_radius;
    return d;
}

namespace {

struct SamplePoint {
    Vec3 c;  // unit-cube coordinates
    double t = 0.0, z = 0.0;
    Vec3 p = Vec3::Zero();
};

class PairSampler {
public:
    PairSampler(const SamplingDomain& dom, std::uint64_t seed) : dom_(dom), rng_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    // log-uniform relative offset in [1e-6, 1]
    double offset() { return std::pow(10.0, -6.0 * uniform()); }

    Vec3 direction(int n) {
        std::normal_distribution<double> N(0.0, 1.0);
        Vec3 d = Vec3::Zero();
        for (int k = 0; k < n; ++k) d[k] = N(rng_);
        const double nr = d.norm();
        return nr > 0 ? Vec3(d / nr) : Vec3::UnitX();
    }

    SamplePoint base(int i) {
        SamplePoint s;
        for (int k = 0; k < 3; ++k) s.c[k] = uniform();
        s.t = dom_.t_lo + (dom_.t_hi - dom_.t_lo) * uniform();
        s.z = dom_.z_lo + (dom_.z_hi - dom_.z_lo) * uniform();
        s.p = dom_.p_radius * std::pow(uniform(), 1.0 / dom_.dim) * direction(dom_.dim);
        // anchored samples: state at zero and points on the domain boundary
        if (i % 4 == 1 && dom_.z_lo <= 0.0 && dom_.z_hi >= 0.0) s.z = 0.0;
        if (i % 4 == 2) s.c[static_cast<int>(uniform() * dom_.dim) % dom_.dim] = uniform() < 0.5 ? 0.0 : 1.0;
        if (i % 4 == 3) s.p = Vec3::Zero();
        return s;
    }

    Vec3 x(const SamplePoint& s) const { return dom_.map(s.c[0], s.c[1], s.c[2]); }

    // Perturbs one slot; returns the Hoelder distance (already raised to alpha).
    double perturb(const SamplePoint& s, SamplePoint& q, const std::string& slot, double alpha) {
        q = s;
        const double r = offset();
        if (slot == "x") {
            const Vec3 dir = direction(dom_.dim);
            for (int k = 0; k < dom_.dim; ++k) q.c[k] = std::clamp(s.c[k] + r * dir[k], 0.0, 1.0);
            return std::pow((x(s) - x(q)).norm(), alpha);
        }
        if (slot == "t") {
            const double span = dom_.t_hi - dom_.t_lo;
            q.t = std::clamp(s.t + (uniform() < 0.5 ? -r : r) * span, dom_.t_lo, dom_.t_hi);
            return std::pow(std::abs(q.t - s.t), 0.5 * alpha);
        }
        if (slot == "z") {
            const double span = dom_.z_hi - dom_.z_lo;
            q.z = std::clamp(s.z + (uniform() < 0.5 ? -r : r) * span, dom_.z_lo, dom_.z_hi);
            return std::pow(std::abs(q.z - s.z), alpha);
        }
        const Vec3 dir = direction(dom_.dim);
        q.p = s.p + r * std::max(dom_.p_radius, 1e-12) * dir;
        return std::pow((q.p - s.p).norm(), alpha);
    }

    const SamplingDomain& dom() const { return dom_; }

private:
    SamplingDomain dom_;
    std::mt19937_64 rng_;
};

using PointFn = std::function<double(const Vec3& x, const SamplePoint& s)>;

void probe_slots(PairSampler& S, int samples, const std::vector<std::string>& slots, const std::vector<PointFn>& fns,
                 double alpha, ConditionReport& rep) {
    for (const auto& slot : slots) {
        for (int i = 0; i < samples; ++i) {
            const SamplePoint a = S.base(i);
            SamplePoint b;
            const double dist = S.perturb(a, b, slot, alpha);
            const Vec3 xa = S.x(a), xb = S.x(b);
            for (const auto& fn : fns) {
                const double fa = fn(xa, a), fb = fn(xb, b);
                rep.sup_abs = std::max({rep.sup_abs, std::abs(fa), std::abs(fb)});
                if (dist <= 0.0) continue;
                const double qv = std::abs(fa - fb) / dist;
                if (qv > rep.worst_quotient) {
                    rep.worst_quotient = qv;
                    rep.worst_slot = slot;
                }
            }
        }
    }
    rep.pass = rep.worst_quotient <= rep.declared_C * (1.0 + 1e-6) && rep.sup_abs <= rep.declared_C * (1.0 + 1e-6) &&
               std::isfinite(rep.worst_quotient) && std::isfinite(rep.sup_abs);
}

}  // namespace

AdmissibilityReport validate_admissibility(const ConfigTriplet& cfg, int samples, const SamplingDomain& dom,
                                           std::uint64_t seed) {
    if (samples < 100) throw DomainError("validate_admissibility: needs at least 100 samples");
    AdmissibilityReport out;
    PairSampler S(dom, seed);

    ConditionReport h{"H", cfg.H.holder.alpha, cfg.H.holder.C, 0.0, "", 0.0, true};
    const StateMap H = cfg.H;
    std::vector<PointFn> hfns{[H](const Vec3&, const SamplePoint& s) { return H.value(s.z); }};
    if (H.c1_class) hfns.push_back([H](const Vec3&, const SamplePoint& s) { return H.deriv(s.z); });
    // the Hoelder quotient of the C^1 class is taken on H' only
    if (H.c1_class) {
        ConditionReport sup_only = h;
        probe_slots(S, samples, {"z"}, {hfns[0]}, h.alpha, sup_only);
        probe_slots(S, samples, {"z"}, {hfns[1]}, h.alpha, h);
        h.sup_abs = std::max(h.sup_abs, sup_only.sup_abs);
        h.pass = h.worst_quotient <= h.declared_C * (1.0 + 1e-6) && h.sup_abs <= h.declared_C * (1.0 + 1e-6);
    } else {
        probe_slots(S, samples, {"z"}, hfns, h.alpha, h);
    }
    out.conditions.push_back(h);

    ConditionReport fr{"f", cfg.f.holder.alpha, cfg.f.holder.C, 0.0, "", 0.0, true};
    const SourceMap f = cfg.f;
    probe_slots(S, samples, {"x", "t", "z", "p"},
                {[f](const Vec3& x, const SamplePoint& s) { return f.value(x, s.t, s.z, s.p); }}, fr.alpha, fr);
    out.conditions.push_back(fr);

    ConditionReport Fr{"F", cfg.F.base.holder.alpha, cfg.F.base.holder.C, 0.0, "", 0.0, true};
    std::vector<PointFn> comps;
    const RotatedFlux F = cfg.F;
    for (int k = 0; k < F.dim(); ++k)
        comps.push_back([F, k](const Vec3& x, const SamplePoint& s) { return F.value(x, s.t, s.z)[k]; });
    probe_slots(S, samples, {"x", "t", "z"}, comps, Fr.alpha, Fr);
    out.conditions.push_back(Fr);

    for (const auto& c : out.conditions) out.pass = out.pass && c.pass;
    return out;
}

AdmissibilityReport validate_admissibility(const ConfigTriplet& cfg, int samples, std::uint64_t seed) {
    return validate_admissibility(cfg, samples, box_domain(cfg.dim(), 0.0, 1.0, 0.0, 1.0, -1.0, 1.0, 1.0), seed);
}

HypothesisReport validate_pair(const ManufacturedPair& pair, double T1, double T2, int samples, std::uint64_t seed) {
    HypothesisReport rep;
    const ProbeSubdomain& sub = pair.sub;
    const int n = sub.dim;

    // state range and gradient radius from a coarse space-time scan
    double zmin = 1e300, zmax = -1e300, prad = 0.0, wsup = 0.0;
    const std::vector<int> counts = n == 2 ? std::vector<int>{9, 9} : std::vector<int>{5, 5, 5};
    const VolumeNodes vol = volume_nodes(sub, counts);
    for (double t : {T1, 0.5 * (T1 + T2), T2})
        for (const Vec3& x : vol.nodes) {
            const FieldDerivs U = pair.u.derivs(x, t, n), V = pair.v.derivs(x, t, n);
            zmin = std::min({zmin, U.v, V.v});
            zmax = std::max({zmax, U.v, V.v});
            prad = std::max({prad, U.grad.norm(), V.grad.norm()});
            wsup = std::max(wsup, std::abs(U.v - V.v));
        }
    const double margin = 0.1 * std::max(1.0, zmax - zmin);
    const SamplingDomain dom = subdomain_domain(sub, T1, T2, zmin - margin, zmax + margin, 1.1 * prad + 1e-12);
    rep.cfg_u = validate_admissibility(pair.cfg_u(), samples, dom, seed);
    rep.cfg_v = validate_admissibility(pair.cfg_v(), samples, dom, seed + 1);

    // C^{1,alpha4} quotients of the solutions
    const Holder sol = pair.settings.solution_holder;
    PairSampler S(dom, seed + 2);
    for (const auto& [name, field] : {std::pair<std::string, const ScalarField*>{"u", &pair.u}, {"v", &pair.v}}) {
        ConditionReport c{"C1a(" + name + ")", sol.alpha, sol.C, 0.0, "", 0.0, true};
        const ScalarField* fp = field;
        std::vector<PointFn> fns{[fp](const Vec3& x, const SamplePoint& s) { return fp->value(x, s.t); }};
        for (int k = 0; k < n; ++k)
            fns.push_back([fp, k, n](const Vec3& x, const SamplePoint& s) { return fp->derivs(x, s.t, n).grad[k]; });
        // quotient only on the gradient components; sup on everything
        ConditionReport sup_only = c;
        probe_slots(S, samples / 4 + 1, {"x"}, {fns[0]}, sol.alpha, sup_only);
        std::vector<PointFn> grads(fns.begin() + 1, fns.end());
        probe_slots(S, samples, {"x", "t"}, grads, sol.alpha, c);
        c.sup_abs = std::max(c.sup_abs, sup_only.sup_abs);
        c.pass = c.worst_quotient <= c.declared_C * (1.0 + 1e-6) && c.sup_abs <= c.declared_C * (1.0 + 1e-6);
        rep.regularity.push_back(c);
    }

    // lateral boundary conditions at quadrature nodes
    std::vector<Piece> lateral;
    if (n == 2)
        lateral = {Piece::G1, Piece::G3};
    else
        lateral = {sub.kind == DomainKind::nozzle ? Piece::Gamma_eps : Piece::Gamma_V};
    double dscale = 0.0;
    for (Piece pc : lateral) {
        const BoundaryNodes bn = boundary_nodes(sub, pc, 9);
        for (double t : {T1, 0.5 * (T1 + T2), T2})
            for (size_t i = 0; i < bn.nodes.size(); ++i) {
                const Vec3& x = bn.nodes[i];
                const PairSample s = pair.sample(x, t);
                const double hv = pair.h(x, t, bn.normals[i]);
                rep.lateral_w = std::max(rep.lateral_w, std::abs(s.w));
                rep.lateral_dnw = std::max(rep.lateral_dnw, std::abs(bn.normals[i].dot(s.grad_w) - hv));
                rep.lateral_balance = std::max(rep.lateral_balance, std::abs(bn.normals[i].dot(s.D) - pair.mu * hv));
                rep.h_sup = std::max(rep.h_sup, std::abs(hv));
                dscale = std::max({dscale, s.D.norm(), pair.mu * std::abs(hv)});
            }
    }
    const double wtol = 1e-12 * std::max(wsup, 1e-300);
    const double ftol = 1e-12 * std::max(dscale, 1e-300);
    rep.lateral_pass = rep.lateral_w <= wtol && rep.lateral_dnw <= 1e-12 * std::max(rep.h_sup, 1e-300) &&
                       rep.lateral_balance <= ftol;

    auto first_fail = [&](const AdmissibilityReport& a, const std::string& who) {
        for (const auto& c : a.conditions)
            if (!c.pass) return who + ":" + c.name;
        return std::string();
    };
    rep.failure = first_fail(rep.cfg_u, "cfg_u");
    if (rep.failure.empty()) rep.failure = first_fail(rep.cfg_v, "cfg_v");
    if (rep.failure.empty())
        for (const auto& c : rep.regularity)
            if (!c.pass) {
                rep.failure = c.name;
                break;
            }
    if (rep.failure.empty() && !rep.lateral_pass) {
        if (rep.lateral_w > wtol)
            rep.failure = "lateral: w != 0";
        else if (rep.lateral_balance > ftol)
            rep.failure = "lateral: flux balance";
        else
            rep.failure = "lateral: normal derivative";
    }
    rep.pass = rep.failure.empty();
    return rep;
}

}  // namespace thinprobe
