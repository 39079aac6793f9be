#include "thinprobe/families.hpp"

#include <cmath>

#include "thinprobe/errors.hpp"

namespace thinprobe {

TermFamily make_family(const FamilySpec& spec) {
    if (static_cast<int>(spec.d.size()) != spec.dim)
        throw ConfigError("family '" + spec.name + "': direction d must have dim components");
    const size_t want = spec.dim == 2 ? 3 : 4;
    if (spec.counts.size() != want) throw ConfigError("family '" + spec.name + "': wrong number of quadrature counts");
    const StateMap H = make_state_map(spec.H, spec.H_params, spec.H_holder, spec.H_c1);
    const FluxMap F = make_flux(spec.F, spec.F_params, spec.dim, spec.F_holder);
    return [spec, H, F](double eps) {
        const Curve curve = build_curve(spec.curve, spec.curve_params, eps, spec.L, spec.dim);
        const ProbeSubdomain sub = extract_probe_subdomain(curve, spec.b1, eps, spec.l, spec.dim, spec.kind);
        TermContext ctx;
        ctx.schedule = schedule_s(eps, spec.l, spec.probe_case, spec.alphas, spec.product);
        ctx.cgo = make_cgo(ctx.schedule.s, spec.lambda, spec.mu, spec.d);
        ctx.alphas = spec.alphas;
        const ScalarField base = make_base_field(spec.base_u, spec.base_params, sub);
        ctx.pair = manufacture_identity_pair(sub, base, F, H, spec.mu, spec.settings);
        ctx.T1 = spec.T1;
        ctx.T2 = spec.T1 + std::pow(eps, spec.window_exponent);
        ctx.rule = QuadRule::make(spec.counts);
        ctx.x0 = sub.center();
        ctx.t0 = 0.5 * (ctx.T1 + ctx.T2);
        return ctx;
    };
}

namespace {

FamilySpec sweep_base(const std::string& name) {
    FamilySpec s;
    s.name = name;
    s.l = 1.0;
    s.probe_case = ProbeCase::a;
    s.alphas = {0.9, 0.95, 0.95, 0.95};
    s.window_exponent = 1.0;
    s.counts = {17, 17, 9};
    return s;
}

}  // namespace

FamilySpec family_preset(const std::string& name) {
    if (name == "I3-source") {
        FamilySpec s = sweep_base(name);
        s.settings.q = 2.0;
        s.settings.profile = TransverseProfile::bubble;
        s.settings.psi = AlongProfile::ramp;
        s.settings.drift = 1.0;
        return s;
    }
    if (name == "I5-cubic") {
        FamilySpec s = sweep_base(name);
        s.H = "cubic-with-floor";
        s.H_params = {1.0};
        s.H_c1 = true;
        s.settings.q = 1.0 + s.alphas.a4;
        s.settings.profile = TransverseProfile::bubble;
        s.settings.psi = AlongProfile::decay;
        return s;
    }
    if (name == "I43-flux") {
        FamilySpec s = sweep_base(name);
        const double delta = 0.1;
        s.settings.q = 1.0;
        s.settings.amplitude = -delta / s.mu;
        s.settings.profile = TransverseProfile::wave;
        s.settings.psi = AlongProfile::bump;
        return s;
    }
    if (name == "theorem-b") {
        FamilySpec s;
        s.name = name;
        s.l = 1.0;
        s.probe_case = ProbeCase::b;
        s.alphas = {0.5, 0.5, 0.5, 0.5};
        s.base_u = "slow";
        s.H = "cubic-with-floor";
        s.H_params = {1.0};
        s.H_c1 = true;
        s.H_holder = {0.5, 40.0};
        s.settings.q = 2.5;
        s.settings.profile = TransverseProfile::quartic;
        s.settings.psi = AlongProfile::one;
        s.settings.gradient_flux_gap = false;
        s.settings.source_holder = {0.5, 40.0};
        s.settings.solution_holder = {0.5, 10.0};
        return s;
    }
    if (name == "theorem-a") {
        FamilySpec s;
        s.name = name;
        s.l = 0.5;
        s.probe_case = ProbeCase::a;
        const double a = std::sqrt(0.5);
        s.alphas = {a, a, a, a};
        s.base_u = "slow";
        s.settings.q = 1.4;
        s.settings.amplitude = 0.2;
        s.settings.profile = TransverseProfile::wave;
        s.settings.psi = AlongProfile::one;
        s.F_holder = {a, 10.0};
        s.settings.source_holder = {a, 10.0};
        s.settings.solution_holder = {a, 10.0};
        return s;
    }
    if (name == "adversarial") {
        FamilySpec s = family_preset("theorem-a");
        s.name = name;
        s.settings.raw_flux_gap = 0.5;
        return s;
    }
    throw ConfigError("unknown family preset '" + name + "'");
}

std::vector<std::string> family_preset_names() {
    return {"I3-source", "I5-cubic", "I43-flux", "theorem-a", "theorem-b", "adversarial"};
}

}  // namespace thinprobe
