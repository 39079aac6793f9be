#include "thinprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinprobe/errors.hpp"

namespace thinprobe {

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, double floor) {
    if (xs.size() != ys.size()) throw DomainError("fit_slope: xs and ys differ in length");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < xs.size(); ++i)
        if (ys[i] >= floor && xs[i] > 0 && std::isfinite(ys[i])) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    const size_t n = lx.size();
    if (n < 3)
        throw InsufficientPointsError("fit_slope: " + std::to_string(n) + " usable points above the floor, need 3");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx <= 0) throw InsufficientPointsError("fit_slope: all abscissae coincide");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    f.used = static_cast<int>(n);
    return f;
}

double tau_case_a(double l, double p) {
    switch (case_a_branch(l, p)) {
        case 1: return p * l;
        case 2: return 0.5 * (1.0 - l * (1.0 - p));
        default: return 0.5 * (1.0 - l + p);
    }
}

double tau1(double a, double b) {
    if (!(a > 0 && a < 1 && b > 0 && b < 1)) throw DomainError("tau1: exponents must lie in (0,1)");
    return a * b * b / (1.0 + a * b);
}

double tau1(const AlphaPack& al, Tau1Variant v) {
    return v == Tau1Variant::theorem ? tau1(al.a1, al.a3) : tau1(al.a2, al.a4);
}

ExponentTable make_exponent_table(double l, const AlphaPack& al, ProductChoice product) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ExponentTable t;
    t.l = l;
    t.alphas = al;
    t.product = product;
    t.p = exponent_product(al, product);
    const double pt = exponent_product(al, ProductChoice::theorem), pp = exponent_product(al, ProductChoice::proof);
    auto safe_tau = [&](double p) {
        try {
            return tau_case_a(l, p);
        } catch (const DomainError&) {
            return nan;
        }
    };
    t.tau_theorem = safe_tau(pt);
    t.tau_proof = safe_tau(pp);
    t.tau1_theorem = tau1(al, Tau1Variant::theorem);
    t.tau1_proof = tau1(al, Tau1Variant::proof);
    try {
        t.beta_case_a = beta_case_a(l, t.p);
    } catch (const DomainError&) {
        t.beta_case_a = nan;
    }
    t.beta_case_b = beta_case_b(al.a2, al.a4);
    t.products_differ = pt != pp;
    t.tau1_differ = t.tau1_theorem != t.tau1_proof;
    return t;
}

double flux_gap(const ManufacturedPair& pair, const Vec3& x, double t) {
    const ProbeSubdomain& sub = pair.sub;
    if (!sub.contains(x, 1e-9)) throw DomainError("flux_gap: point lies outside the probe subdomain");
    const Vec3 K = pair.flux_gap_field(x, t);
    if (sub.dim == 2) return std::abs(K[1]);
    if (sub.kind == DomainKind::slab) return std::abs(K[2]);
    return std::hypot(K[0], K[2]);
}

double flux_gap(const ManufacturedPair& pair, const Frame& frame, const Vec3& X, double t) {
    return flux_gap(pair, frame.to_local(X), t);
}

double source_gap(const ManufacturedPair& pair, const Vec3& x, double t) {
    if (!pair.sub.contains(x, 1e-9)) throw DomainError("source_gap: point lies outside the probe subdomain");
    return std::abs(pair.f(x, t) - pair.g(x, t));
}

double source_gap(const ConfigTriplet& c1, const ConfigTriplet& c2, const Vec3& x, double t, double u,
                  const Vec3& grad_u) {
    return std::abs(c1.f.value(x, t, u, grad_u) - c2.f.value(x, t, u, grad_u));
}

TheoremCheck theorem_bound_check(const TermFamily& family, ProbeCase pc, const ExponentTable& ex,
                                 const std::vector<double>& eps_list, const TheoremCheckOptions& opt) {
    if (eps_list.size() < 3) throw DomainError("theorem_bound_check: need at least 3 eps values");
    std::vector<double> eps = eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    TheoremCheck out;
    out.probe_case = pc;
    out.tau = pc == ProbeCase::a ? ex.tau() : ex.tau1_theorem;
    out.beta = pc == ProbeCase::a ? ex.beta_case_a : ex.beta_case_b;
    if (!std::isfinite(out.tau)) throw DomainError("theorem_bound_check: tau undefined for this (l, alphas)");
    for (double e : eps) {
        const TermContext ctx = family(e);
        const HypothesisReport hr = validate_pair(ctx.pair, ctx.T1, ctx.T2, opt.samples, opt.seed);
        if (!hr.pass)
            throw HypothesisError("hypothesis check failed at eps = " + std::to_string(e) + ": " + hr.failure);
        out.hypotheses.push_back(hr);
        const double gap = pc == ProbeCase::a ? flux_gap(ctx.pair, ctx.x0, ctx.t0) : source_gap(ctx.pair, ctx.x0, ctx.t0);
        out.eps.push_back(e);
        out.gaps.push_back(gap);
    }
    out.C = out.gaps.front() / std::pow(out.eps.front(), out.tau);
    out.bound_holds = true;
    for (size_t i = 0; i < out.eps.size(); ++i) {
        out.bounds.push_back(out.C * std::pow(out.eps[i], out.tau));
        if (out.gaps[i] > out.bounds.back() * (1 + 1e-9)) out.bound_holds = false;
    }
    try {
        out.fit = fit_slope(out.eps, out.gaps);
        out.slope_ok = out.fit.slope >= out.tau - opt.slope_tolerance;
    } catch (const InsufficientPointsError&) {
        out.slope_ok = false;
    }
    return out;
}

}  // namespace thinprobe
