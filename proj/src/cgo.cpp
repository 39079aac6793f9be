#include "thinprobe/cgo.hpp"

#include <cmath>
#include <string>

#include "thinprobe/errors.hpp"

namespace thinprobe {

cplx CgoParams::rho_dot_rho() const {
    cplx acc = 0.0;
    for (int k = 0; k < dim; ++k) acc += rho[k] * rho[k];
    return acc;
}

CgoParams make_cgo(double s, double lambda, double mu, const std::vector<double>& d) {
    if (!(s > 0)) throw DomainError("make_cgo: s must be positive");
    if (!(lambda > 0)) throw DomainError("make_cgo: lambda must be positive");
    if (!(mu > 0)) throw DomainError("make_cgo: mu must be positive");
    if (d.size() != 2 && d.size() != 3) throw DomainError("make_cgo: d must have 2 or 3 components");
    CgoParams p;
    p.dim = static_cast<int>(d.size());
    p.s = s;
    p.lambda = lambda;
    p.mu = mu;
    double n2 = 0.0;
    for (size_t k = 0; k < d.size(); ++k) {
        if (!(d[k] < 0)) throw DomainError("make_cgo: direction components must be strictly negative");
        p.d[k] = d[k];
        n2 += d[k] * d[k];
    }
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw DomainError("make_cgo: direction d must be a unit vector");
    p.d_perp = Vec3(p.d[1], -p.d[0], 0.0);
    p.d_perp /= p.d_perp.norm();
    const double k = std::sqrt(s * s + lambda);
    for (int i = 0; i < 3; ++i) p.rho[i] = cplx(s * p.d[i], k * p.d_perp[i]);
    return p;
}

namespace {

cplx exponent(const CgoParams& p, const Vec3& x, double t) {
    cplx rx = 0.0;
    for (int k = 0; k < p.dim; ++k) rx += p.rho[k] * x[k];
    const cplx arg = rx / std::sqrt(p.mu) + p.lambda * t;
    if (!std::isfinite(arg.real()) || !std::isfinite(arg.imag()))
        throw DomainError("eval_cgo: non-finite input");
    if (arg.real() > 700.0)
        throw OverflowError("eval_cgo: exponent real part " + std::to_string(arg.real()) + " exceeds 700");
    return arg;
}

}  // namespace

CgoValue eval_cgo(const CgoParams& p, const Vec3& x, double t) {
    CgoValue v;
    v.u0 = std::exp(exponent(p, x, t));
    const double rs = 1.0 / std::sqrt(p.mu);
    for (int k = 0; k < 3; ++k) v.grad[k] = k < p.dim ? p.rho[k] * rs * v.u0 : cplx(0.0);
    v.dt = p.lambda * v.u0;
    return v;
}

cplx pde_residual(const CgoParams& p, const Vec3& x, double t, ResidualMode mode, double h) {
    if (mode == ResidualMode::analytic) {
        const cplx u0 = eval_cgo(p, x, t).u0;
        return p.lambda * u0 + p.rho_dot_rho() * u0;
    }
    if (!(h > 0)) throw DomainError("pde_residual: finite-difference mode needs h > 0");
    auto u = [&](const Vec3& y, double s) { return eval_cgo(p, y, s).u0; };
    const cplx c = u(x, t);
    cplx lap = 0.0;
    for (int k = 0; k < p.dim; ++k) {
        Vec3 xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        lap += (u(xp, t) - 2.0 * c + u(xm, t)) / (h * h);
    }
    const cplx dt = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
    return dt + p.mu * lap;
}

double exponent_product(const AlphaPack& al, ProductChoice choice) {
    return choice == ProductChoice::theorem ? al.a2 * al.a3 : al.a3 * al.a4;
}

int case_a_branch(double l, double p) {
    if (!(p > 0 && p < 1)) throw DomainError("case a: product p must lie in (0,1)");
    if (!(l > 0 && l < 1 + p)) throw DomainError("case a: l must lie in (0, 1+p)");
    if (l <= 1.0 / (1.0 + p)) return 1;
    if (l < 1.0) return 2;
    return 3;
}

double beta_case_a(double l, double p) {
    switch (case_a_branch(l, p)) {
        case 1: return l;
        case 2: return 0.5 * (1.0 + l * (1.0 - p));
        default: return 0.5 * (1.0 + l - p);
    }
}

double beta_case_b(double a2, double a4) {
    const double q = a2 * a4;
    return (1.0 - q) * a4 / (1.0 + q);
}

CgoSchedule schedule_s(double eps, double l, ProbeCase pc, const AlphaPack& al, ProductChoice choice) {
    if (!(eps > 0)) throw DomainError("schedule_s: eps must be positive");
    if (!(l > 0)) throw DomainError("schedule_s: l must be positive");
    for (double a : {al.a1, al.a2, al.a3, al.a4})
        if (!(a > 0 && a < 1)) throw DomainError("schedule_s: every alpha must lie in (0,1)");
    CgoSchedule sc;
    sc.eps = eps;
    sc.l = l;
    sc.probe_case = pc;
    if (pc == ProbeCase::a) {
        sc.exponent_product = exponent_product(al, choice);
        sc.branch = case_a_branch(l, sc.exponent_product);
        sc.cgo_beta = beta_case_a(l, sc.exponent_product);
    } else {
        sc.exponent_product = al.a2 * al.a4;
        sc.branch = 0;
        sc.cgo_beta = beta_case_b(al.a2, al.a4);
        if (sc.cgo_beta > l) throw DomainError("schedule_s: case b exponent beta exceeds l");
    }
    sc.s = std::pow(eps, -sc.cgo_beta);
    if (sc.s * eps > 0.5)
        throw DomainError("schedule_s: s*eps = " + std::to_string(sc.s * eps) + " exceeds 0.5 (eps too large for beta = " +
                          std::to_string(sc.cgo_beta) + ")");
    return sc;
}

}  // namespace thinprobe
