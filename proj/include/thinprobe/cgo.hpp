#pragma once

#include <array>
#include <complex>
#include <vector>

#include "thinprobe/jet.hpp"

namespace thinprobe {

using cplx = std::complex<double>;
using CVec3 = std::array<cplx, 3>;

struct CgoParams {
    int dim = 2;
    double s = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    Vec3 d = Vec3::Zero();
    Vec3 d_perp = Vec3::Zero();
    CVec3 rho{};

    // Complex dot product without conjugation.
    cplx rho_dot_rho() const;
};

// d must be a unit vector with strictly negative components (length 2 or 3).
CgoParams make_cgo(double s, double lambda, double mu, const std::vector<double>& d);

struct CgoValue {
    cplx u0;
    CVec3 grad;
    cplx dt;
};

CgoValue eval_cgo(const CgoParams& p, const Vec3& x, double t);

enum class ResidualMode { analytic, finite_difference };

// (d/dt + mu Laplacian) u0 at (x, t).
cplx pde_residual(const CgoParams& p, const Vec3& x, double t, ResidualMode mode, double h = 0.0);

enum class ProbeCase { a, b };
enum class ProductChoice { theorem, proof };

struct AlphaPack {
    double a1 = 0.5, a2 = 0.5, a3 = 0.5, a4 = 0.5;
};

// alpha-product used by case a: theorem statement uses a2*a3, the proof a3*a4.
double exponent_product(const AlphaPack& al, ProductChoice choice);

int case_a_branch(double l, double p);
double beta_case_a(double l, double p);
double beta_case_b(double a2, double a4);

struct CgoSchedule {
    double eps = 0.1;
    double l = 1.0;
    double cgo_beta = 0.5;
    double s = 1.0;
    ProbeCase probe_case = ProbeCase::a;
    double exponent_product = 0.5;
    int branch = 1;  // case a branch, 0 for case b
};

CgoSchedule schedule_s(double eps, double l, ProbeCase pc, const AlphaPack& alphas, ProductChoice choice);

}  // namespace thinprobe
