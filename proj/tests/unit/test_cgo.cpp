#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thinprobe/cgo.hpp"
#include "thinprobe/errors.hpp"

using namespace thinprobe;

namespace {
const double r2 = 1.0 / std::sqrt(2.0);

cplx dot(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
}  // namespace

TEST(MakeCgo, UnitParametersGiveRhoDotRhoMinusLambda) {
    const CgoParams p = make_cgo(1.0, 1.0, 1.0, {-r2, -r2});
    EXPECT_NEAR(std::abs(p.rho_dot_rho() + 1.0), 0.0, 4e-15);
    EXPECT_NEAR(p.rho[0].real(), -r2, 1e-15);
    EXPECT_NEAR(p.rho[0].imag(), std::sqrt(2.0) * (-r2), 1e-15);
}

TEST(MakeCgo, PerpendicularDirection2D) {
    const CgoParams p = make_cgo(2.0, 1.0, 1.0, {-0.6, -0.8});
    EXPECT_NEAR(p.d_perp[0], -0.8, 1e-15);
    EXPECT_NEAR(p.d_perp[1], 0.6, 1e-15);
    EXPECT_NEAR(p.d.dot(p.d_perp), 0.0, 1e-15);
}

TEST(MakeCgo, PerpendicularDirection3D) {
    const double c = 1.0 / std::sqrt(3.0);
    const CgoParams p = make_cgo(2.0, 1.0, 1.0, {-c, -c, -c});
    EXPECT_NEAR(p.d_perp[0], -r2, 1e-15);
    EXPECT_NEAR(p.d_perp[1], r2, 1e-15);
    EXPECT_NEAR(p.d_perp[2], 0.0, 1e-15);
    EXPECT_LE(std::abs(p.d.dot(p.d_perp)), 1e-15);
}

TEST(MakeCgo, RejectsBadDirections) {
    EXPECT_THROW(make_cgo(1.0, 1.0, 1.0, {0.6, -0.8}), DomainError);
    EXPECT_THROW(make_cgo(1.0, 1.0, 1.0, {-0.6, -0.6}), DomainError);
    EXPECT_THROW(make_cgo(1.0, 1.0, 1.0, {-1.0}), DomainError);
}

TEST(EvalCgo, OriginIsOne) {
    const CgoValue v = eval_cgo(make_cgo(3.0, 2.0, 0.7, {-0.6, -0.8}), Vec3::Zero(), 0.0);
    EXPECT_EQ(v.u0, cplx(1.0, 0.0));
}

TEST(EvalCgo, OverflowGuard) {
    const CgoParams p = make_cgo(1e4, 1.0, 1.0, {-0.6, -0.8});
    EXPECT_THROW(eval_cgo(p, Vec3(-1.0, -1.0, 0.0), 0.0), OverflowError);
}

TEST(EvalCgoProperty, TimeDerivativeIsLambdaTimesValue) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double lam = 0.1 + 5 * U(rng);
        const CgoParams p = make_cgo(0.5 + 10 * U(rng), lam, 0.2 + 3 * U(rng), {-0.6, -0.8});
        const CgoValue v = eval_cgo(p, Vec3(2 * U(rng) - 1, 2 * U(rng) - 1, 0), U(rng));
        EXPECT_LE(std::abs(v.dt / v.u0 - lam), 1e-13 * lam);
    }
}

TEST(EvalCgoProperty, AnalyticResidualVanishesOverRandomDraws) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const int dim = 2 + i % 2;
        std::vector<double> d(dim);
        double n = 0;
        for (auto& c : d) {
            c = -(0.05 + U(rng));
            n += c * c;
        }
        for (auto& c : d) c /= std::sqrt(n);
        const double lam = 0.1 + 5 * U(rng);
        const CgoParams p = make_cgo(0.5 + 30 * U(rng), lam, 0.1 + 5 * U(rng), d);
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < dim; ++k) x[k] = 2 * U(rng) - 1;
        const double t = U(rng);
        const cplx u0 = eval_cgo(p, x, t).u0;
        ASSERT_LE(std::abs(pde_residual(p, x, t, ResidualMode::analytic)), 1e-12 * std::abs(u0));
        ASSERT_LE(std::abs(dot(p.rho, p.rho) + lam), 1e-12 * std::max(1.0, p.s * p.s));
    }
}

TEST(PdeResidual, FiniteDifferenceIsSecondOrder) {
    const CgoParams p = make_cgo(3.0, 1.5, 0.8, {-0.6, -0.8});
    const Vec3 x(0.1, -0.2, 0.0);
    const double r1 = std::abs(pde_residual(p, x, 0.3, ResidualMode::finite_difference, 1e-2));
    const double r2h = std::abs(pde_residual(p, x, 0.3, ResidualMode::finite_difference, 5e-3));
    EXPECT_NEAR(r1 / r2h, 4.0, 0.1);
}

TEST(PdeResidual, HighFrequencyNearOrigin) {
    const CgoParams p = make_cgo(10.0, 2.0, 0.5, {-r2, -r2});
    const Vec3 x(-0.01, -0.01, 0.0);
    const cplx u0 = eval_cgo(p, x, 0.01).u0;
    EXPECT_LE(std::abs(pde_residual(p, x, 0.01, ResidualMode::analytic)), 1e-12 * std::abs(u0));
}

TEST(Schedule, CaseAFirstBranch) {
    const double a = std::sqrt(0.5);
    const CgoSchedule s = schedule_s(0.01, 0.5, ProbeCase::a, {a, a, a, a}, ProductChoice::theorem);
    EXPECT_EQ(s.branch, 1);
    EXPECT_NEAR(s.cgo_beta, 0.5, 1e-15);
    EXPECT_NEAR(s.s, 10.0, 1e-12);
}

TEST(Schedule, CaseASecondBranch) {
    const double a = std::sqrt(0.5);
    const CgoSchedule s = schedule_s(0.01, 0.8, ProbeCase::a, {a, a, a, a}, ProductChoice::theorem);
    EXPECT_EQ(s.branch, 2);
    EXPECT_NEAR(s.cgo_beta, 0.7, 1e-15);
}

TEST(Schedule, CaseB) {
    const CgoSchedule s = schedule_s(0.01, 1.0, ProbeCase::b, {0.5, 0.5, 0.5, 0.5}, ProductChoice::theorem);
    EXPECT_NEAR(s.cgo_beta, 0.3, 1e-15);
    EXPECT_NEAR(beta_case_b(0.5, 0.5), (1 - 0.25) * 0.5 / 1.25, 1e-15);
}

TEST(Schedule, Errors) {
    const AlphaPack half{0.5, 0.5, 0.5, 0.5};
    EXPECT_THROW(schedule_s(0.1, 1.0, ProbeCase::a, half, ProductChoice::theorem), DomainError);  // s eps > 0.5
    EXPECT_THROW(schedule_s(0.01, 0.2, ProbeCase::b, half, ProductChoice::theorem), DomainError);  // beta > l
    EXPECT_THROW(schedule_s(0.01, 1.3, ProbeCase::a, half, ProductChoice::theorem), DomainError);  // l >= 1 + p
    EXPECT_THROW(schedule_s(0.01, 0.5, ProbeCase::a, {1.0, 0.5, 0.5, 0.5}, ProductChoice::theorem), DomainError);
}

TEST(Schedule, ProductChoiceSelectsTheFactors) {
    const AlphaPack al{0.9, 0.4, 0.5, 0.8};
    EXPECT_DOUBLE_EQ(exponent_product(al, ProductChoice::theorem), 0.4 * 0.5);
    EXPECT_DOUBLE_EQ(exponent_product(al, ProductChoice::proof), 0.5 * 0.8);
}

TEST(ScheduleProperty, BetaBoundsOnGrid) {
    for (int i = 1; i <= 200; ++i) {
        const double p = i / 201.0;
        for (int j = 1; j <= 200; ++j) {
            const double l = (1 + p) * j / 201.0;
            const double b = beta_case_a(l, p);
            ASSERT_LE(b, l + 1e-15) << "l=" << l << " p=" << p;
            ASSERT_LT(b, 1.0) << "l=" << l << " p=" << p;
        }
    }
}
