#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thinprobe/errors.hpp"
#include "thinprobe/families.hpp"
#include "thinprobe/probe.hpp"

using namespace thinprobe;

namespace {
const std::vector<double> kEps{0.2, 0.1, 0.05, 0.025};

ManufacturedPair pair_for(FamilySpec sp, double eps = 0.1) { return make_family(sp)(eps).pair; }
}  // namespace

TEST(FitSlope, ExactPowerLaw) {
    const std::vector<double> x{0.2, 0.1, 0.05, 0.025};
    std::vector<double> y;
    for (double e : x) y.push_back(3.0 * std::pow(e, 2.5));
    const SlopeFit f = fit_slope(x, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_EQ(f.used, 4);
}

TEST(FitSlope, FloorDropsPointsAndNeedsThree) {
    const std::vector<double> x{0.2, 0.1, 0.05, 0.025};
    const SlopeFit f = fit_slope(x, {4e-2, 1e-2, 2.5e-3, 0.0});
    EXPECT_EQ(f.used, 3);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_THROW(fit_slope(x, {1e-2, 1e-3, 0.0, 0.0}), InsufficientPointsError);
}

TEST(Tau, CaseABranchValues) {
    EXPECT_NEAR(tau_case_a(0.5, 0.5), 0.25, 1e-15);
    EXPECT_NEAR(tau_case_a(0.8, 0.5), 0.3, 1e-15);
    EXPECT_NEAR(tau_case_a(1.2, 0.5), 0.15, 1e-15);
}

TEST(Tau, FirstVariantValues) {
    EXPECT_NEAR(tau1(0.5, 0.5), 0.1, 1e-15);
    const AlphaPack half{0.5, 0.5, 0.5, 0.5};
    EXPECT_NEAR(tau1(half, Tau1Variant::theorem), 0.1, 1e-15);
    EXPECT_NEAR(tau1(half, Tau1Variant::proof), 0.1, 1e-15);
    const AlphaPack mixed{0.9, 0.4, 0.5, 0.8};
    EXPECT_NEAR(tau1(mixed, Tau1Variant::theorem), tau1(0.9, 0.5), 1e-15);
    EXPECT_NEAR(tau1(mixed, Tau1Variant::proof), tau1(0.4, 0.8), 1e-15);
}

TEST(TauProperty, ContinuousAtBranchPointsAndDecreasingInL) {
    for (int i = 1; i < 200; ++i) {
        const double p = i / 200.0;
        const double l1 = 1.0 / (1.0 + p);
        EXPECT_NEAR(tau_case_a(l1 - 1e-12, p), p / (1 + p), 1e-10);
        EXPECT_NEAR(tau_case_a(l1 + 1e-12, p), p / (1 + p), 1e-10);
        EXPECT_NEAR(tau_case_a(1.0 - 1e-12, p), p / 2, 1e-10);
        EXPECT_NEAR(tau_case_a(1.0 + 1e-12, p), p / 2, 1e-10);
        double prev = tau_case_a(l1, p);
        for (int j = 1; j < 50; ++j) {
            const double l = l1 + (1 + p - l1) * j / 50.0;
            const double t = tau_case_a(l, p);
            EXPECT_LE(t, prev + 1e-15);
            prev = t;
        }
        for (int j = 1; j < 20; ++j) {
            const double l = l1 * j / 20.0;
            EXPECT_NEAR(tau_case_a(l, p), p * beta_case_a(l, p), 1e-15);
        }
    }
}

TEST(ExponentTable, FlagsDisagreeingProducts) {
    const ExponentTable t = make_exponent_table(0.5, {0.9, 0.4, 0.5, 0.8}, ProductChoice::theorem);
    EXPECT_TRUE(t.products_differ);
    EXPECT_TRUE(t.tau1_differ);
    EXPECT_NEAR(t.tau_theorem, 0.2 * 0.5, 1e-15);
    EXPECT_NEAR(t.tau_proof, 0.4 * 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(t.tau(), t.tau_theorem);
}

TEST(FluxGap, ZeroWithoutGap) {
    FamilySpec sp;
    sp.settings.amplitude = 0.0;
    const ManufacturedPair pr = pair_for(sp);
    EXPECT_EQ(flux_gap(pr, pr.sub.center(), 0.005), 0.0);
}

TEST(FluxGap, TwoDimensionalIsViscousTransverseGradient) {
    FamilySpec sp = family_preset("I43-flux");
    const ManufacturedPair pr = pair_for(sp);
    for (const Vec3& x : volume_nodes(pr.sub, {5, 5}).nodes) {
        const double want = std::abs(pr.mu * pr.sample(x, 0.005).grad_w[1]);
        EXPECT_NEAR(flux_gap(pr, x, 0.005), want, 1e-14 + 1e-12 * want);
    }
}

TEST(FluxGap, SlabUsesOnlyTheTransverseComponent) {
    FamilySpec sp;
    sp.dim = 3;
    sp.kind = DomainKind::slab;
    sp.d = {-0.6, -0.6, -0.5291502622129182};
    sp.F_params = {1.0, 0.5, 0.25};
    sp.settings.profile = TransverseProfile::wave;
    sp.settings.psi = AlongProfile::bump;
    sp.counts = {9, 9, 9, 9};
    const ManufacturedPair pr = pair_for(sp);
    const Vec3 x = pr.sub.center();
    const Vec3 K = pr.flux_gap_field(x, 0.005);
    EXPECT_NEAR(flux_gap(pr, x, 0.005), std::abs(K[2]), 1e-15);
    sp.kind = DomainKind::nozzle;
    const ManufacturedPair pn = pair_for(sp);
    const Vec3 Kn = pn.flux_gap_field(pn.sub.center(), 0.005);
    EXPECT_NEAR(flux_gap(pn, pn.sub.center(), 0.005), std::hypot(Kn[0], Kn[2]), 1e-15);
}

TEST(FluxGap, OutsidePointThrows) {
    const ManufacturedPair pr = pair_for(family_preset("I43-flux"));
    EXPECT_THROW(flux_gap(pr, Vec3(0.05, 0.5, 0), 0.005), DomainError);
}

TEST(FluxGapProperty, FrameTranslationInvariance) {
    FamilySpec sp = family_preset("I43-flux");
    sp.curve = "sine";
    sp.curve_params = {0.8, 3.0};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double b1 : {-0.5, 0.0, 0.3}) {
        sp.b1 = b1;
        const ManufacturedPair pr = pair_for(sp);
        for (int i = 0; i < 50; ++i) {
            const Vec3 x = pr.sub.point(U(rng) * pr.sub.extent(), U(rng));
            const Vec3 X = pr.sub.frame.to_global(x);
            EXPECT_NEAR(flux_gap(pr, pr.sub.frame, X, 0.005), flux_gap(pr, x, 0.005), 1e-13);
        }
    }
}

TEST(SourceGap, PairAndConfigurationForms) {
    FamilySpec sp = family_preset("I3-source");
    const ManufacturedPair pr = pair_for(sp);
    const Vec3 x = pr.sub.center();
    EXPECT_NEAR(source_gap(pr, x, 0.005), std::abs(pr.f(x, 0.005) - pr.g(x, 0.005)), 1e-15);

    const ConfigTriplet a = make_config(make_state_map("identity", {}, {}), make_flux("zero", {}, 2, {}),
                                        make_source("logistic", {1.0}, {}), 1.0);
    const ConfigTriplet b = make_config(make_state_map("identity", {}, {}), make_flux("zero", {}, 2, {}),
                                        make_source("logistic", {2.0}, {}), 1.0);
    EXPECT_NEAR(source_gap(a, b, x, 0.0, 0.5, Vec3::Zero()), 0.25, 1e-15);
    EXPECT_EQ(source_gap(a, a, x, 0.0, 0.5, Vec3::Zero()), 0.0);
}

TEST(TheoremCheck, CaseABoundHolds) {
    const FamilySpec sp = family_preset("theorem-a");
    const ExponentTable ex = make_exponent_table(sp.l, sp.alphas, sp.product);
    const TheoremCheck r = theorem_bound_check(make_family(sp), ProbeCase::a, ex, kEps);
    EXPECT_NEAR(r.tau, 0.25, 1e-12);
    EXPECT_NEAR(r.beta, 0.5, 1e-12);
    EXPECT_TRUE(r.bound_holds);
    EXPECT_TRUE(r.slope_ok);
}

TEST(TheoremCheck, CaseBBoundHolds) {
    const FamilySpec sp = family_preset("theorem-b");
    const ExponentTable ex = make_exponent_table(sp.l, sp.alphas, sp.product);
    const TheoremCheck r = theorem_bound_check(make_family(sp), ProbeCase::b, ex, kEps);
    EXPECT_NEAR(r.tau, 0.1, 1e-12);
    EXPECT_NEAR(r.beta, 0.3, 1e-12);
    EXPECT_TRUE(r.bound_holds);
}

TEST(TheoremCheck, AdversarialFamilyIsRejected) {
    const FamilySpec sp = family_preset("adversarial");
    const ExponentTable ex = make_exponent_table(sp.l, sp.alphas, sp.product);
    try {
        theorem_bound_check(make_family(sp), ProbeCase::a, ex, kEps);
        FAIL() << "expected HypothesisError";
    } catch (const HypothesisError& e) {
        EXPECT_NE(std::string(e.what()).find("lateral: flux balance"), std::string::npos) << e.what();
    }
}
