#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thinprobe/errors.hpp"
#include "thinprobe/geometry.hpp"
#include "thinprobe/model.hpp"

using namespace thinprobe;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProbeSubdomain strip(double eps = 0.1, const std::string& curve = "straight", std::vector<double> cp = {}) {
    return extract_probe_subdomain(build_curve(curve, cp, eps, 1.0), 0.0, eps, 1.0, 2);
}

Frame frame_at(double theta) {
    Frame f;
    f.theta = theta;
    f.R(0, 0) = std::cos(theta);
    f.R(0, 1) = std::sin(theta);
    f.R(1, 0) = -std::sin(theta);
    f.R(1, 1) = std::cos(theta);
    return f;
}
}  // namespace

TEST(RotateFlux, QuarterTurnOfConstantAdvection) {
    const FluxMap F = make_flux("constant-advection", {1.0, 0.0}, 2, {});
    const RotatedFlux Fp = rotate_flux(F, frame_at(kPi / 2));
    const Vec3 v = Fp.value(Vec3(0.2, 0.3, 0), 0.0, 1.0);
    EXPECT_NEAR(v[0], 0.0, 1e-15);
    EXPECT_NEAR(v[1], -1.0, 1e-15);
}

TEST(RotateFluxProperty, NormIsPreserved) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const FluxMap F = make_flux("space-modulated", {1.0, 0.5, 0.3, 2.0}, 2, {});
    for (int i = 0; i < 500; ++i) {
        Frame fr = frame_at(kPi * U(rng));
        fr.translation = Vec3(U(rng), U(rng), 0);
        const RotatedFlux Fp = rotate_flux(F, fr);
        const Vec3 x(U(rng), U(rng), 0);
        const double t = std::abs(U(rng)), z = U(rng);
        EXPECT_NEAR(Fp.value(x, t, z).norm(), F.value(fr.to_global(x), t, z).norm(), 1e-13);
    }
}

TEST(MmsSource, HeatEquationWithSineProfile) {
    const ProbeSubdomain s = strip();
    const ScalarField u([](const JetPoint& p) { return exp(-p.t) * sin(kPi * p.x[0]); });
    const auto f = mms_source(u, make_state_map("identity", {}, {}), rotate_flux(make_flux("zero", {}, 2, {}), s.frame),
                              1.0, 2);
    for (double x : {0.1, 0.37, 0.8})
        for (double t : {0.0, 0.5})
            EXPECT_NEAR(f(Vec3(x, 0.05, 0), t), (kPi * kPi - 1) * std::exp(-t) * std::sin(kPi * x), 1e-12);
}

TEST(MmsSource, ConstantStateUnderAdvectionIsSourceFree) {
    const ProbeSubdomain s = strip();
    const ScalarField u = make_base_field("constant", {0.7}, s);
    for (const char* id : {"constant-advection", "rotational-advection", "burgers-like"}) {
        const std::vector<double> prm = std::string(id) == "constant-advection" ? std::vector<double>{1, 0.5}
                                        : std::string(id) == "burgers-like"       ? std::vector<double>{}
                                                                                  : std::vector<double>{1};
        const auto f = mms_source(u, make_state_map("identity", {}, {}), rotate_flux(make_flux(id, prm, 2, {}), s.frame),
                                  1.0, 2);
        EXPECT_NEAR(f(Vec3(0.1, 0.05, 0), 0.3), 0.0, 1e-14) << id;
    }
}

TEST(MmsSource, CubicStateMapOnLinearTime) {
    const ProbeSubdomain s = strip();
    const ScalarField u([](const JetPoint& p) { return p.t; });
    const StateMap H = make_state_map("cubic-with-floor", {1.0}, {});
    const auto f = mms_source(u, H, rotate_flux(make_flux("zero", {}, 2, {}), s.frame), 1.0, 2);
    for (double t : {0.0, 0.4, 1.3}) EXPECT_NEAR(f(Vec3(0.2, 0.05, 0), t), 3 * t * t + 1.0, 1e-13);
}

TEST(StateMapProperty, InverseRoundTrip) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (double delta : {0.0, 0.1, 1.0}) {
        const StateMap H = make_state_map("cubic-with-floor", {delta}, {});
        for (int i = 0; i < 1000; ++i) {
            const double z = U(rng), y = H.value(z);
            const double back = H.invert(y, U(rng));
            const double tol = 1e-12 * std::max(1.0, std::abs(y));
            EXPECT_LE(std::abs(H.value(back) - y), tol) << "delta " << delta;
            // H' >= delta bounds the state error by the value error
            if (delta > 0) EXPECT_LE(std::abs(back - z), tol / delta) << "delta " << delta;
        }
    }
}

TEST(StateMap, RejectsNegativeFloorAndUnknownIds) {
    EXPECT_THROW(make_state_map("cubic-with-floor", {-1.0}, {}), ConfigError);
    EXPECT_THROW(make_state_map("quintic", {}, {}), ConfigError);
    EXPECT_THROW(make_flux("constant-advection", {1.0}, 2, {}), ConfigError);
    EXPECT_THROW(make_source("logistic", {1, 2}, {}), ConfigError);
}

TEST(ManufacturedPair, ResidualsAndLateralConditions) {
    const double eps = 0.1;
    const ProbeSubdomain s = strip(eps, "sine", {0.8, 3.0});
    PairSettings st;
    st.q = 1.5;
    st.profile = TransverseProfile::bubble;
    const ManufacturedPair pr = manufacture_identity_pair(s, make_base_field("trig", {}, s),
                                                          make_flux("constant-advection", {1, 0.5}, 2, {}),
                                                          make_state_map("identity", {}, {}), 1.0, st);
    const VolumeNodes vol = volume_nodes(s, {9, 9});
    for (const Vec3& x : vol.nodes)
        for (double t : {0.0, 0.005, 0.01}) {
            ASSERT_LE(std::abs(pr.residual_u(x, t)), 1e-10);
            ASSERT_LE(std::abs(pr.residual_v(x, t)), 1e-10);
            ASSERT_LE(std::abs(pr.coupled_residual(x, t)), 1e-10);
        }
    for (Piece p : {Piece::G1, Piece::G3}) {
        const BoundaryNodes b = boundary_nodes(s, p, 17);
        for (size_t i = 0; i < b.nodes.size(); ++i) {
            const PairSample smp = pr.sample(b.nodes[i], 0.005);
            EXPECT_LE(std::abs(smp.w), 1e-14);
            EXPECT_LE(std::abs(smp.grad_w.dot(b.normals[i]) - pr.h(b.nodes[i], 0.005, b.normals[i])), 1e-12);
        }
    }
}

TEST(ManufacturedPair, ZeroAmplitudeGivesNoGap) {
    const ProbeSubdomain s = strip();
    PairSettings st;
    st.amplitude = 0.0;
    const ManufacturedPair pr = manufacture_identity_pair(s, make_base_field("trig", {}, s),
                                                          make_flux("constant-advection", {1, 0.5}, 2, {}),
                                                          make_state_map("identity", {}, {}), 1.0, st);
    for (const Vec3& x : volume_nodes(s, {5, 5}).nodes) {
        const PairSample smp = pr.sample(x, 0.01);
        EXPECT_EQ(smp.w, 0.0);
        EXPECT_LE(smp.D.norm(), 1e-15);
        EXPECT_LE(std::abs(smp.src_gap), 1e-12);
    }
}

TEST(ManufacturedPair, RejectsBadSettings) {
    const ProbeSubdomain s = strip();
    PairSettings st;
    st.q = -1;
    EXPECT_THROW(manufacture_identity_pair(s, make_base_field("trig", {}, s),
                                           make_flux("constant-advection", {1, 0.5}, 2, {}),
                                           make_state_map("identity", {}, {}), 1.0, st),
                 DomainError);
}

TEST(Rdc, ConstantVelocityBecomesConstantAdvection) {
    VelocityField c;
    c.c0 = Vec3(1.0, 2.0, 0);
    const ConfigTriplet cfg = rdc_to_balance(c, make_source("zero", {}, {}), 1.0);
    EXPECT_EQ(cfg.F.base.id, "constant-advection");
    const Vec3 v = cfg.F.value(Vec3(0.3, 0.1, 0), 0.0, 0.5);
    EXPECT_NEAR(v[0], 0.5, 1e-15);
    EXPECT_NEAR(v[1], 1.0, 1e-15);
}

TEST(Rdc, RotationBecomesRotationalAdvection) {
    VelocityField c;
    c.A(0, 1) = -1.0;
    c.A(1, 0) = 1.0;
    const ConfigTriplet cfg = rdc_to_balance(c, make_source("logistic", {}, {}), 1.0);
    EXPECT_EQ(cfg.F.base.id, "rotational-advection");
    EXPECT_EQ(cfg.f.id, "logistic");
}

TEST(Rdc, RejectsCompressibleVelocity) {
    VelocityField c;
    c.A(0, 0) = 1.0;  // c = (x1, 0)
    EXPECT_THROW(rdc_to_balance(c, make_source("zero", {}, {}), 1.0), DomainError);
}

TEST(Admissibility, ZeroSourcePasses) {
    const ConfigTriplet cfg = make_config(make_state_map("identity", {}, {0.5, 10}),
                                          make_flux("constant-advection", {1, 0.5}, 2, {0.5, 10}),
                                          make_source("zero", {}, {0.5, 1}), 1.0);
    EXPECT_TRUE(validate_admissibility(cfg, 1000).pass);
}

TEST(Admissibility, LinearSourceWithinDeclaredConstant) {
    SourceMap f = make_source("zero", {}, {0.99, 2.0});
    f.kind = SourceMap::Kind::custom;
    f.custom = [](const Vec3&, double, double z, const Vec3&) { return z; };
    const ConfigTriplet cfg = make_config(make_state_map("identity", {}, {0.5, 10}),
                                          make_flux("constant-advection", {1, 0.5}, 2, {0.5, 10}), f, 1.0);
    const AdmissibilityReport r = validate_admissibility(cfg, 1000);
    EXPECT_TRUE(r.find("f")->pass);
}

TEST(Admissibility, SquareRootSourceFailsTheExponent) {
    SourceMap f = make_source("zero", {}, {0.75, 2.0});
    f.kind = SourceMap::Kind::custom;
    f.custom = [](const Vec3&, double, double z, const Vec3&) { return std::sqrt(std::abs(z)); };
    const ConfigTriplet cfg = make_config(make_state_map("identity", {}, {0.5, 10}),
                                          make_flux("constant-advection", {1, 0.5}, 2, {0.5, 10}), f, 1.0);
    const AdmissibilityReport r = validate_admissibility(cfg, 1000);
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.find("f")->pass);
    EXPECT_EQ(r.find("f")->worst_slot, "z");
}

TEST(Admissibility, TooFewSamples) {
    const ConfigTriplet cfg = make_config(make_state_map("identity", {}, {}), make_flux("zero", {}, 2, {}),
                                          make_source("zero", {}, {}), 1.0);
    EXPECT_THROW(validate_admissibility(cfg, 10), DomainError);
}
