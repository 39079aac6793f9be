#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thinprobe/errors.hpp"
#include "thinprobe/geometry.hpp"

using namespace thinprobe;

namespace {
constexpr double kPi = 3.14159265358979323846;

double simpson_arc(const Curve& c, double a0, double a1, int n) {
    const double h = (a1 - a0) / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        s += w * c.deriv(a0 + i * h).norm();
    }
    return s * h / 3;
}
}  // namespace

TEST(Curve, StraightIsFlat) {
    const Curve c = build_curve("straight", {}, 0.1, 1.0);
    for (double a : {-0.9, 0.0, 0.3}) {
        EXPECT_DOUBLE_EQ(c.eval(a)[0], a);
        EXPECT_DOUBLE_EQ(c.eval(a)[1], 0.0);
    }
    EXPECT_EQ(c.max_transverse_amplitude(), 0.0);
}

TEST(Curve, SineAmplitudeIsInUnitsOfEps) {
    const Curve c = build_curve("sine", {0.5, 4 * kPi}, 0.1, 1.0);
    EXPECT_NEAR(c.max_transverse_amplitude(), 0.05, 1e-12);
    double m = 0;
    for (int i = 0; i <= 20000; ++i) m = std::max(m, std::abs(c.eval(-1.0 + i * 1e-4)[1]));
    EXPECT_NEAR(m, 0.05, 1e-8);
}

TEST(Curve, RejectsAmplitudeAboveBound) {
    EXPECT_THROW(build_curve("sine", {1.5, 2.0}, 0.1, 1.0), DomainError);
    EXPECT_THROW(build_curve("linear-tilt", {0.5}, 0.1, 1.0), DomainError);
    EXPECT_THROW(build_curve("helix", {}, 0.1, 1.0), DomainError);
}

TEST(Curve, LinearTiltTangentsAllParallel) {
    const Curve c = build_curve("linear-tilt", {0.05}, 0.1, 1.0);
    const Vec3 t0 = c.deriv(-1.0).normalized();
    EXPECT_NEAR(t0[1] / t0[0], 0.05, 1e-15);
    for (int i = 0; i <= 1000; ++i) EXPECT_LE(t0.cross(c.deriv(-1.0 + i * 0.002).normalized()).norm(), 1e-12);
}

TEST(Curve, SecondDifferenceConverges) {
    const Curve c = build_curve("sine", {0.8, 3.0}, 0.1, 1.0);
    const double a = 0.37;
    auto err = [&](double h) { return std::abs((c.deriv(a + h)[1] - c.deriv(a - h)[1]) / (2 * h) - c.second_deriv(a)[1]); };
    EXPECT_GT(err(1e-2) / err(5e-3), 3.5);
}

TEST(Frame, StraightCurveGivesIdentity) {
    const Frame f = rotation_frame(build_curve("straight", {}, 0.1, 1.0), 0.0, 2);
    EXPECT_DOUBLE_EQ(f.theta, 0.0);
    EXPECT_LE((f.rotation_matrix() - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-15);
}

TEST(Frame, FortyFiveDegreeTangent) {
    const Curve c = build_curve("linear-tilt", {1.0}, 0.1, 0.1);
    const Frame f = rotation_frame(c, 0.0, 2);
    EXPECT_NEAR(f.theta, kPi / 4, 1e-15);
    const Vec3 v = f.R * Vec3(1, 1, 0) / std::sqrt(2.0);
    EXPECT_NEAR(v[0], 1.0, 1e-15);
    EXPECT_NEAR(v[1], 0.0, 1e-15);
}

TEST(Frame, SineTangentAlignedWithFirstAxis) {
    const Curve c = build_curve("sine", {0.5, 4 * kPi}, 0.1, 1.0);
    const Frame f = rotation_frame(c, 0.0, 2);
    EXPECT_NEAR(f.theta, std::atan(0.5 * 0.1 * 4 * kPi), 1e-14);
    const Vec3 v = f.R * c.deriv(0.0);
    EXPECT_LE(std::abs(v[1]), 1e-12 * v.norm());
}

TEST(FrameProperty, RandomFramesAreRotationsAligningTheTangent) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 2 + trial % 2;
        const Curve c = build_curve("sine", {U(rng), 1.0 + 5.0 * std::abs(U(rng))}, 0.05 + 0.1 * std::abs(U(rng)), 1.0, dim);
        const double b1 = 0.95 * U(rng);
        const Frame f = rotation_frame(c, b1, dim);
        const Eigen::MatrixXd R = f.rotation_matrix();
        EXPECT_LE((R.transpose() * R - Eigen::MatrixXd::Identity(dim, dim)).norm(), 1e-12);
        EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
        const Vec3 t = f.R * c.deriv(b1);
        const int along = dim == 2 ? 0 : 1;
        for (int k = 0; k < dim; ++k)
            if (k != along) EXPECT_LE(std::abs(t[k]), 1e-10 * t.norm());
    }
}

TEST(ProbeSubdomain, StraightStripMeasures) {
    const Curve c = build_curve("straight", {}, 0.1, 1.0);
    const ProbeSubdomain s = extract_probe_subdomain(c, 0.0, 0.1, 0.5, 2);
    EXPECT_NEAR(s.extent(), 0.316228, 1e-6);
    EXPECT_NEAR(s.piece_measure(Piece::G2), 0.1, 1e-12 * 0.1);
    EXPECT_NEAR(s.piece_measure(Piece::G4), 0.1, 1e-12 * 0.1);
    EXPECT_DOUBLE_EQ(s.l0, 0.5);
    const ProbeSubdomain s2 = extract_probe_subdomain(c, 0.0, 0.1, 1.7, 2);
    EXPECT_DOUBLE_EQ(s2.l0, 1.0);
}

TEST(ProbeSubdomain, NozzleExtentAndCrossSection) {
    const Curve c = build_curve("straight", {}, 0.1, 1.0, 3);
    const ProbeSubdomain s = extract_probe_subdomain(c, 0.0, 0.1, 1.0, 3, DomainKind::nozzle);
    EXPECT_NEAR(s.extent(), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(s.cross_section_diameter(), 0.1);
    EXPECT_EQ(s.boundary_pieces().size(), 3u);
    EXPECT_THROW(extract_probe_subdomain(build_curve("straight", {}, 0.1, 1.0), 0.0, 0.1, 1.0, 2, DomainKind::slab),
                 DomainError);
}

TEST(ProbeSubdomain, LowerLateralPieceLiesOnTheCurve) {
    const double eps = 0.1;
    const Curve c = build_curve("sine", {0.8, 3.0}, eps, 1.0);
    const ProbeSubdomain s = extract_probe_subdomain(c, 0.2, eps, 1.0, 2);
    const BoundaryNodes b = boundary_nodes(s, Piece::G1, 33);
    for (const Vec3& x : b.nodes) {
        const Vec3 X = s.frame.to_global(x);
        EXPECT_LE(std::abs(X[1] - c.g(X[0])), 1e-12);
    }
}

TEST(BoundaryNodes, EndFaceSimpsonWeights) {
    const double eps = 0.1;
    const ProbeSubdomain s = extract_probe_subdomain(build_curve("straight", {}, eps, 1.0), 0.0, eps, 1.0, 2);
    const BoundaryNodes b = boundary_nodes(s, Piece::G2, 3);
    ASSERT_EQ(b.nodes.size(), 3u);
    const double want_x[3] = {0, eps / 2, eps}, want_w[3] = {eps / 6, 4 * eps / 6, eps / 6};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(b.nodes[i][0], 0.0, 1e-15);
        EXPECT_NEAR(b.nodes[i][1], want_x[i], 1e-15);
        EXPECT_NEAR(b.weights[i], want_w[i], 1e-15);
        EXPECT_NEAR(b.normals[i][0], -1.0, 1e-15);
    }
}

TEST(BoundaryNodes, StraightLowerNormalPointsDown) {
    const ProbeSubdomain s = extract_probe_subdomain(build_curve("straight", {}, 0.1, 1.0), 0.0, 0.1, 1.0, 2);
    for (const Vec3& n : boundary_nodes(s, Piece::G1, 9).normals) {
        EXPECT_NEAR(n[0], 0.0, 1e-15);
        EXPECT_NEAR(n[1], -1.0, 1e-15);
    }
}

TEST(BoundaryNodes, CurvedLateralWeightsMatchArcLength) {
    const double eps = 0.1;
    const Curve c = build_curve("sine", {0.8, 3.0}, eps, 1.0);
    const ProbeSubdomain s = extract_probe_subdomain(c, 0.2, eps, 1.0, 2);
    const BoundaryNodes b = boundary_nodes(s, Piece::G1, 129);
    double sum = 0;
    for (double w : b.weights) sum += w;
    const double a0 = s.frame.to_global(s.point(0, 0))[0], a1 = s.frame.to_global(s.point(s.extent(), 0))[0];
    const double coarse = simpson_arc(c, a0, a1, 2000), fine = simpson_arc(c, a0, a1, 4000);
    const double oracle = fine + (fine - coarse) / 15;
    EXPECT_NEAR(sum, oracle, 1e-8);
}

TEST(ParallelTangents, StraightCurveEveryPairWithinWindow) {
    const double eps = 0.1, l = 1.0;
    const auto pairs = parallel_tangent_pairs(build_curve("straight", {}, eps, 1.0), l, eps);
    ASSERT_FALSE(pairs.empty());
    for (const auto& [a, b] : pairs) EXPECT_LE(std::abs(b - a), std::pow(eps, l) + 1e-12);
}

TEST(ParallelTangents, SinePairsRecurWithThePeriod) {
    const double eps = 0.1, l = 0.5, ext = std::pow(eps, l);
    const Curve c = build_curve("sine", {0.5, 2 * kPi / ext}, eps, 1.0);
    const auto pairs = parallel_tangent_pairs(c, l, eps);
    int periodic = 0;
    for (const auto& [a, b] : pairs) {
        EXPECT_LE(c.deriv(a).cross(c.deriv(b)).norm(), 1e-10 * c.deriv(a).norm() * c.deriv(b).norm());
        if (std::abs(std::abs(b - a) - ext) < 1e-9) ++periodic;
    }
    EXPECT_GT(periodic, 10);
}

TEST(Tiling, CoverCountAndLastTileEndsAtL) {
    const double eps = 0.1, l = 0.5;
    const auto tiles = tile_probe_subdomains(build_curve("straight", {}, eps, 1.0), eps, l, 2);
    EXPECT_EQ(static_cast<int>(tiles.size()), static_cast<int>(std::ceil(2.0 / std::pow(eps, l))));
    EXPECT_NEAR(tiles.back().origin_param + tiles.back().extent(), 1.0, 1e-12);
}

TEST(VolumeNodes, WeightsSumToArea) {
    const double eps = 0.1;
    const ProbeSubdomain s = extract_probe_subdomain(build_curve("sine", {0.8, 3.0}, eps, 1.0), 0.1, eps, 1.0, 2);
    const VolumeNodes v = volume_nodes(s, {17, 17});
    double sum = 0;
    for (double w : v.weights) sum += w;
    EXPECT_NEAR(sum, eps * s.extent(), 1e-14);
}
