#include <gtest/gtest.h>

#include <cmath>

#include "thinprobe/errors.hpp"
#include "thinprobe/solver.hpp"

using namespace thinprobe;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProbeSubdomain strip(double eps = 0.2, const std::string& curve = "straight", std::vector<double> cp = {}) {
    return extract_probe_subdomain(build_curve(curve, cp, eps, 1.0), 0.0, eps, 1.0, 2);
}

ConfigTriplet config(const ProbeSubdomain& s, const std::string& H, std::vector<double> Hp, const std::string& F,
                     std::vector<double> Fp, const std::string& f = "zero", std::vector<double> fp = {}) {
    return in_frame(make_config(make_state_map(H, Hp, {}), make_flux(F, Fp, 2, {}), make_source(f, fp, {}), 1.0),
                    s.frame);
}
}  // namespace

TEST(Grid, SpacingAndPoints) {
    const ProbeSubdomain s = strip(0.2);
    const Grid2D g = Grid2D::make(s, 17, 9, 8, 0.01);
    EXPECT_NEAR(g.h1(), s.extent() / 16, 1e-15);
    EXPECT_NEAR(g.h_eta(), 1.0 / 8, 1e-15);
    EXPECT_NEAR(g.dt(), 0.01 / 8, 1e-18);
    EXPECT_NEAR(g.min_spacing(), std::min(s.extent() / 16, 0.2 / 8), 1e-15);
    EXPECT_NEAR(g.point(16, 8)[1], 0.2, 1e-15);
    EXPECT_THROW(Grid2D::make(s, 2, 9, 8, 0.01), DomainError);
}

TEST(Solver, ConstantStatePreservedByEveryAdvectiveFlux) {
    const ProbeSubdomain s = strip(0.2, "linear-tilt", {0.05});
    const double c = 0.5;
    const ScalarField exact([c](const JetPoint&) { return Jet(c); });
    const std::vector<std::pair<std::string, std::vector<double>>> fluxes{
        {"constant-advection", {1.0, 0.5}}, {"rotational-advection", {1.0}}, {"burgers-like", {}},
        {"space-modulated", {1.0, 0.5, 0.3, 2.0}}};
    for (const auto& [id, prm] : fluxes) {
        ConfigTriplet cfg = config(s, "identity", {}, id, prm);
        cfg.f.forcing = mms_forcing(exact, cfg);
        const Grid2D g = Grid2D::make(s, 9, 9, 4, 0.2 * 0.2 / 128);
        const SpaceTimeField u = solve_forward(cfg, g, [c](const Vec3&, double) { return c; },
                                               [c](const Vec3&) { return c; });
        double dev = 0;
        for (double v : u.values) dev = std::max(dev, std::abs(v - c));
        EXPECT_LE(dev, 1e-12) << id;
    }
}

TEST(Solver, ManufacturedSolutionConvergesWithNonlinearTriplet) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "cubic-with-floor", {1.0}, "burgers-like", {}, "logistic", {});
    const ConvergenceStudy st = mms_convergence(cfg, s, make_base_field("smooth", {}, s), 0.2 * 0.2 / 128, 9, 4, 3);
    ASSERT_EQ(st.orders.size(), 2u);
    EXPECT_GE(st.min_order(), 1.8);
}

TEST(Solver, HeatModeErrorScalesWithSpacingAndStep) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "zero", {});
    const double T = 0.2 * 0.2 / 128;
    const ConvergenceStudy st = mms_convergence(cfg, s, make_base_field("heat", {1.0}, s), T, 9, 4, 3);
    const double r0 = st.errors[0] / (st.h[0] * st.h[0] + T / st.nt[0]);
    for (size_t k = 1; k < st.errors.size(); ++k)
        EXPECT_LE(st.errors[k] / (st.h[k] * st.h[k] + T / st.nt[k]), 1.1 * r0);
}

TEST(Solver, DiscreteMaximumPrinciple) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "zero", {});
    const Grid2D g = Grid2D::make(s, 17, 17, 16, 0.2 * 0.2 / 128);
    const double ext = s.extent();
    const SpaceTimeField u = solve_forward(
        cfg, g, [](const Vec3&, double) { return 0.0; },
        [ext](const Vec3& x) { return std::pow(std::sin(kPi * x[0] / ext) * std::sin(kPi * x[1] / 0.2), 2); });
    double lo = 1e300, hi = -1e300;
    for (double v : u.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    EXPECT_GE(lo, -1e-10);
    EXPECT_LE(hi, 1.0 + 1e-10);
    EXPECT_LT(u.at(16, 8, 8), u.at(0, 8, 8));
}

TEST(Solver, StepBoundViolation) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "constant-advection", {1.0, 0.5});
    const Grid2D g = Grid2D::make(s, 9, 9, 1, 1.0);
    EXPECT_THROW(solve_forward(cfg, g, [](const Vec3&, double) { return 0.0; }, [](const Vec3&) { return 0.0; }),
                 SolverError);
}

TEST(Solver, DegenerateStateMapRejected) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "cubic-with-floor", {0.0}, "zero", {});
    const Grid2D g = Grid2D::make(s, 9, 9, 4, 1e-4);
    EXPECT_THROW(solve_forward(cfg, g, [](const Vec3&, double) { return 0.0; }, [](const Vec3&) { return 0.0; }),
                 SolverError);
}

TEST(Measurement, ConstantStateFluxTrace) {
    const ProbeSubdomain s = strip(0.2);
    const double c = 0.7;
    const ConfigTriplet cfg = config(s, "identity", {}, "constant-advection", {c, 0.0});
    const Grid2D g = Grid2D::make(s, 9, 9, 4, 1e-3);
    SpaceTimeField u(g);
    std::fill(u.values.begin(), u.values.end(), c);
    const MeasurementTrace m = boundary_measurement(u, cfg, Piece::G2, 0.0, 1e-3);
    ASSERT_EQ(m.times.size(), 5u);
    for (const auto& row : m.flux_trace)
        for (double v : row) EXPECT_NEAR(v, -c * c / cfg.mu, 1e-14);
}

TEST(Measurement, ZeroSolutionGivesZeroTraces) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "constant-advection", {1.0, 0.5});
    const Grid2D g = Grid2D::make(s, 9, 9, 4, 1e-3);
    const SpaceTimeField u(g);
    for (Piece p : {Piece::G1, Piece::G2, Piece::G3, Piece::G4}) {
        const MeasurementTrace m = boundary_measurement(u, cfg, p, 0.0, 1e-3);
        for (const auto& row : m.flux_trace)
            for (double v : row) EXPECT_EQ(v, 0.0);
    }
}

TEST(Measurement, NormalDerivativeIsSecondOrder) {
    const ProbeSubdomain s = strip(0.2, "sine", {0.8, 3.0});
    const ConfigTriplet cfg = config(s, "identity", {}, "zero", {});
    auto f = [](const Vec3& x) { return std::sin(2 * x[0]) + x[1] * x[1] * x[1] * 10; };
    auto grad = [](const Vec3& x) { return Vec3(2 * std::cos(2 * x[0]), 30 * x[1] * x[1], 0); };
    double prev = 0;
    for (int n : {9, 17, 33}) {
        const Grid2D g = Grid2D::make(s, n, n, 1, 1e-3);
        SpaceTimeField u(g);
        for (int k = 0; k <= 1; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) u.at(k, i, j) = f(g.point(i, j));
        const MeasurementTrace m = boundary_measurement(u, cfg, Piece::G3, 0.0, 0.0);
        double err = 0;
        for (size_t q = 0; q < m.nodes.size(); ++q)
            err = std::max(err, std::abs(m.dnu_trace[0][q] - m.normals[q].dot(grad(m.nodes[q]))));
        if (prev > 0) EXPECT_GT(prev / err, 3.3) << "n = " << n;
        prev = err;
    }
}

TEST(Measurement, WindowOutsideSpanThrows) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "zero", {});
    const SpaceTimeField u(Grid2D::make(s, 9, 9, 4, 1e-3));
    EXPECT_THROW(boundary_measurement(u, cfg, Piece::G1, 0.0, 2e-3), DomainError);
}

TEST(PairSolve, IdenticalConfigurationsHaveNoMismatch) {
    const ProbeSubdomain s = strip(0.2);
    const ConfigTriplet cfg = config(s, "identity", {}, "constant-advection", {1.0, 0.5});
    const Grid2D g = Grid2D::make(s, 9, 9, 4, 0.2 * 0.2 / 128);
    const PairSolve p = solve_pair_with_shared_dirichlet(
        cfg, cfg, g, [](const Vec3& x, double t) { return std::sin(x[0]) * (1 + t); },
        [](const Vec3& x) { return std::sin(x[0]); });
    EXPECT_EQ(p.max_u_mismatch, 0.0);
    EXPECT_EQ(p.max_flux_mismatch, 0.0);
}

TEST(FieldCsv, HeaderAndRowCount) {
    const SpaceTimeField u(Grid2D::make(strip(0.2), 3, 3, 1, 1e-3));
    const std::string csv = field_csv(u);
    EXPECT_EQ(csv.rfind("t,x1,eta,value\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 9);
}
