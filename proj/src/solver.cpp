#include "thinprobe/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "thinprobe/errors.hpp"

namespace thinprobe {

Grid2D Grid2D::make(const ProbeSubdomain& sub, int n1, int n_eta, int nt, double T) {
    if (sub.dim != 2) throw DomainError("Grid2D: the forward solver is 2D only");
    if (n1 < 3 || n_eta < 3) throw DomainError("Grid2D: need at least 3 nodes per axis");
    if (nt < 1 || !(T > 0)) throw DomainError("Grid2D: need nt >= 1 and T > 0");
    Grid2D g;
    g.sub = sub;
    g.n1 = n1;
    g.n_eta = n_eta;
    g.nt = nt;
    g.T = T;
    g.eps = sub.eps;
    g.l = sub.l;
    const double ext = sub.extent();
    for (int i = 0; i < n1; ++i) {
        const double x = ext * i / (n1 - 1);
        const LocalGraph::Value v = sub.graph.eval(x);
        g.x1.push_back(x);
        g.gamma.push_back(v.g);
        g.gamma1.push_back(v.g1);
        g.gamma2.push_back(v.g2);
    }
    for (int j = 0; j < n_eta; ++j) g.eta.push_back(static_cast<double>(j) / (n_eta - 1));
    return g;
}

Vec3 Grid2D::point(int i, int j) const { return {x1[i], gamma[i] + eps * eta[j], 0.0}; }

double Grid2D::min_spacing() const { return std::min(h1(), eps * h_eta()); }

namespace {

// First derivative along one index with second-order stencils everywhere.
double d1(const SpaceTimeField& f, int k, int i, int j, bool along) {
    const Grid2D& g = f.grid;
    const int n = along ? g.n1 : g.n_eta;
    const int m = along ? i : j;
    const double h = along ? g.h1() : g.h_eta();
    auto v = [&](int q) { return along ? f.at(k, q, j) : f.at(k, i, q); };
    if (m > 0 && m < n - 1) return (v(m + 1) - v(m - 1)) / (2 * h);
    if (m == 0) return (-3 * v(0) + 4 * v(1) - v(2)) / (2 * h);
    return (3 * v(n - 1) - 4 * v(n - 2) + v(n - 3)) / (2 * h);
}

}  // namespace

Vec3 SpaceTimeField::grad(int k, int i, int j) const {
    const double Ux = d1(*this, k, i, j, true), Ue = d1(*this, k, i, j, false);
    return {Ux - grid.gamma1[i] / grid.eps * Ue, Ue / grid.eps, 0.0};
}

std::pair<int, int> SpaceTimeField::window(double T1, double T2) const {
    const double dt = grid.dt();
    if (T1 < -1e-12 * grid.T || T2 > grid.T * (1 + 1e-12) || T2 < T1)
        throw DomainError("measurement window [" + std::to_string(T1) + ", " + std::to_string(T2) +
                          "] lies outside the solved span [0, " + std::to_string(grid.T) + "]");
    const int k1 = static_cast<int>(std::ceil(T1 / dt - 1e-9));
    const int k2 = static_cast<int>(std::floor(T2 / dt + 1e-9));
    return {std::max(k1, 0), std::min(k2, grid.nt)};
}

SpaceTimeField solve_forward(const ConfigTriplet& cfg, const Grid2D& grid, const BoundaryFn& psi,
                             const InitialFn& u_init, const SolverOptions& opt) {
    if (cfg.dim() != 2) throw DomainError("solve_forward: configuration must be 2D");
    if (!(cfg.H.min_derivative() > 0))
        throw SolverError("solve_forward: solver mode needs H' bounded below by a positive constant (H = " + cfg.H.id +
                          ")");
    const int n1 = grid.n1, ne = grid.n_eta, N = grid.nodes();
    const double dt = grid.dt(), mu = cfg.mu, eps = grid.eps;
    const double h1 = grid.h1(), he = grid.h_eta(), hmin = grid.min_spacing();

    SpaceTimeField out(grid);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < ne; ++j) {
            const Vec3 x = grid.point(i, j);
            out.at(0, i, j) = grid.on_boundary(i, j) ? psi(x, 0.0) : u_init(x);
        }

    const bool linear_H = cfg.H.kind == StateMap::Kind::identity;
    Eigen::SparseMatrix<double, Eigen::RowMajor> A(N, N);
    std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>>> solver;
    Eigen::VectorXd b(N), guess(N), sol(N);

    auto assemble = [&](int k) {
        std::vector<Eigen::Triplet<double>> tr;
        tr.reserve(static_cast<size_t>(N) * 9);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < ne; ++j) {
                const int r = grid.index(i, j);
                if (grid.on_boundary(i, j)) {
                    tr.emplace_back(r, r, 1.0);
                    continue;
                }
                const double g1 = grid.gamma1[i], g2 = grid.gamma2[i];
                const double cxx = 1.0 / (h1 * h1);
                const double cee = (1.0 + g1 * g1) / (eps * eps * he * he);
                const double cxe = -2.0 * g1 / eps / (4.0 * h1 * he);
                const double ce = -g2 / eps / (2.0 * he);
                const double c = cfg.H.deriv(out.at(k, i, j)) / dt;
                tr.emplace_back(r, r, c + mu * (2 * cxx + 2 * cee));
                tr.emplace_back(r, grid.index(i + 1, j), -mu * cxx);
                tr.emplace_back(r, grid.index(i - 1, j), -mu * cxx);
                tr.emplace_back(r, grid.index(i, j + 1), -mu * (cee + ce));
                tr.emplace_back(r, grid.index(i, j - 1), -mu * (cee - ce));
                if (cxe != 0.0) {
                    tr.emplace_back(r, grid.index(i + 1, j + 1), -mu * cxe);
                    tr.emplace_back(r, grid.index(i - 1, j - 1), -mu * cxe);
                    tr.emplace_back(r, grid.index(i + 1, j - 1), mu * cxe);
                    tr.emplace_back(r, grid.index(i - 1, j + 1), mu * cxe);
                }
            }
        A.setFromTriplets(tr.begin(), tr.end());
        solver = std::make_unique<Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>>>();
        solver->setTolerance(opt.linear_tol);
        solver->setMaxIterations(opt.linear_max_iter);
        solver->compute(A);
    };

    for (int k = 0; k < grid.nt; ++k) {
        const double t = grid.time(k), tn = grid.time(k + 1);
        if (k == 0 || !linear_H) assemble(k);
        double amax = 0.0;
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < ne; ++j) {
                const int r = grid.index(i, j);
                const Vec3 x = grid.point(i, j);
                const double u = out.at(k, i, j);
                guess[r] = u;
                if (grid.on_boundary(i, j)) {
                    b[r] = psi(x, tn);
                    guess[r] = b[r];
                    amax = std::max(amax, cfg.F.dz(x, t, u).norm());
                    continue;
                }
                const Vec3 g = out.grad(k, i, j);
                const Vec3 a = cfg.F.dz(x, t, u);
                amax = std::max(amax, a.norm());
                const double E = -(cfg.F.explicit_divergence(x, t, u) + a.dot(g)) + cfg.f.value(x, t, u, g);
                b[r] = cfg.H.deriv(u) / dt * u + E;
            }
        double limit = hmin * hmin / mu;
        if (amax > 0) limit = std::min(limit, hmin / amax);
        if (dt > 0.25 * limit * (1 + 1e-12))
            throw SolverError("solve_forward: step " + std::to_string(k) + " violates the step bound (dt = " +
                              std::to_string(dt) + " > " + std::to_string(0.25 * limit) + ")");
        sol = solver->solveWithGuess(b, guess);
        if (solver->info() != Eigen::Success)
            throw SolverError("solve_forward: linear solve failed at step " + std::to_string(k) + " (residual " +
                              std::to_string(solver->error()) + ")");
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < ne; ++j) {
                const int r = grid.index(i, j);
                double un;
                if (grid.on_boundary(i, j)) {
                    un = b[r];
                } else if (linear_H) {
                    un = sol[r];
                } else {
                    const double u = out.at(k, i, j);
                    const double Hn = cfg.H.value(u) + cfg.H.deriv(u) * (sol[r] - u);
                    try {
                        un = cfg.H.invert(Hn, sol[r]);
                    } catch (const SolverError& e) {
                        throw SolverError(std::string(e.what()) + " at node (" + std::to_string(i) + ", " +
                                          std::to_string(j) + "), step " + std::to_string(k));
                    }
                }
                if (!std::isfinite(un))
                    throw SolverError("solve_forward: non-finite value at step " + std::to_string(k + 1));
                out.at(k + 1, i, j) = un;
            }
    }
    return out;
}

namespace {

struct EdgeNode {
    int i, j;
    Vec3 normal;
};

std::vector<EdgeNode> edge_nodes(const Grid2D& g, Piece piece) {
    std::vector<EdgeNode> out;
    switch (piece) {
        case Piece::G2:
        case Piece::G4: {
            const int i = piece == Piece::G2 ? 0 : g.n1 - 1;
            const Vec3 nu(piece == Piece::G2 ? -1.0 : 1.0, 0.0, 0.0);
            for (int j = 0; j < g.n_eta; ++j) out.push_back({i, j, nu});
            break;
        }
        case Piece::G1:
        case Piece::G3: {
            const int j = piece == Piece::G1 ? 0 : g.n_eta - 1;
            const double sgn = piece == Piece::G1 ? 1.0 : -1.0;
            for (int i = 0; i < g.n1; ++i) {
                const double g1 = g.gamma1[i], js = std::sqrt(1.0 + g1 * g1);
                out.push_back({i, j, Vec3(sgn * g1 / js, -sgn / js, 0.0)});
            }
            break;
        }
        default: throw DomainError("boundary_measurement: piece " + piece_name(piece) + " is not a 2D piece");
    }
    return out;
}

}  // namespace

MeasurementTrace boundary_measurement(const SpaceTimeField& field, const ConfigTriplet& cfg, Piece piece, double T1,
                                      double T2) {
    const Grid2D& g = field.grid;
    const auto nodes = edge_nodes(g, piece);
    const auto [k1, k2] = field.window(T1, T2);
    MeasurementTrace m;
    m.piece = piece;
    for (const auto& e : nodes) {
        m.nodes.push_back(g.point(e.i, e.j));
        m.normals.push_back(e.normal);
    }
    for (int k = k1; k <= k2; ++k) {
        const double t = g.time(k);
        m.times.push_back(t);
        std::vector<double> ut, dn, fl, hf;
        for (const auto& e : nodes) {
            const Vec3 x = g.point(e.i, e.j);
            const double u = field.at(k, e.i, e.j);
            const double dnu = e.normal.dot(field.grad(k, e.i, e.j));
            const double hF = e.normal.dot(cfg.F.value(x, t, u)) / cfg.mu;
            ut.push_back(u);
            dn.push_back(dnu);
            hf.push_back(hF);
            fl.push_back(dnu + hF);
        }
        m.u_trace.push_back(ut);
        m.dnu_trace.push_back(dn);
        m.flux_trace.push_back(fl);
        m.hF_trace.push_back(hf);
    }
    return m;
}

PairSolve solve_pair_with_shared_dirichlet(const ConfigTriplet& cfg1, const ConfigTriplet& cfg2, const Grid2D& grid,
                                           const BoundaryFn& psi, const InitialFn& u_init, const SolverOptions& opt) {
    PairSolve out;
    out.field1 = solve_forward(cfg1, grid, psi, u_init, opt);
    out.field2 = solve_forward(cfg2, grid, psi, u_init, opt);
    for (Piece p : {Piece::G1, Piece::G2, Piece::G3, Piece::G4}) {
        const MeasurementTrace a = boundary_measurement(out.field1, cfg1, p, 0.0, grid.T);
        const MeasurementTrace b = boundary_measurement(out.field2, cfg2, p, 0.0, grid.T);
        PieceMismatch pm;
        pm.piece = p;
        for (size_t k = 0; k < a.times.size(); ++k)
            for (size_t i = 0; i < a.nodes.size(); ++i) {
                pm.u_sup = std::max(pm.u_sup, std::abs(a.u_trace[k][i] - b.u_trace[k][i]));
                pm.flux_sup = std::max(pm.flux_sup, std::abs(a.flux_trace[k][i] - b.flux_trace[k][i]));
            }
        out.max_u_mismatch = std::max(out.max_u_mismatch, pm.u_sup);
        out.max_flux_mismatch = std::max(out.max_flux_mismatch, pm.flux_sup);
        out.mismatch.push_back(pm);
    }
    return out;
}

double ConvergenceStudy::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
}

ConvergenceStudy mms_convergence(ConfigTriplet cfg, const ProbeSubdomain& sub, const ScalarField& exact, double T,
                                 int n0, int nt0, int levels, const SolverOptions& opt) {
    if (levels < 2) throw DomainError("mms_convergence: need at least two levels");
    cfg.f.forcing = mms_forcing(exact, cfg);
    const BoundaryFn psi = [exact](const Vec3& x, double t) { return exact.value(x, t); };
    const InitialFn init = [exact](const Vec3& x) { return exact.value(x, 0.0); };
    ConvergenceStudy st;
    for (int k = 0; k < levels; ++k) {
        const int n = (n0 - 1) * (1 << k) + 1, nt = nt0 * (1 << (2 * k));
        const Grid2D grid = Grid2D::make(sub, n, n, nt, T);
        const SpaceTimeField u = solve_forward(cfg, grid, psi, init, opt);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                err = std::max(err, std::abs(u.at(nt, i, j) - exact.value(grid.point(i, j), T)));
        st.n.push_back(n);
        st.nt.push_back(nt);
        st.h.push_back(grid.min_spacing());
        st.errors.push_back(err);
        if (k > 0) st.orders.push_back(std::log2(st.errors[k - 1] / err));
    }
    return st;
}

std::string field_csv(const SpaceTimeField& field) {
    std::string out = "t,x1,eta,value\n";
    const Grid2D& g = field.grid;
    char buf[128];
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n_eta; ++j) {
                std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.15e\n", g.time(k), g.x1[i], g.eta[j],
                              field.at(k, i, j));
                out += buf;
            }
    return out;
}

void write_field_csv(const SpaceTimeField& field, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw Error("cannot open " + path + " for writing");
    const std::string text = field_csv(field);
    std::fwrite(text.data(), 1, text.size(), fp);
    std::fclose(fp);
}

}  // namespace thinprobe
