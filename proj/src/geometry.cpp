#include "thinprobe/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "thinprobe/errors.hpp"
#include "thinprobe/quadrature.hpp"

namespace thinprobe {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

double Curve::g(double a) const {
    switch (kind) {
        case CurveKind::straight: return 0.0;
        case CurveKind::linear_tilt: return params[0] * a;
        case CurveKind::sine: return params[0] * eps_scale * std::sin(params[1] * a);
    }
    return 0.0;
}

double Curve::g1(double a) const {
    switch (kind) {
        case CurveKind::straight: return 0.0;
        case CurveKind::linear_tilt: return params[0];
        case CurveKind::sine: return params[0] * eps_scale * params[1] * std::cos(params[1] * a);
    }
    return 0.0;
}

double Curve::g2(double a) const {
    if (kind != CurveKind::sine) return 0.0;
    return -params[0] * eps_scale * params[1] * params[1] * std::sin(params[1] * a);
}

Vec3 Curve::eval(double a) const {
    return dim == 2 ? Vec3(a, g(a), 0.0) : Vec3(a, 0.0, g(a));
}

Vec3 Curve::deriv(double a) const {
    return dim == 2 ? Vec3(1.0, g1(a), 0.0) : Vec3(1.0, 0.0, g1(a));
}

Vec3 Curve::second_deriv(double a) const {
    return dim == 2 ? Vec3(0.0, g2(a), 0.0) : Vec3(0.0, 0.0, g2(a));
}

double Curve::max_transverse_amplitude() const {
    switch (kind) {
        case CurveKind::straight: return 0.0;
        case CurveKind::linear_tilt: return std::abs(params[0]) * L;
        case CurveKind::sine: {
            const double A = std::abs(params[0]) * eps_scale;
            const double w = std::abs(params[1]);
            return (w * L >= M_PI / 2) ? A : A * std::sin(w * L);
        }
    }
    return 0.0;
}

Curve build_curve(const std::string& spec_id, const std::vector<double>& params, double eps, double L,
                  int dim, double K) {
    if (!(eps > 0)) throw DomainError("build_curve: eps must be positive");
    if (!(L > 0)) throw DomainError("build_curve: L must be positive");
    if (dim != 2 && dim != 3) throw DomainError("build_curve: dim must be 2 or 3");
    if (!(K > 0)) throw DomainError("build_curve: amplitude constant K must be positive");
    Curve c;
    c.spec_id = spec_id;
    c.params = params;
    c.eps_scale = eps;
    c.L = L;
    c.dim = dim;
    c.amplitude_K = K;
    if (spec_id == "straight") {
        c.kind = CurveKind::straight;
        if (!params.empty()) throw DomainError("build_curve: straight takes no parameters");
    } else if (spec_id == "linear-tilt") {
        c.kind = CurveKind::linear_tilt;
        if (params.size() != 1) throw DomainError("build_curve: linear-tilt expects [slope]");
    } else if (spec_id == "sine") {
        c.kind = CurveKind::sine;
        if (params.size() != 2) throw DomainError("build_curve: sine expects [amp, freq]");
        if (std::abs(params[0]) > K)
            throw DomainError("build_curve: sine amplitude coefficient " + fmt_num(params[0]) +
                              " (units of eps) exceeds the declared bound K = " + fmt_num(K));
    } else {
        throw DomainError("build_curve: unknown curve id '" + spec_id + "'");
    }
    const double amp = c.max_transverse_amplitude();
    if (amp > K * eps * (1 + 1e-12))
        throw DomainError("build_curve: transverse amplitude " + fmt_num(amp) + " violates |gamma| <= K*eps = " +
                          fmt_num(K * eps));
    return c;
}

Frame rotation_frame(const Curve& curve, double b1, int dim) {
    if (dim != curve.dim) throw DomainError("rotation_frame: dimension mismatch with curve");
    if (!(b1 >= -curve.L && b1 <= curve.L)) throw DomainError("rotation_frame: b1 outside I");
    Vec3 t = curve.deriv(b1);
    const double nt = t.norm();
    if (nt < 1e-14) throw DomainError("rotation_frame: degenerate tangent");
    t /= nt;
    Frame f;
    f.dim = dim;
    f.translation = curve.eval(b1);
    if (dim == 2) {
        const double th = std::atan2(t[1], t[0]);
        const double c = std::cos(th), s = std::sin(th);
        f.theta = th;
        f.R << c, s, 0, -s, c, 0, 0, 0, 1;
    } else {
        const double th = std::atan2(-t[2], t[0]);
        const double rho = std::hypot(t[0], t[2]);
        const double be = std::atan2(-rho, t[1]);
        const double ct = std::cos(th), st = std::sin(th), cb = std::cos(be), sb = std::sin(be);
        f.theta = th;
        f.beta_rot = be;
        f.R << cb * ct, sb, -cb * st, -sb * ct, cb, sb * st, st, 0, ct;
    }
    return f;
}

namespace {

std::atomic<unsigned long> graph_counter{1};

struct GraphCache {
    unsigned long id = 0;
    double x = 0.0;
    LocalGraph::Value val{};
};

thread_local GraphCache graph_cache;

}  // namespace

LocalGraph::LocalGraph(const Curve& curve, const Frame& frame, double b1)
    : curve_(curve), frame_(frame), b1_(b1) {
    along_axis = curve.dim == 2 ? 0 : 1;
    trans_axis = curve.dim == 2 ? 1 : 2;
    flat_ = curve.kind != CurveKind::sine;
    id_ = graph_counter.fetch_add(1);
}

double LocalGraph::param_at(double x) const {
    const Vec3 t0 = frame_.R * curve_.deriv(b1_);
    if (flat_) return b1_ + x / t0[along_axis];
    double a = b1_ + x / t0[along_axis];
    for (int it = 0; it < 60; ++it) {
        const double f = frame_.to_local(curve_.eval(a))[along_axis] - x;
        const double fp = (frame_.R * curve_.deriv(a))[along_axis];
        const double da = f / fp;
        a -= da;
        if (std::abs(da) <= 1e-16 * (1.0 + std::abs(a))) break;
    }
    return a;
}

LocalGraph::Value LocalGraph::eval(double x) const {
    if (flat_) return {0.0, 0.0, 0.0};
    if (graph_cache.id == id_ && graph_cache.x == x) return graph_cache.val;
    const double a = param_at(x);
    const Vec3 p = frame_.to_local(curve_.eval(a));
    const Vec3 d1 = frame_.R * curve_.deriv(a);
    const Vec3 d2 = frame_.R * curve_.second_deriv(a);
    const double xa = d1[along_axis], ya = d1[trans_axis];
    const double xaa = d2[along_axis], yaa = d2[trans_axis];
    Value v{p[trans_axis], ya / xa, (yaa * xa - ya * xaa) / (xa * xa * xa)};
    graph_cache = {id_, x, v};
    return v;
}

Jet LocalGraph::eval(const Jet& x) const {
    if (flat_) return Jet(0.0);
    const Value v = eval(x.v);
    return chain(x, v.g, v.g1, v.g2);
}

std::string piece_name(Piece p) {
    switch (p) {
        case Piece::G1: return "G1";
        case Piece::G2: return "G2";
        case Piece::G3: return "G3";
        case Piece::G4: return "G4";
        case Piece::Gamma_eps: return "Gamma_eps";
        case Piece::Omega_eps: return "Omega_eps";
        case Piece::Omega_eps_prime: return "Omega_eps_prime";
        case Piece::Gamma_V: return "Gamma_V";
        case Piece::Gamma_f: return "Gamma_f";
        case Piece::Gamma_b: return "Gamma_b";
    }
    return "?";
}

Piece piece_from_name(const std::string& name) {
    for (Piece p : {Piece::G1, Piece::G2, Piece::G3, Piece::G4, Piece::Gamma_eps, Piece::Omega_eps,
                    Piece::Omega_eps_prime, Piece::Gamma_V, Piece::Gamma_f, Piece::Gamma_b})
        if (piece_name(p) == name) return p;
    throw DomainError("unknown boundary piece '" + name + "'");
}

std::string kind_name(DomainKind k) { return k == DomainKind::nozzle ? "nozzle" : "slab"; }

DomainKind kind_from_name(const std::string& name) {
    if (name == "nozzle") return DomainKind::nozzle;
    if (name == "slab") return DomainKind::slab;
    throw DomainError("unknown domain kind '" + name + "'");
}

double ProbeSubdomain::extent() const { return std::pow(eps, l); }

std::vector<Piece> ProbeSubdomain::boundary_pieces() const {
    if (dim == 2) return {Piece::G1, Piece::G2, Piece::G3, Piece::G4};
    if (kind == DomainKind::nozzle) return {Piece::Gamma_eps, Piece::Omega_eps, Piece::Omega_eps_prime};
    return {Piece::Gamma_V, Piece::Omega_eps, Piece::Omega_eps_prime, Piece::Gamma_f, Piece::Gamma_b};
}

Vec3 ProbeSubdomain::point(double along, double eta, double xi) const {
    Vec3 x = Vec3::Zero();
    x[along_axis()] = along;
    x[trans_axis()] = graph.eval(along).g + eps * eta;
    if (dim == 3) x[cross_axis()] = eps * xi;
    return x;
}

Vec3 ProbeSubdomain::center() const { return point(0.5 * extent(), 0.5, 0.5); }

double ProbeSubdomain::eta_of(const Vec3& x) const {
    return (x[trans_axis()] - graph.eval(x[along_axis()]).g) / eps;
}

bool ProbeSubdomain::contains(const Vec3& x, double tol) const {
    const double a = x[along_axis()];
    if (a < -tol * extent() || a > extent() * (1 + tol)) return false;
    const double e = eta_of(x);
    if (e < -tol || e > 1 + tol) return false;
    if (dim == 3) {
        const double c = x[cross_axis()];
        if (c < -tol * eps || c > eps * (1 + tol)) return false;
    } else if (std::abs(x[2]) > tol) {
        return false;
    }
    return true;
}

namespace {

enum class Face { G1, G2, G3, G4, Omega, OmegaP, X1Lo, X1Hi, Bottom, Top };

double arc_length(const ProbeSubdomain& sub) {
    if (sub.graph.flat()) return sub.extent();
    const AxisRule r = simpson(0.0, sub.extent(), 4097);
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) {
        const double g1 = sub.graph.eval(r.nodes[i]).g1;
        s += r.weights[i] * std::sqrt(1.0 + g1 * g1);
    }
    return s;
}

void append_face(const ProbeSubdomain& sub, Face face, int n, BoundaryNodes& out) {
    const double eps = sub.eps, ext = sub.extent();
    const int A = sub.along_axis(), T = sub.trans_axis();
    auto push = [&](const Vec3& x, const Vec3& nrm, double w) {
        out.nodes.push_back(x);
        out.normals.push_back(nrm);
        out.weights.push_back(w);
    };
    const AxisRule eta = simpson(0.0, 1.0, n);
    const AxisRule along = simpson(0.0, ext, n);
    const AxisRule cross = simpson(0.0, 1.0, n);
    Vec3 e_along = Vec3::Zero(), e_cross = Vec3::Zero();
    e_along[A] = 1.0;
    if (sub.dim == 3) e_cross[sub.cross_axis()] = 1.0;
    switch (face) {
        case Face::G2:
        case Face::G4: {
            const double a = face == Face::G2 ? 0.0 : ext;
            const Vec3 nrm = face == Face::G2 ? Vec3(-e_along) : e_along;
            for (int j = 0; j < n; ++j) push(sub.point(a, eta.nodes[j]), nrm, eps * eta.weights[j]);
            break;
        }
        case Face::G1:
        case Face::G3: {
            const double e = face == Face::G1 ? 0.0 : 1.0;
            const double sgn = face == Face::G1 ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i) {
                const double g1 = sub.graph.eval(along.nodes[i]).g1;
                const double js = std::sqrt(1.0 + g1 * g1);
                Vec3 nrm = Vec3::Zero();
                nrm[A] = sgn * g1 / js;
                nrm[T] = -sgn / js;
                push(sub.point(along.nodes[i], e), nrm, along.weights[i] * js);
            }
            break;
        }
        case Face::Omega:
        case Face::OmegaP: {
            const double a = face == Face::Omega ? 0.0 : ext;
            const Vec3 nrm = face == Face::Omega ? Vec3(-e_along) : e_along;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    push(sub.point(a, eta.nodes[j], cross.nodes[i]), nrm,
                         eps * cross.weights[i] * eps * eta.weights[j]);
            break;
        }
        case Face::X1Lo:
        case Face::X1Hi: {
            const double c = face == Face::X1Lo ? 0.0 : 1.0;
            const Vec3 nrm = face == Face::X1Lo ? Vec3(-e_cross) : e_cross;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    push(sub.point(along.nodes[i], eta.nodes[j], c), nrm, along.weights[i] * eps * eta.weights[j]);
            break;
        }
        case Face::Bottom:
        case Face::Top: {
            const double e = face == Face::Bottom ? 0.0 : 1.0;
            const double sgn = face == Face::Bottom ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    const double g1 = sub.graph.eval(along.nodes[k]).g1;
                    const double js = std::sqrt(1.0 + g1 * g1);
                    Vec3 nrm = Vec3::Zero();
                    nrm[A] = sgn * g1 / js;
                    nrm[T] = -sgn / js;
                    push(sub.point(along.nodes[k], e, cross.nodes[i]), nrm, eps * cross.weights[i] * along.weights[k] * js);
                }
            break;
        }
    }
}

std::vector<Face> faces_of(const ProbeSubdomain& sub, Piece piece) {
    const auto allowed = sub.boundary_pieces();
    if (std::find(allowed.begin(), allowed.end(), piece) == allowed.end())
        throw DomainError("boundary piece " + piece_name(piece) + " does not belong to this " +
                          std::to_string(sub.dim) + "D " + kind_name(sub.kind) + " subdomain");
    switch (piece) {
        case Piece::G1: return {Face::G1};
        case Piece::G2: return {Face::G2};
        case Piece::G3: return {Face::G3};
        case Piece::G4: return {Face::G4};
        case Piece::Omega_eps: return {Face::Omega};
        case Piece::Omega_eps_prime: return {Face::OmegaP};
        case Piece::Gamma_b: return {Face::X1Lo};
        case Piece::Gamma_f: return {Face::X1Hi};
        case Piece::Gamma_V: return {Face::Bottom, Face::Top};
        case Piece::Gamma_eps: return {Face::X1Lo, Face::X1Hi, Face::Bottom, Face::Top};
    }
    return {};
}

}  // namespace

double ProbeSubdomain::piece_measure(Piece p) const {
    (void)faces_of(*this, p);
    const double ext = extent();
    switch (p) {
        case Piece::G2:
        case Piece::G4: return eps;
        case Piece::G1:
        case Piece::G3: return arc_length(*this);
        case Piece::Omega_eps:
        case Piece::Omega_eps_prime: return eps * eps;
        case Piece::Gamma_f:
        case Piece::Gamma_b: return eps * ext;
        case Piece::Gamma_V: return 2.0 * eps * arc_length(*this);
        case Piece::Gamma_eps: return 2.0 * eps * ext + 2.0 * eps * arc_length(*this);
    }
    return 0.0;
}

BoundaryNodes boundary_nodes(const ProbeSubdomain& sub, Piece piece, int n) {
    if (n < 3 || n % 2 == 0) throw DomainError("boundary_nodes: n must be odd and >= 3");
    BoundaryNodes out;
    for (Face f : faces_of(sub, piece)) append_face(sub, f, n, out);
    return out;
}

VolumeNodes volume_nodes(const ProbeSubdomain& sub, const std::vector<int>& counts) {
    VolumeNodes out;
    const double eps = sub.eps;
    if (sub.dim == 2) {
        if (counts.size() != 2) throw DomainError("volume_nodes: 2D needs {n_along, n_eta}");
        const AxisRule a = simpson(0.0, sub.extent(), counts[0]);
        const AxisRule e = simpson(0.0, 1.0, counts[1]);
        for (int i = 0; i < counts[0]; ++i)
            for (int j = 0; j < counts[1]; ++j) {
                out.nodes.push_back(sub.point(a.nodes[i], e.nodes[j]));
                out.weights.push_back(a.weights[i] * e.weights[j] * eps);
                out.mapped.emplace_back(a.nodes[i], e.nodes[j], 0.0);
            }
    } else {
        if (counts.size() != 3) throw DomainError("volume_nodes: 3D needs {n_cross, n_along, n_eta}");
        const AxisRule c = simpson(0.0, 1.0, counts[0]);
        const AxisRule a = simpson(0.0, sub.extent(), counts[1]);
        const AxisRule e = simpson(0.0, 1.0, counts[2]);
        for (int k = 0; k < counts[0]; ++k)
            for (int i = 0; i < counts[1]; ++i)
                for (int j = 0; j < counts[2]; ++j) {
                    out.nodes.push_back(sub.point(a.nodes[i], e.nodes[j], c.nodes[k]));
                    out.weights.push_back(eps * c.weights[k] * a.weights[i] * e.weights[j] * eps);
                    out.mapped.emplace_back(a.nodes[i], e.nodes[j], c.nodes[k]);
                }
    }
    return out;
}

std::vector<std::pair<double, double>> parallel_tangent_pairs(const Curve& curve, double l, double eps,
                                                              double tol) {
    if (!(tol > 0 && tol <= 1e-6)) throw DomainError("parallel_tangent_pairs: tol must lie in (0, 1e-6]");
    const double ext = std::pow(eps, l);
    const int per_window = 32;
    const double h = ext / per_window;
    const int n = static_cast<int>(std::floor(2.0 * curve.L / h + 1e-9)) + 1;
    std::vector<Vec3> tang(n);
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = -curve.L + i * h;
        tang[i] = curve.deriv(a[i]);
    }
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n && j - i <= per_window; ++j) {
            const double cr = tang[i].cross(tang[j]).norm();
            if (cr <= tol * tang[i].norm() * tang[j].norm()) out.emplace_back(a[i], a[j]);
        }
    }
    return out;
}

ProbeSubdomain extract_probe_subdomain(const Curve& curve, double b1, double eps, double l, int dim,
                                       DomainKind kind) {
    if (!(eps > 0)) throw DomainError("extract_probe_subdomain: eps must be positive");
    if (!(l > 0)) throw DomainError("extract_probe_subdomain: l must be positive");
    if (dim != curve.dim) throw DomainError("extract_probe_subdomain: curve dimension mismatch");
    if (kind == DomainKind::slab && dim != 3) throw DomainError("extract_probe_subdomain: slab requires dim = 3");
    if (std::abs(eps - curve.eps_scale) > 1e-14 * eps)
        throw DomainError("extract_probe_subdomain: eps differs from the curve's amplitude scale");
    const double ext = std::pow(eps, l);
    if (ext >= curve.L) throw DomainError("extract_probe_subdomain: eps^l >= L");
    if (b1 < -curve.L || b1 > curve.L) throw DomainError("extract_probe_subdomain: b1 outside I");
    ProbeSubdomain sub;
    sub.dim = dim;
    sub.kind = kind;
    sub.eps = eps;
    sub.l = l;
    sub.l0 = std::min(l, 1.0);
    sub.origin_param = b1;
    sub.curve = curve;
    sub.frame = rotation_frame(curve, b1, dim);
    sub.graph = LocalGraph(curve, sub.frame, b1);
    const double a_end = sub.graph.param_at(ext);
    if (a_end > curve.L * (1 + 1e-12))
        throw DomainError("extract_probe_subdomain: extent [b1, b1 + eps^l] exceeds I (ends at a = " +
                          fmt_num(a_end) + ")");
    return sub;
}

std::vector<ProbeSubdomain> tile_probe_subdomains(const Curve& curve, double eps, double l, int dim,
                                                  DomainKind kind) {
    const double ext = std::pow(eps, l);
    if (ext >= curve.L) throw DomainError("tile_probe_subdomains: eps^l >= L");
    const int count = static_cast<int>(std::ceil(2.0 * curve.L / ext - 1e-12));
    auto end_of = [&](double b) {
        const Frame f = rotation_frame(curve, b, dim);
        return LocalGraph(curve, f, b).param_at(ext);
    };
    double lo = -curve.L, hi = curve.L;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (end_of(mid) > curve.L ? hi : lo) = mid;
    }
    const double b_max = lo;
    std::vector<ProbeSubdomain> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double b = std::min(-curve.L + k * ext, b_max);
        out.push_back(extract_probe_subdomain(curve, b, eps, l, dim, kind));
    }
    return out;
}

}  // namespace thinprobe
