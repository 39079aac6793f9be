#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thinprobe/jet.hpp"

namespace thinprobe {

enum class CurveKind { straight, linear_tilt, sine };

// Centerline over the parameter interval I = (-L, L). In 2D the curve is
// (a, g(a)); in 3D it is (a, 0, g(a)) so that after alignment it lies in the
// local x2-x3 plane.
class Curve {
public:
    CurveKind kind = CurveKind::straight;
    std::string spec_id = "straight";
    std::vector<double> params;
    double eps_scale = 0.1;
    double L = 1.0;
    int dim = 2;
    double amplitude_K = 1.0;

    Vec3 eval(double a) const;
    Vec3 deriv(double a) const;
    Vec3 second_deriv(double a) const;

    // Transverse displacement g(a) and its derivatives.
    double g(double a) const;
    double g1(double a) const;
    double g2(double a) const;

    double max_transverse_amplitude() const;
};

Curve build_curve(const std::string& spec_id, const std::vector<double>& params, double eps,
                  double L, int dim = 2, double K = 1.0);

class Frame {
public:
    int dim = 2;
    Mat3 R = Mat3::Identity();  // acts on the leading dim components
    double theta = 0.0;
    double beta_rot = 0.0;      // 3D only
    Vec3 translation = Vec3::Zero();

    Vec3 to_local(const Vec3& X) const { return R * (X - translation); }
    Vec3 to_global(const Vec3& x) const { return R.transpose() * x + translation; }
    Eigen::MatrixXd rotation_matrix() const { return R.topLeftCorner(dim, dim); }
};

Frame rotation_frame(const Curve& curve, double b1, int dim);

// The centerline seen from a frame, written as a graph over the along-curve
// coordinate: transverse = gamma(along). Inverts along(a) = x by Newton.
class LocalGraph {
public:
    LocalGraph() = default;
    LocalGraph(const Curve& curve, const Frame& frame, double b1);

    struct Value {
        double g, g1, g2;
    };
    Value eval(double x) const;
    Jet eval(const Jet& x) const;
    // Curve parameter whose image has along-coordinate x.
    double param_at(double x) const;
    bool flat() const { return flat_; }

    int along_axis = 0;
    int trans_axis = 1;

private:
    Curve curve_;
    Frame frame_;
    double b1_ = 0.0;
    bool flat_ = true;
    unsigned long id_ = 0;
};

enum class DomainKind { nozzle, slab };

enum class Piece { G1, G2, G3, G4, Gamma_eps, Omega_eps, Omega_eps_prime, Gamma_V, Gamma_f, Gamma_b };

std::string piece_name(Piece p);
Piece piece_from_name(const std::string& name);
std::string kind_name(DomainKind k);
DomainKind kind_from_name(const std::string& name);

struct ProbeSubdomain {
    int dim = 2;
    DomainKind kind = DomainKind::nozzle;
    double eps = 0.1;
    double l = 1.0;
    double l0 = 1.0;
    double origin_param = 0.0;
    Frame frame;
    Curve curve;
    LocalGraph graph;

    double extent() const;  // eps^l
    int along_axis() const { return dim == 2 ? 0 : 1; }
    int trans_axis() const { return dim == 2 ? 1 : 2; }
    int cross_axis() const { return dim == 2 ? -1 : 0; }
    // diam(E) for the cross-section E = (0, eps) in 3D.
    double cross_section_diameter() const { return eps; }

    std::vector<Piece> boundary_pieces() const;
    double piece_measure(Piece p) const;
    // Local point from mapped coordinates (along, eta, xi); xi is ignored in 2D.
    Vec3 point(double along, double eta, double xi = 0.0) const;
    Vec3 center() const;
    bool contains(const Vec3& x, double tol = 1e-12) const;
    // Mapped transverse coordinate eta = (x_trans - gamma(x_along)) / eps.
    double eta_of(const Vec3& x) const;
};

std::vector<std::pair<double, double>> parallel_tangent_pairs(const Curve& curve, double l, double eps,
                                                              double tol = 1e-10);

ProbeSubdomain extract_probe_subdomain(const Curve& curve, double b1, double eps, double l, int dim,
                                       DomainKind kind = DomainKind::nozzle);

// Left-to-right cover of I by ceil(2L / eps^l) probe subdomains; the last one
// is shifted left so it ends at L.
std::vector<ProbeSubdomain> tile_probe_subdomains(const Curve& curve, double eps, double l, int dim,
                                                  DomainKind kind = DomainKind::nozzle);

struct BoundaryNodes {
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;
    std::vector<double> weights;  // surface (arc-length in 2D) measure
};

// 2D pieces use n nodes; 3D faces use n x n nodes. Unions (Gamma_eps, Gamma_V)
// concatenate their faces.
BoundaryNodes boundary_nodes(const ProbeSubdomain& sub, Piece piece, int n);

struct VolumeNodes {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    // mapped coordinates of each node (along, eta, xi)
    std::vector<Vec3> mapped;
};

// counts: 2D {n_along, n_eta}; 3D {n_cross, n_along, n_eta}.
VolumeNodes volume_nodes(const ProbeSubdomain& sub, const std::vector<int>& counts);

}  // namespace thinprobe
