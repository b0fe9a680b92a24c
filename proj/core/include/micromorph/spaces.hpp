#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "micromorph/mesh.hpp"
#include "micromorph/quadrature.hpp"

namespace micromorph {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;
using MatrixField = std::function<Mat3(const Vec3&)>;

//------------------------------------------------------------------------------
// Cell-local geometry and shape functions
//------------------------------------------------------------------------------

/// Affine geometry of one tetrahedron: vertex positions, constant barycentric
/// gradients, volume. Reference coordinates are (x,y,z) with
/// lambda = (1-x-y-z, x, y, z).
struct CellGeom {
  std::array<Vec3, 4> verts;
  std::array<Vec3, 4> grad_lambda;
  double volume = 0.0;

  Vec3 map(const Vec3& ref) const {
    return verts[0] * (1.0 - ref.x() - ref.y() - ref.z()) + verts[1] * ref.x() +
           verts[2] * ref.y() + verts[3] * ref.z();
  }
};

CellGeom cell_geometry(const Mesh& mesh, int cell);

inline std::array<double, 4> barycentric(const Vec3& ref) {
  return {1.0 - ref.x() - ref.y() - ref.z(), ref.x(), ref.y(), ref.z()};
}

/// Local edges of the reference tetrahedron, shared with Mesh::cell_edges.
constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

/// Lagrange shape values/gradients on a cell. Degree 1 fills 4 entries,
/// degree 2 fills 10 (vertices then local-edge midpoints).
int h1_shape(int degree, const CellGeom& geom, const Vec3& ref, double* values, Vec3* grads);

/// Lowest-order Nedelec basis on a cell, oriented canonically (low global
/// vertex id -> high). Values at a reference point and the per-cell constant
/// curls.
void nedelec_shape(const Mesh& mesh, int cell, const CellGeom& geom, const Vec3& ref,
                   std::array<Vec3, 6>& values);
void nedelec_curls(const Mesh& mesh, int cell, const CellGeom& geom, std::array<Vec3, 6>& curls);

//------------------------------------------------------------------------------
// Spaces
//------------------------------------------------------------------------------

/// Scalar Lagrange space of degree 1 or 2. Degree-2 nodes are the vertices
/// followed by the edge midpoints (node id = n_vertices + edge id).
struct H1ScalarSpace {
  const Mesh* mesh = nullptr;
  int degree = 1;
  std::vector<Vec3> nodes;
  std::vector<char> node_on_boundary;
  std::vector<int> boundary_nodes;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int nodes_per_cell() const { return degree == 1 ? 4 : 10; }
  std::array<int, 10> cell_nodes(int cell) const;
};

H1ScalarSpace make_h1_scalar(const Mesh& mesh, int degree);

/// Vector-valued Lagrange space; dofs interleaved as 3*node + component.
struct H1VectorSpace {
  H1ScalarSpace scalar;

  int n_dofs() const { return 3 * scalar.n_nodes(); }
  int dof(int node, int comp) const { return 3 * node + comp; }
  std::vector<int> boundary_dofs() const;
  const Mesh& mesh() const { return *scalar.mesh; }
};

H1VectorSpace make_h1_vector(const Mesh& mesh, int degree);

/// Lowest-order first-kind Nedelec space: one dof per global edge, the moment
/// of the tangential component along the canonically oriented edge.
struct HcurlSpace {
  const Mesh* mesh = nullptr;

  int n_dofs() const { return mesh->n_edges(); }
  std::vector<int> boundary_dofs() const;
};

HcurlSpace make_hcurl(const Mesh& mesh);

/// Second-order first-kind Nedelec space in hierarchical form: the Whitney
/// functions, the edge-bubble gradients grad(lambda_a lambda_b), and two
/// face functions per face (lb lc grad la and la lc grad lb for the globally
/// sorted face vertices a < b < c). Curl-free members are exactly the
/// gradients of the scalar degree-2 Lagrange space.
struct Hcurl2Space {
  const Mesh* mesh = nullptr;

  int n_dofs() const { return 2 * mesh->n_edges() + 2 * mesh->n_faces(); }
  int whitney_dof(int edge) const { return edge; }
  int egrad_dof(int edge) const { return mesh->n_edges() + edge; }
  int face_dof(int face, int which) const { return 2 * mesh->n_edges() + 2 * face + which; }
};

Hcurl2Space make_hcurl2(const Mesh& mesh);

/// Values and curls of the 20 local basis functions of Hcurl2Space on a cell,
/// together with their global dof ids.
struct Hcurl2CellBasis {
  std::array<int, 20> dofs;
  std::array<Vec3, 20> values;
  std::array<Vec3, 20> curls;
};

void hcurl2_shape(const Mesh& mesh, int cell, const CellGeom& geom, const Vec3& ref,
                  Hcurl2CellBasis& out);

/// Evaluation of a discrete Hcurl2 field and of its (piecewise linear) curl.
Vec3 evaluate_hcurl2(const Hcurl2Space& space, const Eigen::VectorXd& coeffs, int cell,
                     const Vec3& ref);
Vec3 evaluate_hcurl2_curl(const Hcurl2Space& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref);

/// Tangential boundary data for one H(curl) field: the edge moments
/// int_e <v, t_e> ds over every boundary edge, indexed by boundary-edge
/// ordinal. Only tangential information is representable, so <G, n> = 0 holds
/// by construction.
struct TangentialTraceData {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd moments;

  static TangentialTraceData zero(const Mesh& mesh);
};

//------------------------------------------------------------------------------
// Interpolation and traces
//------------------------------------------------------------------------------

Eigen::VectorXd interpolate_h1_scalar(const H1ScalarSpace& space, const ScalarField& f);
Eigen::VectorXd interpolate_h1(const H1VectorSpace& space, const VectorField& f);

/// Edge moments by 2-point Gauss quadrature per edge; exact for constants and
/// linear fields.
Eigen::VectorXd interpolate_hcurl(const HcurlSpace& space, const VectorField& v);

/// Restriction of edge dofs to the boundary edges (the discrete tangential
/// trace map).
TangentialTraceData tangential_trace(const HcurlSpace& space, const Eigen::VectorXd& coeffs);

//------------------------------------------------------------------------------
// Discrete field evaluation
//------------------------------------------------------------------------------

double evaluate_h1_scalar(const H1ScalarSpace& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref);
Vec3 evaluate_h1_scalar_gradient(const H1ScalarSpace& space, const Eigen::VectorXd& coeffs,
                                 int cell, const Vec3& ref);
Vec3 evaluate_h1(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, int cell,
                 const Vec3& ref);
/// Row i is the gradient of component i.
Mat3 evaluate_h1_gradient(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref);
Vec3 evaluate_hcurl(const HcurlSpace& space, const Eigen::VectorXd& coeffs, int cell,
                    const Vec3& ref);
/// Per-cell constant curl of a discrete H(curl) field.
Vec3 cell_curl(const HcurlSpace& space, const Eigen::VectorXd& coeffs, int cell);

/// Brute-force point location; returns cell id and reference coordinates.
/// Throws std::domain_error if the point is outside the mesh.
std::pair<int, Vec3> locate_point(const Mesh& mesh, const Vec3& p, double tol = 1e-10);

/// Point evaluation of an H1 vector field. Snaps to nodal coefficients when
/// the point coincides with a node, so interpolating an already-discrete
/// field reproduces it bit-identically.
Vec3 evaluate_h1_at(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, const Vec3& p);

//------------------------------------------------------------------------------
// Boundary face frames (surface computations)
//------------------------------------------------------------------------------

/// In-plane data of one boundary triangle: vertex order matches the stored
/// (sorted) face triple; edge ids/orientations refer to the canonical global
/// edges.
struct FaceFrame {
  std::array<int, 3> verts;
  std::array<Vec3, 3> x;
  std::array<int, 3> edge_ids;          // edge opposite local vertex i... see note
  std::array<Vec3, 3> grad_lambda_tau;  // in-plane barycentric gradients
  Vec3 normal;                          // outward unit normal
  double area = 0.0;

  Vec3 map(double l1, double l2) const {
    return x[0] * (1.0 - l1 - l2) + x[1] * l1 + x[2] * l2;
  }
};

/// Frame for the boundary face with ordinal `bf` in mesh.boundary_faces.
/// edge_ids[k] is the edge between local vertices (a,b) in the fixed pair
/// order (0,1),(0,2),(1,2).
FaceFrame face_frame(const Mesh& mesh, int bf);

constexpr int kFaceEdgePairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

/// Whitney edge basis of the face evaluated at in-face barycentric
/// coordinates; entry k matches edge_ids[k], oriented canonically.
std::array<Vec3, 3> face_whitney(const FaceFrame& frame, double l1, double l2);

/// Tangential reconstruction of trace data on one boundary face.
Vec3 reconstruct_trace_on_face(const Mesh& mesh, const TangentialTraceData& data,
                               const FaceFrame& frame, double l1, double l2);

/// L2(boundary) norm of the facewise reconstruction of trace data.
double boundary_l2_norm(const Mesh& mesh, const TangentialTraceData& data);

}  // namespace micromorph
