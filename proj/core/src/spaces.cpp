#include "micromorph/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace micromorph {

//------------------------------------------------------------------------------
// Cell-local geometry and shape functions
//------------------------------------------------------------------------------

CellGeom cell_geometry(const Mesh& mesh, int cell) {
  CellGeom g;
  const auto& t = mesh.cells[cell];
  for (int i = 0; i < 4; ++i) g.verts[i] = mesh.vertices[t[i]];

  Mat3 b;
  b.col(0) = g.verts[1] - g.verts[0];
  b.col(1) = g.verts[2] - g.verts[0];
  b.col(2) = g.verts[3] - g.verts[0];
  g.volume = b.determinant() / 6.0;

  const Mat3 binv = b.inverse();
  for (int i = 0; i < 3; ++i) g.grad_lambda[i + 1] = binv.row(i).transpose();
  g.grad_lambda[0] = -(g.grad_lambda[1] + g.grad_lambda[2] + g.grad_lambda[3]);
  return g;
}

int h1_shape(int degree, const CellGeom& geom, const Vec3& ref, double* values, Vec3* grads) {
  const auto lam = barycentric(ref);
  if (degree == 1) {
    for (int i = 0; i < 4; ++i) {
      if (values) values[i] = lam[i];
      if (grads) grads[i] = geom.grad_lambda[i];
    }
    return 4;
  }
  if (degree == 2) {
    for (int i = 0; i < 4; ++i) {
      if (values) values[i] = lam[i] * (2.0 * lam[i] - 1.0);
      if (grads) grads[i] = (4.0 * lam[i] - 1.0) * geom.grad_lambda[i];
    }
    for (int e = 0; e < 6; ++e) {
      const int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
      if (values) values[4 + e] = 4.0 * lam[a] * lam[b];
      if (grads)
        grads[4 + e] = 4.0 * (lam[a] * geom.grad_lambda[b] + lam[b] * geom.grad_lambda[a]);
    }
    return 10;
  }
  throw std::invalid_argument("h1_shape: degree must be 1 or 2");
}

void nedelec_shape(const Mesh& mesh, int cell, const CellGeom& geom, const Vec3& ref,
                   std::array<Vec3, 6>& values) {
  const auto lam = barycentric(ref);
  for (int e = 0; e < 6; ++e) {
    const int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
    const double sign = mesh.cell_edge_signs[cell][e];
    values[e] = sign * (lam[a] * geom.grad_lambda[b] - lam[b] * geom.grad_lambda[a]);
  }
}

void nedelec_curls(const Mesh& mesh, int cell, const CellGeom& geom, std::array<Vec3, 6>& curls) {
  for (int e = 0; e < 6; ++e) {
    const int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
    const double sign = mesh.cell_edge_signs[cell][e];
    curls[e] = 2.0 * sign * geom.grad_lambda[a].cross(geom.grad_lambda[b]);
  }
}

//------------------------------------------------------------------------------
// Spaces
//------------------------------------------------------------------------------

H1ScalarSpace make_h1_scalar(const Mesh& mesh, int degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("make_h1_scalar: degree must be 1 or 2");
  H1ScalarSpace space;
  space.mesh = &mesh;
  space.degree = degree;
  space.nodes.assign(mesh.vertices.begin(), mesh.vertices.end());
  space.node_on_boundary.assign(mesh.vertex_on_boundary.begin(), mesh.vertex_on_boundary.end());
  if (degree == 2) {
    space.nodes.reserve(mesh.n_vertices() + mesh.n_edges());
    space.node_on_boundary.resize(mesh.n_vertices() + mesh.n_edges(), 0);
    for (int e = 0; e < mesh.n_edges(); ++e) {
      space.nodes.push_back(0.5 * (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]));
      space.node_on_boundary[mesh.n_vertices() + e] = mesh.edge_is_boundary(e) ? 1 : 0;
    }
  }
  for (int i = 0; i < space.n_nodes(); ++i)
    if (space.node_on_boundary[i]) space.boundary_nodes.push_back(i);
  return space;
}

std::array<int, 10> H1ScalarSpace::cell_nodes(int cell) const {
  std::array<int, 10> out{};
  for (int i = 0; i < 4; ++i) out[i] = mesh->cells[cell][i];
  if (degree == 2)
    for (int e = 0; e < 6; ++e) out[4 + e] = mesh->n_vertices() + mesh->cell_edges[cell][e];
  return out;
}

H1VectorSpace make_h1_vector(const Mesh& mesh, int degree) {
  return H1VectorSpace{make_h1_scalar(mesh, degree)};
}

std::vector<int> H1VectorSpace::boundary_dofs() const {
  std::vector<int> out;
  out.reserve(scalar.boundary_nodes.size() * 3);
  for (int n : scalar.boundary_nodes)
    for (int c = 0; c < 3; ++c) out.push_back(dof(n, c));
  return out;
}

HcurlSpace make_hcurl(const Mesh& mesh) { return HcurlSpace{&mesh}; }

std::vector<int> HcurlSpace::boundary_dofs() const { return mesh->boundary_edges; }

Hcurl2Space make_hcurl2(const Mesh& mesh) { return Hcurl2Space{&mesh}; }

void hcurl2_shape(const Mesh& mesh, int cell, const CellGeom& geom, const Vec3& ref,
                  Hcurl2CellBasis& out) {
  const Hcurl2Space space{&mesh};
  const auto lam = barycentric(ref);

  for (int e = 0; e < 6; ++e) {
    const int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
    const double sign = mesh.cell_edge_signs[cell][e];
    const int edge = mesh.cell_edges[cell][e];

    out.dofs[e] = space.whitney_dof(edge);
    out.values[e] = sign * (lam[a] * geom.grad_lambda[b] - lam[b] * geom.grad_lambda[a]);
    out.curls[e] = 2.0 * sign * geom.grad_lambda[a].cross(geom.grad_lambda[b]);

    // grad(lambda_a lambda_b): symmetric in (a, b), hence orientation-free.
    out.dofs[6 + e] = space.egrad_dof(edge);
    out.values[6 + e] = lam[a] * geom.grad_lambda[b] + lam[b] * geom.grad_lambda[a];
    out.curls[6 + e].setZero();
  }

  constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (int lf = 0; lf < 4; ++lf) {
    const int face = mesh.cell_faces[cell][lf];
    // Local vertex indices ordered by global id, matching the stored triple.
    int order[3] = {kLocalFaces[lf][0], kLocalFaces[lf][1], kLocalFaces[lf][2]};
    std::sort(order, order + 3, [&](int i, int j) {
      return mesh.cells[cell][i] < mesh.cells[cell][j];
    });
    const int a = order[0], b = order[1], c = order[2];

    const int k1 = 12 + 2 * lf, k2 = k1 + 1;
    out.dofs[k1] = space.face_dof(face, 0);
    out.values[k1] = lam[b] * lam[c] * geom.grad_lambda[a];
    out.curls[k1] = lam[b] * geom.grad_lambda[c].cross(geom.grad_lambda[a]) +
                    lam[c] * geom.grad_lambda[b].cross(geom.grad_lambda[a]);
    out.dofs[k2] = space.face_dof(face, 1);
    out.values[k2] = lam[a] * lam[c] * geom.grad_lambda[b];
    out.curls[k2] = lam[a] * geom.grad_lambda[c].cross(geom.grad_lambda[b]) +
                    lam[c] * geom.grad_lambda[a].cross(geom.grad_lambda[b]);
  }
}

Vec3 evaluate_hcurl2(const Hcurl2Space& space, const Eigen::VectorXd& coeffs, int cell,
                     const Vec3& ref) {
  const Mesh& mesh = *space.mesh;
  const CellGeom geom = cell_geometry(mesh, cell);
  Hcurl2CellBasis basis;
  hcurl2_shape(mesh, cell, geom, ref, basis);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 20; ++k) out += coeffs[basis.dofs[k]] * basis.values[k];
  return out;
}

Vec3 evaluate_hcurl2_curl(const Hcurl2Space& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref) {
  const Mesh& mesh = *space.mesh;
  const CellGeom geom = cell_geometry(mesh, cell);
  Hcurl2CellBasis basis;
  hcurl2_shape(mesh, cell, geom, ref, basis);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 20; ++k) out += coeffs[basis.dofs[k]] * basis.curls[k];
  return out;
}

TangentialTraceData TangentialTraceData::zero(const Mesh& mesh) {
  return {&mesh, Eigen::VectorXd::Zero(static_cast<int>(mesh.boundary_edges.size()))};
}

//------------------------------------------------------------------------------
// Interpolation and traces
//------------------------------------------------------------------------------

Eigen::VectorXd interpolate_h1_scalar(const H1ScalarSpace& space, const ScalarField& f) {
  Eigen::VectorXd out(space.n_nodes());
  for (int i = 0; i < space.n_nodes(); ++i) out[i] = f(space.nodes[i]);
  return out;
}

Eigen::VectorXd interpolate_h1(const H1VectorSpace& space, const VectorField& f) {
  Eigen::VectorXd out(space.n_dofs());
  for (int i = 0; i < space.scalar.n_nodes(); ++i) {
    const Vec3 v = f(space.scalar.nodes[i]);
    for (int c = 0; c < 3; ++c) out[space.dof(i, c)] = v[c];
  }
  return out;
}

Eigen::VectorXd interpolate_hcurl(const HcurlSpace& space, const VectorField& v) {
  const Mesh& mesh = *space.mesh;
  // 2-point Gauss on [0,1].
  const double t0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double t1 = 0.5 + 0.5 / std::sqrt(3.0);
  Eigen::VectorXd out(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec3 a = mesh.vertices[mesh.edges[e][0]];
    const Vec3 d = mesh.edge_vector(e);
    out[e] = 0.5 * (v(a + t0 * d).dot(d) + v(a + t1 * d).dot(d));
  }
  return out;
}

TangentialTraceData tangential_trace(const HcurlSpace& space, const Eigen::VectorXd& coeffs) {
  const Mesh& mesh = *space.mesh;
  TangentialTraceData data = TangentialTraceData::zero(mesh);
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    data.moments[static_cast<int>(i)] = coeffs[mesh.boundary_edges[i]];
  return data;
}

//------------------------------------------------------------------------------
// Discrete field evaluation
//------------------------------------------------------------------------------

double evaluate_h1_scalar(const H1ScalarSpace& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref) {
  const CellGeom geom = cell_geometry(*space.mesh, cell);
  double values[10];
  const int n = h1_shape(space.degree, geom, ref, values, nullptr);
  const auto nodes = space.cell_nodes(cell);
  double out = 0.0;
  for (int i = 0; i < n; ++i) out += coeffs[nodes[i]] * values[i];
  return out;
}

Vec3 evaluate_h1_scalar_gradient(const H1ScalarSpace& space, const Eigen::VectorXd& coeffs,
                                 int cell, const Vec3& ref) {
  const CellGeom geom = cell_geometry(*space.mesh, cell);
  Vec3 grads[10];
  const int n = h1_shape(space.degree, geom, ref, nullptr, grads);
  const auto nodes = space.cell_nodes(cell);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < n; ++i) out += coeffs[nodes[i]] * grads[i];
  return out;
}

Vec3 evaluate_h1(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, int cell,
                 const Vec3& ref) {
  const CellGeom geom = cell_geometry(space.mesh(), cell);
  double values[10];
  const int n = h1_shape(space.scalar.degree, geom, ref, values, nullptr);
  const auto nodes = space.scalar.cell_nodes(cell);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) out[c] += coeffs[space.dof(nodes[i], c)] * values[i];
  return out;
}

Mat3 evaluate_h1_gradient(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, int cell,
                          const Vec3& ref) {
  const CellGeom geom = cell_geometry(space.mesh(), cell);
  Vec3 grads[10];
  const int n = h1_shape(space.scalar.degree, geom, ref, nullptr, grads);
  const auto nodes = space.scalar.cell_nodes(cell);
  Mat3 out = Mat3::Zero();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) out.row(c) += coeffs[space.dof(nodes[i], c)] * grads[i].transpose();
  return out;
}

Vec3 evaluate_hcurl(const HcurlSpace& space, const Eigen::VectorXd& coeffs, int cell,
                    const Vec3& ref) {
  const Mesh& mesh = *space.mesh;
  const CellGeom geom = cell_geometry(mesh, cell);
  std::array<Vec3, 6> values;
  nedelec_shape(mesh, cell, geom, ref, values);
  Vec3 out = Vec3::Zero();
  for (int e = 0; e < 6; ++e) out += coeffs[mesh.cell_edges[cell][e]] * values[e];
  return out;
}

Vec3 cell_curl(const HcurlSpace& space, const Eigen::VectorXd& coeffs, int cell) {
  const Mesh& mesh = *space.mesh;
  const CellGeom geom = cell_geometry(mesh, cell);
  std::array<Vec3, 6> curls;
  nedelec_curls(mesh, cell, geom, curls);
  Vec3 out = Vec3::Zero();
  for (int e = 0; e < 6; ++e) out += coeffs[mesh.cell_edges[cell][e]] * curls[e];
  return out;
}

std::pair<int, Vec3> locate_point(const Mesh& mesh, const Vec3& p, double tol) {
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    Mat3 b;
    b.col(0) = geom.verts[1] - geom.verts[0];
    b.col(1) = geom.verts[2] - geom.verts[0];
    b.col(2) = geom.verts[3] - geom.verts[0];
    const Vec3 ref = b.inverse() * (p - geom.verts[0]);
    const auto lam = barycentric(ref);
    bool inside = true;
    for (double l : lam)
      if (l < -tol) inside = false;
    if (inside) return {c, ref};
  }
  throw std::domain_error("locate_point: point outside mesh");
}

Vec3 evaluate_h1_at(const H1VectorSpace& space, const Eigen::VectorXd& coeffs, const Vec3& p) {
  for (int i = 0; i < space.scalar.n_nodes(); ++i) {
    if (space.scalar.nodes[i].x() == p.x() && space.scalar.nodes[i].y() == p.y() &&
        space.scalar.nodes[i].z() == p.z()) {
      return Vec3(coeffs[space.dof(i, 0)], coeffs[space.dof(i, 1)], coeffs[space.dof(i, 2)]);
    }
  }
  const auto [cell, ref] = locate_point(space.mesh(), p);
  return evaluate_h1(space, coeffs, cell, ref);
}

//------------------------------------------------------------------------------
// Boundary face frames
//------------------------------------------------------------------------------

FaceFrame face_frame(const Mesh& mesh, int bf) {
  FaceFrame frame;
  const int face_id = mesh.boundary_faces[bf];
  frame.verts = mesh.faces[face_id];
  for (int i = 0; i < 3; ++i) frame.x[i] = mesh.vertices[frame.verts[i]];
  frame.normal = mesh.boundary_normals_[bf];
  frame.area = triangle_area(frame.x[0], frame.x[1], frame.x[2]);

  const Vec3 u = frame.x[1] - frame.x[0];
  const Vec3 v = frame.x[2] - frame.x[0];
  Eigen::Matrix2d metric;
  metric << u.dot(u), u.dot(v), v.dot(u), v.dot(v);
  const Eigen::Matrix2d minv = metric.inverse();
  frame.grad_lambda_tau[1] = minv(0, 0) * u + minv(0, 1) * v;
  frame.grad_lambda_tau[2] = minv(1, 0) * u + minv(1, 1) * v;
  frame.grad_lambda_tau[0] = -(frame.grad_lambda_tau[1] + frame.grad_lambda_tau[2]);

  for (int k = 0; k < 3; ++k) {
    const int a = frame.verts[kFaceEdgePairs[k][0]];
    const int b = frame.verts[kFaceEdgePairs[k][1]];
    frame.edge_ids[k] = find_edge(mesh, a, b);
  }
  return frame;
}

std::array<Vec3, 3> face_whitney(const FaceFrame& frame, double l1, double l2) {
  const double lam[3] = {1.0 - l1 - l2, l1, l2};
  std::array<Vec3, 3> w;
  for (int k = 0; k < 3; ++k) {
    const int a = kFaceEdgePairs[k][0], b = kFaceEdgePairs[k][1];
    // Face vertices are sorted by global id, so (a,b) is already canonical.
    w[k] = lam[a] * frame.grad_lambda_tau[b] - lam[b] * frame.grad_lambda_tau[a];
  }
  return w;
}

Vec3 reconstruct_trace_on_face(const Mesh& mesh, const TangentialTraceData& data,
                               const FaceFrame& frame, double l1, double l2) {
  const auto w = face_whitney(frame, l1, l2);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    const int be = mesh.edge_boundary_index[frame.edge_ids[k]];
    out += data.moments[be] * w[k];
  }
  return out;
}

double boundary_l2_norm(const Mesh& mesh, const TangentialTraceData& data) {
  static const QuadRule rule = triangle_rule(2);
  double acc = 0.0;
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const FaceFrame frame = face_frame(mesh, static_cast<int>(bf));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 v =
          reconstruct_trace_on_face(mesh, data, frame, rule.points[q].x(), rule.points[q].y());
      acc += rule.weights[q] * 2.0 * frame.area * v.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

}  // namespace micromorph
