#include <doctest.h>

#include <random>

#include "micromorph/spaces.hpp"

using namespace micromorph;

namespace {

// Quadrature oracle for L2 interpolation errors of H1 fields.
double l2_interp_error(const H1VectorSpace& space, const Eigen::VectorXd& coeffs,
                       const VectorField& exact) {
  const Mesh& mesh = *space.scalar.mesh;
  const QuadRule rule = tetrahedron_rule(6);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 diff =
          evaluate_h1(space, coeffs, c, rule.points[q]) - exact(geom.map(rule.points[q]));
      acc += rule.weights[q] * 6.0 * geom.volume * diff.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("H1 interpolation reproduces constants and linears exactly") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);

  const Eigen::VectorXd c123 = interpolate_h1(vu, [](const Vec3&) { return Vec3(1, 2, 3); });
  for (int n = 0; n < vu.scalar.n_nodes(); ++n) {
    CHECK(c123[vu.dof(n, 0)] == 1.0);
    CHECK(c123[vu.dof(n, 1)] == 2.0);
    CHECK(c123[vu.dof(n, 2)] == 3.0);
  }
  CHECK(l2_interp_error(vu, c123, [](const Vec3&) { return Vec3(1, 2, 3); }) < 1e-14);

  const VectorField linear = [](const Vec3& x) { return Vec3(x.x(), x.y(), x.z()); };
  CHECK(l2_interp_error(vu, interpolate_h1(vu, linear), linear) < 1e-13);
}

TEST_CASE("degree-1 interpolation error halves at second order") {
  const VectorField f = [](const Vec3& x) { return Vec3(x.x() * x.x(), 0.0, 0.0); };
  double errors[2];
  int i = 0;
  for (int nx : {2, 4}) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    const H1VectorSpace vu = make_h1_vector(mesh, 1);
    errors[i++] = l2_interp_error(vu, interpolate_h1(vu, f), f);
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("degree-2 space is exact on quadratics") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 2);
  const VectorField f = [](const Vec3& x) {
    return Vec3(x.x() * x.x() - x.y() * x.z(), x.y() * x.y(), x.z() * x.x());
  };
  CHECK(l2_interp_error(vu, interpolate_h1(vu, f), f) < 1e-13);
}

TEST_CASE("Nedelec interpolation: constant fields give edge-vector moments and exact reconstruction") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const HcurlSpace vp = make_hcurl(mesh);
  const Vec3 c(0.3, -1.2, 0.7);
  const Eigen::VectorXd coeffs = interpolate_hcurl(vp, [&](const Vec3&) { return c; });
  for (int e = 0; e < mesh.n_edges(); ++e)
    CHECK(coeffs[e] == doctest::Approx(c.dot(mesh.edge_vector(e))).epsilon(1e-13));

  const QuadRule rule = tetrahedron_rule(2);
  for (int cell = 0; cell < mesh.n_cells(); ++cell)
    for (std::size_t q = 0; q < rule.size(); ++q)
      CHECK((evaluate_hcurl(vp, coeffs, cell, rule.points[q]) - c).norm() < 1e-12);
}

TEST_CASE("commuting property: interpolated gradients are discretely curl-free") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 3, 2, 2});
  const HcurlSpace vp = make_hcurl(mesh);
  // grad(xyz) = (yz, xz, xy)
  const Eigen::VectorXd coeffs = interpolate_hcurl(
      vp, [](const Vec3& x) { return Vec3(x.y() * x.z(), x.x() * x.z(), x.x() * x.y()); });
  for (int c = 0; c < mesh.n_cells(); ++c) CHECK(cell_curl(vp, coeffs, c).norm() < 1e-12);
}

TEST_CASE("rotation field has exact constant discrete curl (0,0,2)") {
  // Hand-checkable on one Kuhn cube: (-y, x, 0) lies in the lowest-order
  // space, so interpolation reproduces it and its curl.
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 1, 1, 1});
  const HcurlSpace vp = make_hcurl(mesh);
  const Eigen::VectorXd coeffs =
      interpolate_hcurl(vp, [](const Vec3& x) { return Vec3(-x.y(), x.x(), 0.0); });
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK((cell_curl(vp, coeffs, c) - Vec3(0, 0, 2)).norm() < 1e-12);

  const QuadRule rule = tetrahedron_rule(2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      CHECK((evaluate_hcurl(vp, coeffs, c, rule.points[q]) - Vec3(-x.y(), x.x(), 0.0)).norm() <
            1e-12);
    }
  }
}

TEST_CASE("tangential trace: restriction, zero cases, surjectivity") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const HcurlSpace vp = make_hcurl(mesh);

  // Interior-supported coefficients have zero trace.
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(vp.n_dofs());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (!mesh.edge_is_boundary(e)) coeffs[e] = dist(rng);
  CHECK(tangential_trace(vp, coeffs).moments.norm() == 0.0);

  // Constant field: boundary moments are <c, edge vector>.
  const Vec3 c(1.0, -0.5, 0.25);
  const Eigen::VectorXd cc = interpolate_hcurl(vp, [&](const Vec3&) { return c; });
  const TangentialTraceData trace = tangential_trace(vp, cc);
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    CHECK(trace.moments[static_cast<int>(i)] ==
          doctest::Approx(c.dot(mesh.edge_vector(mesh.boundary_edges[i]))).epsilon(1e-13));

  // Surjectivity: any trace data is attained (boundary dofs set, interior 0).
  TangentialTraceData target = TangentialTraceData::zero(mesh);
  for (int i = 0; i < target.moments.size(); ++i) target.moments[i] = dist(rng);
  Eigen::VectorXd lifted = Eigen::VectorXd::Zero(vp.n_dofs());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    lifted[mesh.boundary_edges[i]] = target.moments[static_cast<int>(i)];
  CHECK((tangential_trace(vp, lifted).moments - target.moments).norm() == 0.0);
}

TEST_CASE("degree-1 interpolation is a projection (bit-identical)") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd coeffs(vu.n_dofs());
  for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = dist(rng);

  const Eigen::VectorXd again =
      interpolate_h1(vu, [&](const Vec3& x) { return evaluate_h1_at(vu, coeffs, x); });
  for (int i = 0; i < coeffs.size(); ++i) CHECK(again[i] == coeffs[i]);
}

TEST_CASE("Whitney face basis is dual to the face edge moments") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  for (std::size_t bf = 0; bf < std::min<std::size_t>(mesh.boundary_faces.size(), 8); ++bf) {
    const FaceFrame frame = face_frame(mesh, static_cast<int>(bf));
    for (int k = 0; k < 3; ++k) {
      const int a = kFaceEdgePairs[k][0], b = kFaceEdgePairs[k][1];
      const Vec3 pa = frame.x[a], pb = frame.x[b];
      for (int j = 0; j < 3; ++j) {
        double moment = 0.0;
        const int n_seg = 64;
        for (int s = 0; s < n_seg; ++s) {
          const double t = (s + 0.5) / n_seg;
          double lam[3] = {0.0, 0.0, 0.0};
          lam[a] = 1.0 - t;
          lam[b] = t;
          const auto w = face_whitney(frame, lam[1], lam[2]);
          moment += w[j].dot(pb - pa) / n_seg;
        }
        CHECK(moment == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
      }
    }
  }
}
