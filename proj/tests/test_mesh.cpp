#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "micromorph/mesh.hpp"

using namespace micromorph;

namespace {

// Independent oracle: enumerate the unique vertex pairs appearing as local
// edges of the cells.
int brute_force_edge_count(const Mesh& mesh) {
  std::set<std::array<int, 2>> pairs;
  for (const auto& cell : mesh.cells) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        int a = cell[i], b = cell[j];
        if (a > b) std::swap(a, b);
        pairs.insert({a, b});
      }
    }
  }
  return static_cast<int>(pairs.size());
}

}  // namespace

TEST_CASE("unit cube with one subdivision: Kuhn counts") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 1, 1, 1});
  CHECK(mesh.n_vertices() == 8);
  CHECK(mesh.n_cells() == 6);
  CHECK(mesh.n_edges() == brute_force_edge_count(mesh));
  CHECK(mesh.n_edges() == 19);  // 12 cube edges + 6 face diagonals + 1 space diagonal
}

TEST_CASE("2x1x1 box: vertices and additive volume") {
  const Mesh mesh = build_box_mesh({2.0, 1.0, 1.0, 2, 1, 1});
  CHECK(mesh.n_vertices() == 12);
  double volume = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) volume += mesh.cell_volume(c);
  CHECK(volume == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_box_mesh({0.0, 1.0, 1.0, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_box_mesh({1.0, -1.0, 1.0, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_box_mesh({1.0, 1.0, 1.0, 0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_box_mesh({1.0, 1.0, 1.0, 1, 1, -2}), std::invalid_argument);
}

TEST_CASE("cell orientation and volume sum over several specs") {
  for (const BoxSpec spec : {BoxSpec{1.0, 1.0, 1.0, 2, 2, 2}, BoxSpec{0.5, 2.0, 1.5, 3, 1, 2},
                             BoxSpec{1.0, 1.0, 3.0, 1, 2, 3}}) {
    const Mesh mesh = build_box_mesh(spec);
    double volume = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      CHECK(mesh.cell_volume(c) > 0.0);
      volume += mesh.cell_volume(c);
    }
    CHECK(volume == doctest::Approx(spec.lx * spec.ly * spec.lz).epsilon(1e-12));
  }
}

TEST_CASE("interior faces shared by two cells, boundary faces by one") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const bool boundary = mesh.face_boundary_index[f] >= 0;
    CHECK((mesh.face_cells[f][1] >= 0) == !boundary);
  }
}

TEST_CASE("edge canonical orientation and cell-edge signs") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  for (const auto& e : mesh.edges) CHECK(e[0] < e[1]);
  constexpr int local_edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int le = 0; le < 6; ++le) {
      const int a = mesh.cells[c][local_edges[le][0]];
      const int b = mesh.cells[c][local_edges[le][1]];
      const auto& edge = mesh.edges[mesh.cell_edges[c][le]];
      if (mesh.cell_edge_signs[c][le] > 0) {
        CHECK(edge[0] == a);
        CHECK(edge[1] == b);
      } else {
        CHECK(edge[0] == b);
        CHECK(edge[1] == a);
      }
    }
  }
}

TEST_CASE("boundary normals are outward, axis-aligned, unit") {
  const BoxSpec spec{2.0, 1.0, 1.5, 2, 2, 2};
  const Mesh mesh = build_box_mesh(spec);
  for (const auto& [face, n] : boundary_normals(mesh)) {
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-14));
    // Axis-aligned: exactly one nonzero component.
    int nonzero = 0;
    for (int i = 0; i < 3; ++i)
      if (std::abs(n[i]) > 1e-14) ++nonzero;
    CHECK(nonzero == 1);

    const auto& tri = mesh.faces[face];
    const Vec3 centroid =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    // Outward: the face plane coordinate matches the box extremes.
    int axis = 0;
    n.cwiseAbs().maxCoeff(&axis);
    const double extent = axis == 0 ? spec.lx : (axis == 1 ? spec.ly : spec.lz);
    if (n[axis] > 0)
      CHECK(centroid[axis] == doctest::Approx(extent).epsilon(1e-13));
    else
      CHECK(centroid[axis] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("specific plane normals") {
  const BoxSpec spec{1.0, 1.0, 1.0, 2, 2, 2};
  const Mesh mesh = build_box_mesh(spec);
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const auto& tri = mesh.faces[mesh.boundary_faces[bf]];
    const Vec3 c =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    const Vec3 n = boundary_normal(mesh, mesh.boundary_faces[bf]);
    if (std::abs(c.x() - 1.0) < 1e-13) CHECK((n - Vec3(1, 0, 0)).norm() < 1e-14);
    if (std::abs(c.z()) < 1e-13) CHECK((n - Vec3(0, 0, -1)).norm() < 1e-14);
  }
}

TEST_CASE("interior face normal lookup is a domain error") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  int interior_face = -1;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face_boundary_index[f] < 0) {
      interior_face = f;
      break;
    }
  REQUIRE(interior_face >= 0);
  CHECK_THROWS_AS(boundary_normal(mesh, interior_face), std::domain_error);
}

TEST_CASE("closed-surface identity: sum of area-weighted normals vanishes") {
  const Mesh mesh = build_box_mesh({1.5, 1.0, 2.0, 2, 3, 1});
  Vec3 total = Vec3::Zero();
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const auto& tri = mesh.faces[mesh.boundary_faces[bf]];
    const double area =
        triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    total += area * mesh.boundary_normals_[bf];
  }
  CHECK(total.norm() < 1e-12);
}

TEST_CASE("boundary is a closed 2-manifold: every boundary edge in exactly 2 boundary faces") {
  const Mesh mesh = build_box_mesh({1.0, 2.0, 1.0, 2, 2, 3});
  std::map<int, int> edge_face_count;
  for (int f : mesh.boundary_faces) {
    const auto& tri = mesh.faces[f];
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        edge_face_count[find_edge(mesh, tri[i], tri[j])] += 1;
  }
  CHECK(edge_face_count.size() == mesh.boundary_edges.size());
  for (const auto& [edge, count] : edge_face_count) CHECK(count == 2);
}

TEST_CASE("Euler characteristics of the complex and its boundary") {
  for (int nx : {1, 2, 3}) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    // Solid ball: V - E + F - C = 1.
    CHECK(mesh.n_vertices() - mesh.n_edges() + mesh.n_faces() - mesh.n_cells() == 1);
    // Boundary sphere: V - E + F = 2.
    const int bv = static_cast<int>(mesh.boundary_vertices.size());
    const int be = static_cast<int>(mesh.boundary_edges.size());
    const int bfc = static_cast<int>(mesh.boundary_faces.size());
    CHECK(bv - be + bfc == 2);
  }
}

TEST_CASE("deterministic construction: two builds agree exactly") {
  const Mesh a = build_box_mesh({1.0, 1.0, 1.0, 3, 2, 2});
  const Mesh b = build_box_mesh({1.0, 1.0, 1.0, 3, 2, 2});
  CHECK(a.cells == b.cells);
  CHECK(a.edges == b.edges);
  CHECK(a.faces == b.faces);
  for (int v = 0; v < a.n_vertices(); ++v) CHECK(a.vertices[v] == b.vertices[v]);
}
