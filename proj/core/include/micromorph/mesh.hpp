#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "micromorph/geometry.hpp"

namespace micromorph {

/// Axis-aligned box domain with a uniform grid of sub-cubes.
struct BoxSpec {
  double lx = 1.0, ly = 1.0, lz = 1.0;
  int nx = 1, ny = 1, nz = 1;
};

/// Conforming tetrahedral mesh of a box with the full edge/face topology needed
/// by nodal and edge elements.
///
/// Conventions:
///  - vertex ids are lexicographic in (z,y,x): x fastest, z slowest;
///  - every cell lists its vertices with positive signed volume;
///  - edges are stored with the lower global vertex id first (canonical
///    direction), and cell_edge_signs records the orientation of each local
///    edge (0,1),(0,2),(0,3),(1,2),(1,3),(2,3) against the canonical one;
///  - faces are stored as sorted vertex triples.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;

  std::vector<std::array<int, 2>> edges;   // canonical: id[0] < id[1]
  std::vector<std::array<int, 3>> faces;   // sorted triples

  std::vector<std::array<int, 6>> cell_edges;
  std::vector<std::array<int, 6>> cell_edge_signs;  // +1 / -1
  std::vector<std::array<int, 4>> cell_faces;       // local face f is opposite vertex f
  std::vector<std::array<int, 4>> cell_face_signs;  // +1 if the stored triple is outward for the cell

  std::vector<std::array<int, 2>> face_cells;  // incident cells; second is -1 on the boundary

  std::vector<int> boundary_faces;       // face ids
  std::vector<Vec3> boundary_normals_;   // outward unit normals, parallel to boundary_faces
  std::vector<int> boundary_edges;       // edge ids
  std::vector<int> boundary_vertices;    // vertex ids

  std::vector<int> face_boundary_index;    // face id -> position in boundary_faces, or -1
  std::vector<int> edge_boundary_index;    // edge id -> position in boundary_edges, or -1
  std::vector<char> vertex_on_boundary;

  std::map<std::array<int, 2>, int> edge_index;  // canonical vertex pair -> edge id

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  double cell_volume(int c) const {
    const auto& t = cells[c];
    return tet_volume(vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]);
  }

  Vec3 edge_vector(int e) const { return vertices[edges[e][1]] - vertices[edges[e][0]]; }

  bool edge_is_boundary(int e) const { return edge_boundary_index[e] >= 0; }
};

/// Kuhn subdivision of the box: each sub-cube split into the 6 tetrahedra that
/// share its main diagonal. Throws std::invalid_argument on a bad spec.
Mesh build_box_mesh(const BoxSpec& spec);

/// Outward unit normal of a boundary face. Throws std::domain_error for
/// interior faces.
Vec3 boundary_normal(const Mesh& mesh, int face_id);

/// All boundary normals, indexed by face id (map face-id -> unit vector).
std::vector<std::pair<int, Vec3>> boundary_normals(const Mesh& mesh);

/// Edge id for an (unordered) vertex pair; throws std::domain_error if absent.
int find_edge(const Mesh& mesh, int a, int b);

/// Cells incident to each edge, in increasing cell id order.
std::vector<std::vector<int>> edge_to_cells(const Mesh& mesh);

}  // namespace micromorph
