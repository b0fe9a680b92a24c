#include "micromorph/mesh.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace micromorph {

namespace {

// The 6 permutations of the axes; each one is a monotone vertex path
// 000 -> 111 through the sub-cube, i.e. one Kuhn tetrahedron.
constexpr int kAxisPerms[6][3] = {
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
};

int perm_sign(const int* p) {
  int inv = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

Mesh build_box_mesh(const BoxSpec& spec) {
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0) || !(spec.lz > 0.0))
    throw std::invalid_argument("box spec: lengths must be positive");
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1)
    throw std::invalid_argument("box spec: subdivisions must be positive");

  Mesh mesh;
  const int nvx = spec.nx + 1, nvy = spec.ny + 1, nvz = spec.nz + 1;
  const double hx = spec.lx / spec.nx, hy = spec.ly / spec.ny, hz = spec.lz / spec.nz;

  auto vid = [&](int ix, int iy, int iz) { return ix + nvx * (iy + nvy * iz); };

  mesh.vertices.reserve(static_cast<std::size_t>(nvx) * nvy * nvz);
  for (int iz = 0; iz < nvz; ++iz)
    for (int iy = 0; iy < nvy; ++iy)
      for (int ix = 0; ix < nvx; ++ix)
        mesh.vertices.emplace_back(ix * hx, iy * hy, iz * hz);

  mesh.cells.reserve(static_cast<std::size_t>(spec.nx) * spec.ny * spec.nz * 6);
  for (int iz = 0; iz < spec.nz; ++iz) {
    for (int iy = 0; iy < spec.ny; ++iy) {
      for (int ix = 0; ix < spec.nx; ++ix) {
        for (const auto& perm : kAxisPerms) {
          int corner[3] = {ix, iy, iz};
          std::array<int, 4> tet;
          tet[0] = vid(corner[0], corner[1], corner[2]);
          for (int s = 0; s < 3; ++s) {
            corner[perm[s]] += 1;
            tet[s + 1] = vid(corner[0], corner[1], corner[2]);
          }
          if (perm_sign(perm) < 0) std::swap(tet[1], tet[2]);
          mesh.cells.push_back(tet);
        }
      }
    }
  }

  // Global edge enumeration; canonical direction low id -> high id.
  constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::map<std::array<int, 2>, int> edge_ids;
  mesh.cell_edges.resize(mesh.cells.size());
  mesh.cell_edge_signs.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (int le = 0; le < 6; ++le) {
      int a = mesh.cells[c][kLocalEdges[le][0]];
      int b = mesh.cells[c][kLocalEdges[le][1]];
      const int sign = (a < b) ? 1 : -1;
      if (a > b) std::swap(a, b);
      const std::array<int, 2> key{a, b};
      auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) mesh.edges.push_back(key);
      mesh.cell_edges[c][le] = it->second;
      mesh.cell_edge_signs[c][le] = sign;
    }
  }

  // Global faces; local face f is opposite local vertex f.
  constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  std::map<std::array<int, 3>, int> face_ids;
  mesh.cell_faces.resize(mesh.cells.size());
  mesh.cell_face_signs.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (int lf = 0; lf < 4; ++lf) {
      std::array<int, 3> key{mesh.cells[c][kLocalFaces[lf][0]], mesh.cells[c][kLocalFaces[lf][1]],
                             mesh.cells[c][kLocalFaces[lf][2]]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = face_ids.try_emplace(key, static_cast<int>(mesh.faces.size()));
      if (inserted) {
        mesh.faces.push_back(key);
        mesh.face_cells.push_back({static_cast<int>(c), -1});
      } else {
        mesh.face_cells[it->second][1] = static_cast<int>(c);
      }
      mesh.cell_faces[c][lf] = it->second;

      // Orientation of the sorted triple relative to the cell: outward normal test.
      const Vec3& p0 = mesh.vertices[key[0]];
      const Vec3 n = (mesh.vertices[key[1]] - p0).cross(mesh.vertices[key[2]] - p0);
      const Vec3 opp = mesh.vertices[mesh.cells[c][lf]] - p0;
      mesh.cell_face_signs[c][lf] = (n.dot(opp) < 0.0) ? 1 : -1;
    }
  }

  // Boundary extraction and outward normals.
  mesh.face_boundary_index.assign(mesh.faces.size(), -1);
  mesh.edge_boundary_index.assign(mesh.edges.size(), -1);
  mesh.vertex_on_boundary.assign(mesh.vertices.size(), 0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.face_cells[f][1] >= 0) continue;
    mesh.face_boundary_index[f] = static_cast<int>(mesh.boundary_faces.size());
    mesh.boundary_faces.push_back(f);

    const auto& tri = mesh.faces[f];
    const int owner = mesh.face_cells[f][0];
    Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                 .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    n.normalize();
    // Point away from the owner cell's remaining vertex.
    Vec3 centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    for (int v : mesh.cells[owner]) {
      if (v != tri[0] && v != tri[1] && v != tri[2]) {
        if (n.dot(mesh.vertices[v] - centroid) > 0.0) n = -n;
        break;
      }
    }
    mesh.boundary_normals_.push_back(n);

    for (int v : tri) mesh.vertex_on_boundary[v] = 1;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        int a = tri[i], b = tri[j];
        if (a > b) std::swap(a, b);
        const int e = edge_ids.at({a, b});
        if (mesh.edge_boundary_index[e] < 0) {
          mesh.edge_boundary_index[e] = static_cast<int>(mesh.boundary_edges.size());
          mesh.boundary_edges.push_back(e);
        }
      }
    }
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.vertex_on_boundary[v]) mesh.boundary_vertices.push_back(v);

  mesh.edge_index = std::move(edge_ids);
  return mesh;
}

int find_edge(const Mesh& mesh, int a, int b) {
  if (a > b) std::swap(a, b);
  const auto it = mesh.edge_index.find({a, b});
  if (it == mesh.edge_index.end()) throw std::domain_error("find_edge: no such edge");
  return it->second;
}

std::vector<std::vector<int>> edge_to_cells(const Mesh& mesh) {
  std::vector<std::vector<int>> out(mesh.n_edges());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int e : mesh.cell_edges[c]) out[e].push_back(c);
  return out;
}

Vec3 boundary_normal(const Mesh& mesh, int face_id) {
  if (face_id < 0 || face_id >= mesh.n_faces())
    throw std::domain_error("boundary_normal: no such face");
  const int b = mesh.face_boundary_index[face_id];
  if (b < 0) throw std::domain_error("boundary_normal: face is interior");
  return mesh.boundary_normals_[b];
}

std::vector<std::pair<int, Vec3>> boundary_normals(const Mesh& mesh) {
  std::vector<std::pair<int, Vec3>> out;
  out.reserve(mesh.boundary_faces.size());
  for (std::size_t i = 0; i < mesh.boundary_faces.size(); ++i)
    out.emplace_back(mesh.boundary_faces[i], mesh.boundary_normals_[i]);
  return out;
}

}  // namespace micromorph
