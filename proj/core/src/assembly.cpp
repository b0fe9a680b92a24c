#include "micromorph/assembly.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace micromorph {

namespace {

// Degree-4-exact rule used for every cell integral (exact for all products of
// lowest-order bases, with headroom for manufactured loads).
const QuadRule& cell_rule() {
  static const QuadRule rule = tetrahedron_rule(4);
  return rule;
}

// Fixed chunk count so that parallel assembly sums triplets in a
// machine-independent order.
constexpr int kAssemblyChunks = 8;

template <typename CellKernel>
std::vector<SparseMatrix::Triplet> assemble_cells(const Mesh& mesh, const CellKernel& kernel) {
  const int n_cells = mesh.n_cells();
  const int chunks = std::min(kAssemblyChunks, std::max(1, n_cells));
  std::vector<std::future<TripletBuffer>> futures;
  futures.reserve(chunks);
  for (int ch = 0; ch < chunks; ++ch) {
    const int begin = static_cast<int>(static_cast<std::int64_t>(n_cells) * ch / chunks);
    const int end = static_cast<int>(static_cast<std::int64_t>(n_cells) * (ch + 1) / chunks);
    futures.push_back(std::async(std::launch::async, [&kernel, begin, end]() {
      TripletBuffer buf;
      for (int c = begin; c < end; ++c) kernel(c, buf);
      return buf;
    }));
  }
  TripletBuffer all;
  for (auto& f : futures) all.append(f.get());
  return std::move(all.data());
}

}  // namespace

std::vector<std::string> validate_params(const MaterialParams& p) {
  std::vector<std::string> violations;
  if (!(p.mu_e > 0.0)) violations.push_back("mu_e > 0");
  if (!(2.0 * p.mu_e + 3.0 * p.lambda_e > 0.0)) violations.push_back("2*mu_e + 3*lambda_e > 0");
  if (!(p.mu_c >= 0.0)) violations.push_back("mu_c >= 0");
  if (!(p.mu_micro > 0.0)) violations.push_back("mu_micro > 0");
  if (!(2.0 * p.mu_micro + 3.0 * p.lambda_micro > 0.0))
    violations.push_back("2*mu_micro + 3*lambda_micro > 0");
  if (!(p.mu_macro > 0.0)) violations.push_back("mu_macro > 0");
  if (!(p.l_c > 0.0)) violations.push_back("L_c > 0");
  return violations;
}

BlockLayout block_layout(const H1VectorSpace& vu, const HcurlSpace& vp) {
  return BlockLayout{vu.n_dofs(), vp.n_dofs()};
}

std::vector<int> constrained_dofs(const H1VectorSpace& vu, const HcurlSpace& vp) {
  const BlockLayout layout = block_layout(vu, vp);
  std::vector<int> out;
  for (int d : vu.boundary_dofs()) out.push_back(layout.u_dof(d));
  for (int row = 0; row < 3; ++row)
    for (int e : vp.boundary_dofs()) out.push_back(layout.p_dof(row, e));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> complement(int n, const std::vector<int>& subset) {
  std::vector<char> mark(n, 0);
  for (int i : subset) mark[i] = 1;
  std::vector<int> out;
  out.reserve(n - static_cast<int>(subset.size()));
  for (int i = 0; i < n; ++i)
    if (!mark[i]) out.push_back(i);
  return out;
}

//------------------------------------------------------------------------------
// Micromorphic stiffness
//------------------------------------------------------------------------------

SparseMatrix assemble_micromorphic(const MaterialParams& p, const H1VectorSpace& vu,
                                   const HcurlSpace& vp) {
  const auto violations = validate_params(p);
  if (!violations.empty()) {
    std::string msg = "assemble_micromorphic: invalid material parameters:";
    for (const auto& v : violations) msg += " {" + v + "}";
    throw std::invalid_argument(msg);
  }
  if (vu.scalar.mesh != vp.mesh)
    throw std::invalid_argument("assemble_micromorphic: spaces use different meshes");

  const Mesh& mesh = *vp.mesh;
  const BlockLayout layout = block_layout(vu, vp);
  const QuadRule& rule = cell_rule();
  const int npc = vu.scalar.nodes_per_cell();
  const int nu_loc = 3 * npc;
  const int n_loc = nu_loc + 18;
  const double curl_coef = p.mu_macro * p.l_c * p.l_c;

  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = vu.scalar.cell_nodes(c);

    std::vector<int> dof(n_loc);
    for (int i = 0; i < npc; ++i)
      for (int comp = 0; comp < 3; ++comp) dof[3 * i + comp] = layout.u_dof(vu.dof(nodes[i], comp));
    for (int row = 0; row < 3; ++row)
      for (int e = 0; e < 6; ++e)
        dof[nu_loc + 6 * row + e] = layout.p_dof(row, mesh.cell_edges[c][e]);

    std::array<Vec3, 6> curls;
    nedelec_curls(mesh, c, geom, curls);

    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n_loc, n_loc);
    std::vector<Mat3> sym_d(n_loc), skew_d(n_loc), sym_p(n_loc), curl_p(n_loc);
    std::vector<double> tr_d(n_loc), tr_p(n_loc);

    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 grads[10];
      h1_shape(vu.scalar.degree, geom, rule.points[q], nullptr, grads);
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);

      for (int i = 0; i < npc; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
          const int k = 3 * i + comp;
          Mat3 d = Mat3::Zero();
          d.row(comp) = grads[i].transpose();
          sym_d[k] = sym(d);
          skew_d[k] = skew(d);
          tr_d[k] = d.trace();
          sym_p[k].setZero();
          tr_p[k] = 0.0;
          curl_p[k].setZero();
        }
      }
      for (int row = 0; row < 3; ++row) {
        for (int e = 0; e < 6; ++e) {
          const int k = nu_loc + 6 * row + e;
          Mat3 pm = Mat3::Zero();
          pm.row(row) = phi[e].transpose();
          // D contribution is -P for the micro-distortion basis.
          sym_d[k] = -sym(pm);
          skew_d[k] = -skew(pm);
          tr_d[k] = -pm.trace();
          sym_p[k] = sym(pm);
          tr_p[k] = pm.trace();
          curl_p[k].setZero();
          curl_p[k].row(row) = curls[e].transpose();
        }
      }

      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int k = 0; k < n_loc; ++k) {
        for (int l = k; l < n_loc; ++l) {
          double val = 2.0 * p.mu_e * ddot(sym_d[k], sym_d[l]) +
                       2.0 * p.mu_c * ddot(skew_d[k], skew_d[l]) +
                       p.lambda_e * tr_d[k] * tr_d[l] +
                       2.0 * p.mu_micro * ddot(sym_p[k], sym_p[l]) +
                       p.lambda_micro * tr_p[k] * tr_p[l] + curl_coef * ddot(curl_p[k], curl_p[l]);
          val *= w;
          buf.add(dof[k], dof[l], val);
          if (l != k) buf.add(dof[l], dof[k], val);
        }
      }
    }
  };

  return SparseMatrix::from_triplets(layout.total(), layout.total(),
                                     assemble_cells(mesh, kernel), true);
}

//------------------------------------------------------------------------------
// Mass matrices
//------------------------------------------------------------------------------

SparseMatrix assemble_scalar_mass(const H1ScalarSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = space.nodes_per_cell();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = space.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double values[10];
      h1_shape(space.degree, geom, rule.points[q], values, nullptr);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) buf.add(nodes[i], nodes[j], w * values[i] * values[j]);
    }
  };
  return SparseMatrix::from_triplets(space.n_nodes(), space.n_nodes(),
                                     assemble_cells(mesh, kernel), true);
}

SparseMatrix assemble_scalar_stiffness(const H1ScalarSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = space.nodes_per_cell();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = space.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 grads[10];
      h1_shape(space.degree, geom, rule.points[q], nullptr, grads);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < npc; ++j) buf.add(nodes[i], nodes[j], w * grads[i].dot(grads[j]));
    }
  };
  return SparseMatrix::from_triplets(space.n_nodes(), space.n_nodes(),
                                     assemble_cells(mesh, kernel), true);
}

Eigen::VectorXd assemble_scalar_volume_moments(const H1ScalarSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = space.nodes_per_cell();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_nodes());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = space.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double values[10];
      h1_shape(space.degree, geom, rule.points[q], values, nullptr);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < npc; ++i) out[nodes[i]] += w * values[i];
    }
  }
  return out;
}

SparseMatrix assemble_hcurl_mass(const HcurlSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          buf.add(mesh.cell_edges[c][i], mesh.cell_edges[c][j], w * phi[i].dot(phi[j]));
    }
  };
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), assemble_cells(mesh, kernel),
                                     true);
}

SparseMatrix assemble_hcurl_curlcurl(const HcurlSpace& space) {
  const Mesh& mesh = *space.mesh;
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    std::array<Vec3, 6> curls;
    nedelec_curls(mesh, c, geom, curls);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        buf.add(mesh.cell_edges[c][i], mesh.cell_edges[c][j],
                geom.volume * curls[i].dot(curls[j]));
  };
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), assemble_cells(mesh, kernel),
                                     true);
}

SparseMatrix assemble_gradient_pairing(const H1ScalarSpace& scalar, const HcurlSpace& vp) {
  const Mesh& mesh = *vp.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = scalar.nodes_per_cell();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 grads[10];
      h1_shape(scalar.degree, geom, rule.points[q], nullptr, grads);
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < npc; ++i)
        for (int j = 0; j < 6; ++j)
          buf.add(nodes[i], mesh.cell_edges[c][j], w * grads[i].dot(phi[j]));
    }
  };
  return SparseMatrix::from_triplets(scalar.n_nodes(), vp.n_dofs(), assemble_cells(mesh, kernel),
                                     false);
}

SparseMatrix assemble_mass(const H1VectorSpace& vu, const HcurlSpace& vp) {
  const BlockLayout layout = block_layout(vu, vp);
  const SparseMatrix mu = assemble_scalar_mass(vu.scalar);
  const SparseMatrix mp = assemble_hcurl_mass(vp);

  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(9 * mu.nnz() / 3 + 3 * mp.nnz());
  for (int r = 0; r < mu.rows(); ++r) {
    for (int k = mu.row_offsets()[r]; k < mu.row_offsets()[r + 1]; ++k) {
      for (int comp = 0; comp < 3; ++comp)
        triplets.push_back({layout.u_dof(vu.dof(r, comp)),
                            layout.u_dof(vu.dof(mu.col_indices()[k], comp)), mu.values()[k]});
    }
  }
  for (int row = 0; row < 3; ++row)
    for (int r = 0; r < mp.rows(); ++r)
      for (int k = mp.row_offsets()[r]; k < mp.row_offsets()[r + 1]; ++k)
        triplets.push_back(
            {layout.p_dof(row, r), layout.p_dof(row, mp.col_indices()[k]), mp.values()[k]});

  return SparseMatrix::from_triplets(layout.total(), layout.total(), std::move(triplets), true);
}

//------------------------------------------------------------------------------
// Vector Lagrange forms (elasticity and the auxiliary W space)
//------------------------------------------------------------------------------

SparseMatrix assemble_elasticity(double mu_e, double lambda_e, const H1VectorSpace& vu) {
  if (!(mu_e > 0.0) || !(2.0 * mu_e + 3.0 * lambda_e > 0.0))
    throw std::invalid_argument("assemble_elasticity: invalid Lame parameters");
  const Mesh& mesh = *vu.scalar.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = vu.scalar.nodes_per_cell();
  const int n_loc = 3 * npc;
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = vu.scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 grads[10];
      h1_shape(vu.scalar.degree, geom, rule.points[q], nullptr, grads);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      std::vector<Mat3> sym_d(n_loc);
      std::vector<double> tr_d(n_loc);
      for (int i = 0; i < npc; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
          Mat3 d = Mat3::Zero();
          d.row(comp) = grads[i].transpose();
          sym_d[3 * i + comp] = sym(d);
          tr_d[3 * i + comp] = d.trace();
        }
      }
      for (int k = 0; k < n_loc; ++k) {
        const int gk = vu.dof(nodes[k / 3], k % 3);
        for (int l = 0; l < n_loc; ++l) {
          const int gl = vu.dof(nodes[l / 3], l % 3);
          buf.add(gk, gl,
                  w * (2.0 * mu_e * ddot(sym_d[k], sym_d[l]) + lambda_e * tr_d[k] * tr_d[l]));
        }
      }
    }
  };
  return SparseMatrix::from_triplets(vu.n_dofs(), vu.n_dofs(), assemble_cells(mesh, kernel), true);
}

SparseMatrix assemble_curlcurl_divdiv(const H1VectorSpace& space) {
  const Mesh& mesh = *space.scalar.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = space.scalar.nodes_per_cell();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = space.scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 grads[10];
      h1_shape(space.scalar.degree, geom, rule.points[q], nullptr, grads);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < npc; ++i) {
        for (int ci = 0; ci < 3; ++ci) {
          // curl(psi e_c) = grad(psi) x e_c; div(psi e_c) = d_c psi.
          const Vec3 curl_i = grads[i].cross(Vec3::Unit(ci));
          const double div_i = grads[i][ci];
          const int gi = space.dof(nodes[i], ci);
          for (int j = 0; j < npc; ++j) {
            for (int cj = 0; cj < 3; ++cj) {
              const Vec3 curl_j = grads[j].cross(Vec3::Unit(cj));
              const double div_j = grads[j][cj];
              buf.add(gi, space.dof(nodes[j], cj), w * (curl_i.dot(curl_j) + div_i * div_j));
            }
          }
        }
      }
    }
  };
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), assemble_cells(mesh, kernel),
                                     true);
}

SparseMatrix assemble_h1_vector_mass(const H1VectorSpace& space) {
  const SparseMatrix ms = assemble_scalar_mass(space.scalar);
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(3 * ms.nnz());
  for (int r = 0; r < ms.rows(); ++r)
    for (int k = ms.row_offsets()[r]; k < ms.row_offsets()[r + 1]; ++k)
      for (int comp = 0; comp < 3; ++comp)
        triplets.push_back(
            {space.dof(r, comp), space.dof(ms.col_indices()[k], comp), ms.values()[k]});
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), std::move(triplets), true);
}

SparseMatrix assemble_h1_vector_stiffness(const H1VectorSpace& space) {
  const SparseMatrix ks = assemble_scalar_stiffness(space.scalar);
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(3 * ks.nnz());
  for (int r = 0; r < ks.rows(); ++r)
    for (int k = ks.row_offsets()[r]; k < ks.row_offsets()[r + 1]; ++k)
      for (int comp = 0; comp < 3; ++comp)
        triplets.push_back(
            {space.dof(r, comp), space.dof(ks.col_indices()[k], comp), ks.values()[k]});
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), std::move(triplets), true);
}

//------------------------------------------------------------------------------
// Second-order edge space
//------------------------------------------------------------------------------

SparseMatrix assemble_hcurl2_mass(const Hcurl2Space& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    Hcurl2CellBasis basis;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      hcurl2_shape(mesh, c, geom, rule.points[q], basis);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
          buf.add(basis.dofs[i], basis.dofs[j], w * basis.values[i].dot(basis.values[j]));
    }
  };
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), assemble_cells(mesh, kernel),
                                     true);
}

SparseMatrix assemble_hcurl2_curlcurl(const Hcurl2Space& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  auto kernel = [&](int c, TripletBuffer& buf) {
    const CellGeom geom = cell_geometry(mesh, c);
    Hcurl2CellBasis basis;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      hcurl2_shape(mesh, c, geom, rule.points[q], basis);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
          buf.add(basis.dofs[i], basis.dofs[j], w * basis.curls[i].dot(basis.curls[j]));
    }
  };
  return SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), assemble_cells(mesh, kernel),
                                     true);
}

SparseMatrix hcurl2_gradient_map(const H1ScalarSpace& p2, const Hcurl2Space& space) {
  if (p2.degree != 2) throw std::invalid_argument("hcurl2_gradient_map: needs a P2 scalar space");
  const Mesh& mesh = *space.mesh;
  std::vector<SparseMatrix::Triplet> triplets;
  // Vertex function a: grad(psi_a) = grad(hat_a) - 2 sum_{e at a} grad(bubble_e),
  // with grad(hat_a) expanded in Whitney functions by edge increments.
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int v0 = mesh.edges[e][0], v1 = mesh.edges[e][1];
    triplets.push_back({space.whitney_dof(e), v1, 1.0});
    triplets.push_back({space.whitney_dof(e), v0, -1.0});
    triplets.push_back({space.egrad_dof(e), v0, -2.0});
    triplets.push_back({space.egrad_dof(e), v1, -2.0});
    // Edge midpoint node: psi = 4 lambda_a lambda_b.
    triplets.push_back({space.egrad_dof(e), mesh.n_vertices() + e, 4.0});
  }
  return SparseMatrix::from_triplets(space.n_dofs(), p2.n_nodes(), std::move(triplets), false);
}

Eigen::VectorXd assemble_hcurl2_load(const Hcurl2Space& space, const CellVectorField& f) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dofs());
  Hcurl2CellBasis basis;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      hcurl2_shape(mesh, c, geom, rule.points[q], basis);
      const Vec3 fx = f(c, rule.points[q], x);
      for (int k = 0; k < 20; ++k) out[basis.dofs[k]] += w * fx.dot(basis.values[k]);
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// Loads
//------------------------------------------------------------------------------

Eigen::VectorXd assemble_loads(const VectorField& f, const MatrixField& m,
                               const H1VectorSpace& vu, const HcurlSpace& vp) {
  const Mesh& mesh = *vp.mesh;
  const BlockLayout layout = block_layout(vu, vp);
  const QuadRule& rule = cell_rule();
  const int npc = vu.scalar.nodes_per_cell();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.total());

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = vu.scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      double values[10];
      h1_shape(vu.scalar.degree, geom, rule.points[q], values, nullptr);
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);

      const Vec3 fx = f ? f(x) : Vec3::Zero();
      const Mat3 mx = m ? m(x) : Mat3::Zero();
      for (int i = 0; i < npc; ++i)
        for (int comp = 0; comp < 3; ++comp)
          out[layout.u_dof(vu.dof(nodes[i], comp))] += w * fx[comp] * values[i];
      for (int row = 0; row < 3; ++row)
        for (int e = 0; e < 6; ++e)
          out[layout.p_dof(row, mesh.cell_edges[c][e])] += w * mx.row(row).dot(phi[e]);
    }
  }
  return out;
}

Eigen::VectorXd assemble_h1_load(const H1VectorSpace& space, const CellVectorField& f) {
  const Mesh& mesh = *space.scalar.mesh;
  const QuadRule& rule = cell_rule();
  const int npc = space.scalar.nodes_per_cell();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = space.scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      double values[10];
      h1_shape(space.scalar.degree, geom, rule.points[q], values, nullptr);
      const Vec3 fx = f(c, rule.points[q], x);
      for (int i = 0; i < npc; ++i)
        for (int comp = 0; comp < 3; ++comp)
          out[space.dof(nodes[i], comp)] += w * fx[comp] * values[i];
    }
  }
  return out;
}

Eigen::VectorXd assemble_hcurl_load(const HcurlSpace& space, const CellVectorField& f) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = cell_rule();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);
      const Vec3 fx = f(c, rule.points[q], x);
      for (int e = 0; e < 6; ++e) out[mesh.cell_edges[c][e]] += w * fx.dot(phi[e]);
    }
  }
  return out;
}

Eigen::VectorXd assemble_modified_loads(const Eigen::VectorXd& loads, const SparseMatrix& k,
                                        const SparseMatrix& mass, const Eigen::VectorXd& x_lift,
                                        const Eigen::VectorXd& x_lift_tt) {
  if (loads.size() != k.rows() || x_lift.size() != k.rows() || x_lift_tt.size() != mass.rows())
    throw std::invalid_argument("assemble_modified_loads: size mismatch");
  Eigen::VectorXd out = loads;
  k.apply_add(x_lift, out, -1.0);
  mass.apply_add(x_lift_tt, out, -1.0);
  return out;
}

Eigen::VectorXd pack_state(const BlockLayout& layout, const Eigen::VectorXd& u,
                           const std::array<Eigen::VectorXd, 3>& p_rows) {
  Eigen::VectorXd out(layout.total());
  out.head(layout.n_u) = u;
  for (int row = 0; row < 3; ++row) out.segment(layout.n_u + row * layout.n_p, layout.n_p) = p_rows[row];
  return out;
}

BlockSystem build_block_system(const MaterialParams& p, const H1VectorSpace& vu,
                               const HcurlSpace& vp, const VectorField& f, const MatrixField& m) {
  BlockSystem sys;
  sys.layout = block_layout(vu, vp);
  sys.stiffness = assemble_micromorphic(p, vu, vp);
  sys.mass = assemble_mass(vu, vp);
  sys.load = assemble_loads(f, m, vu, vp);
  sys.constrained = constrained_dofs(vu, vp);
  return sys;
}

}  // namespace micromorph
