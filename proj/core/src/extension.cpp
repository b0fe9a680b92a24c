#include "micromorph/extension.hpp"

#include <cmath>
#include <stdexcept>

namespace micromorph {

namespace {

//------------------------------------------------------------------------------
// Face-local scalar traces
//------------------------------------------------------------------------------

// Scalar Lagrange trace on a boundary face: nodal values and in-plane
// gradients at in-face barycentric coordinates. Fills 3 (degree 1) or
// 6 (degree 2) entries; node ids are global for the given space.
int face_scalar_shape(const Mesh& mesh, const H1ScalarSpace& space, const FaceFrame& frame,
                      double l1, double l2, double* values, Vec3* grads, int* nodes) {
  const double lam[3] = {1.0 - l1 - l2, l1, l2};
  for (int i = 0; i < 3; ++i) nodes[i] = frame.verts[i];
  if (space.degree == 1) {
    for (int i = 0; i < 3; ++i) {
      if (values) values[i] = lam[i];
      if (grads) grads[i] = frame.grad_lambda_tau[i];
    }
    return 3;
  }
  for (int i = 0; i < 3; ++i) {
    if (values) values[i] = lam[i] * (2.0 * lam[i] - 1.0);
    if (grads) grads[i] = (4.0 * lam[i] - 1.0) * frame.grad_lambda_tau[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int a = kFaceEdgePairs[k][0], b = kFaceEdgePairs[k][1];
    nodes[3 + k] = mesh.n_vertices() + frame.edge_ids[k];
    if (values) values[3 + k] = 4.0 * lam[a] * lam[b];
    if (grads)
      grads[3 + k] = 4.0 * (lam[a] * frame.grad_lambda_tau[b] + lam[b] * frame.grad_lambda_tau[a]);
  }
  return 6;
}

const QuadRule& face_rule() {
  static const QuadRule rule = triangle_rule(4);
  return rule;
}

}  // namespace

//------------------------------------------------------------------------------
// Dirichlet lifting
//------------------------------------------------------------------------------

DirichletLifter::DirichletLifter(const H1VectorSpace& vu, const SolveOptions& opts) : vu_(&vu) {
  const H1ScalarSpace& s = vu.scalar;
  k_scalar_ = assemble_scalar_stiffness(s);
  std::vector<int> boundary(s.boundary_nodes);
  interior_nodes_ = complement(s.n_nodes(), boundary);
  interior_op_ = std::make_unique<SpdOperator>(
      k_scalar_.submatrix(interior_nodes_, interior_nodes_), opts);
}

Eigen::VectorXd DirichletLifter::lift(const VectorField& g) const {
  std::vector<Vec3> samples(vu_->scalar.boundary_nodes.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = g(vu_->scalar.nodes[vu_->scalar.boundary_nodes[i]]);
  return lift_samples(samples);
}

Eigen::VectorXd DirichletLifter::lift_samples(const std::vector<Vec3>& boundary_values) const {
  const H1ScalarSpace& s = vu_->scalar;
  if (boundary_values.size() != s.boundary_nodes.size())
    throw std::invalid_argument("DirichletLifter: wrong number of boundary samples");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(vu_->n_dofs());
  for (int comp = 0; comp < 3; ++comp) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(s.n_nodes());
    for (std::size_t i = 0; i < boundary_values.size(); ++i)
      full[s.boundary_nodes[i]] = boundary_values[i][comp];
    Eigen::VectorXd rhs_full = k_scalar_.apply(full);
    Eigen::VectorXd rhs(interior_nodes_.size());
    for (std::size_t i = 0; i < interior_nodes_.size(); ++i) rhs[i] = -rhs_full[interior_nodes_[i]];
    const Eigen::VectorXd xi = interior_op_->solve(rhs);
    for (std::size_t i = 0; i < interior_nodes_.size(); ++i)
      full[interior_nodes_[i]] = xi[static_cast<int>(i)];
    for (int n = 0; n < s.n_nodes(); ++n) out[vu_->dof(n, comp)] = full[n];
  }
  return out;
}

Eigen::VectorXd lift_dirichlet(const H1VectorSpace& vu, const VectorField& g) {
  return DirichletLifter(vu).lift(g);
}

double dirichlet_derivative_consistency(const DirichletData& data, const H1VectorSpace& vu,
                                        double t, double dt) {
  if (data.empty()) return 0.0;
  double worst = 0.0;
  for (int bn : vu.scalar.boundary_nodes) {
    const Vec3& x = vu.scalar.nodes[bn];
    if (data.g_t) {
      const Vec3 fd = (data.g(x, t + dt) - data.g(x, t - dt)) / (2.0 * dt);
      worst = std::max(worst, (fd - data.g_t(x, t)).cwiseAbs().maxCoeff());
    }
    if (data.g_tt) {
      const Vec3 fd =
          (data.g(x, t + dt) - 2.0 * data.g(x, t) + data.g(x, t - dt)) / (dt * dt);
      worst = std::max(worst, (fd - data.g_tt(x, t)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

//------------------------------------------------------------------------------
// Tangential boundary functionals
//------------------------------------------------------------------------------

Eigen::VectorXd tangential_div_boundary(const TangentialTraceData& g, const H1ScalarSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadRule& rule = face_rule();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_nodes());
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const FaceFrame frame = face_frame(mesh, static_cast<int>(bf));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double l1 = rule.points[q].x(), l2 = rule.points[q].y();
      const Vec3 v = reconstruct_trace_on_face(mesh, g, frame, l1, l2).cross(frame.normal);
      const double w = rule.weights[q] * 2.0 * frame.area;
      double values[6];
      Vec3 grads[6];
      int nodes[6];
      const int n = face_scalar_shape(mesh, space, frame, l1, l2, values, grads, nodes);
      for (int i = 0; i < n; ++i) out[nodes[i]] -= w * v.dot(grads[i]);
    }
  }
  return out;
}

double tangential_div_l2(const TangentialTraceData& g) {
  const Mesh& mesh = *g.mesh;
  double acc = 0.0;
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const FaceFrame frame = face_frame(mesh, static_cast<int>(bf));
    // div_tau(G_rep x n) is facewise constant: the in-plane scalar curl of the
    // Whitney reconstruction.
    double c = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int a = kFaceEdgePairs[k][0], b = kFaceEdgePairs[k][1];
      const int be = mesh.edge_boundary_index[frame.edge_ids[k]];
      c += g.moments[be] * 2.0 *
           frame.grad_lambda_tau[a].cross(frame.grad_lambda_tau[b]).dot(frame.normal);
    }
    acc += c * c * frame.area;
  }
  return std::sqrt(acc);
}

Eigen::VectorXd boundary_pairing(const TangentialTraceData& g, const Hcurl2Space& vp) {
  const Mesh& mesh = *vp.mesh;
  const QuadRule& rule = face_rule();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(vp.n_dofs());
  for (std::size_t bf = 0; bf < mesh.boundary_faces.size(); ++bf) {
    const FaceFrame frame = face_frame(mesh, static_cast<int>(bf));
    const int face_id = mesh.boundary_faces[bf];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double l1 = rule.points[q].x(), l2 = rule.points[q].y();
      const Vec3 v = reconstruct_trace_on_face(mesh, g, frame, l1, l2).cross(frame.normal);
      const double w = rule.weights[q] * 2.0 * frame.area;
      const double lam[3] = {1.0 - l1 - l2, l1, l2};

      // Tangential traces of the basis functions supported on this face:
      // the Whitney functions and the edge-bubble gradients of its three
      // edges, and its own two face functions.
      const auto whitney = face_whitney(frame, l1, l2);
      for (int k = 0; k < 3; ++k) {
        const int a = kFaceEdgePairs[k][0], b = kFaceEdgePairs[k][1];
        out[vp.whitney_dof(frame.edge_ids[k])] += w * v.dot(whitney[k]);
        const Vec3 egrad =
            lam[a] * frame.grad_lambda_tau[b] + lam[b] * frame.grad_lambda_tau[a];
        out[vp.egrad_dof(frame.edge_ids[k])] += w * v.dot(egrad);
      }
      const Vec3 t1 = lam[1] * lam[2] * frame.grad_lambda_tau[0];
      const Vec3 t2 = lam[0] * lam[2] * frame.grad_lambda_tau[1];
      out[vp.face_dof(face_id, 0)] += w * v.dot(t1);
      out[vp.face_dof(face_id, 1)] += w * v.dot(t2);
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// Pipeline
//------------------------------------------------------------------------------

ExtensionPipeline::ExtensionPipeline(const Mesh& mesh, const SolveOptions& opts)
    : mesh_(&mesh), opts_(opts) {
  vp_ = make_hcurl(mesh);
  n2_ = make_hcurl2(mesh);
  s2_ = make_h1_scalar(mesh, 2);

  // Step 1 operator: P2 Neumann Laplacian with the mean constraint folded in
  // as a rank-one bordering (the multiplier vanishes for compatible data).
  // The same operator serves the gradient correction of step 3.
  ks2_ = assemble_scalar_stiffness(s2_);
  ms2_ = assemble_scalar_mass(s2_);
  s2_moments_ = assemble_scalar_volume_moments(s2_);
  if (s2_.n_nodes() <= opts_.direct_threshold) {
    Eigen::MatrixXd dense = ks2_.to_dense();
    dense += s2_moments_ * s2_moments_.transpose();
    neumann_dense_ = std::make_unique<Eigen::LDLT<Eigen::MatrixXd>>(dense);
  }

  // Step 3 operator: curl-curl on the second-order edge space plus the weak
  // grad-div term B^T diag(M_s2)^{-1} B with B = D^T M2.
  a2_ = assemble_hcurl2_curlcurl(n2_);
  m2_ = assemble_hcurl2_mass(n2_);
  dmap_ = hcurl2_gradient_map(s2_, n2_);
  p2_mass_diag_ = ms2_.diagonal();

  aug_diag_ = a2_.diagonal();
  {
    // Columns of M2 D, accumulated either into the dense operator or only
    // into the diagonal.
    const bool dense_path = n2_.n_dofs() <= opts_.direct_threshold;
    Eigen::MatrixXd dense;
    if (dense_path) dense = a2_.to_dense();

    // Per-column structure of D.
    std::vector<std::vector<std::pair<int, double>>> d_cols(s2_.n_nodes());
    for (int r = 0; r < dmap_.rows(); ++r)
      for (int k = dmap_.row_offsets()[r]; k < dmap_.row_offsets()[r + 1]; ++k)
        d_cols[dmap_.col_indices()[k]].push_back({r, dmap_.values()[k]});

    std::vector<int> support;
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n2_.n_dofs());
    std::vector<char> seen(n2_.n_dofs(), 0);
    for (int q = 0; q < s2_.n_nodes(); ++q) {
      support.clear();
      for (const auto& [r, v] : d_cols[q]) {
        for (int k = m2_.row_offsets()[r]; k < m2_.row_offsets()[r + 1]; ++k) {
          const int j = m2_.col_indices()[k];
          if (!seen[j]) {
            seen[j] = 1;
            support.push_back(j);
          }
          values[j] += m2_.values()[k] * v;
        }
      }
      const double inv = 1.0 / p2_mass_diag_[q];
      for (int j : support) aug_diag_[j] += inv * values[j] * values[j];
      if (dense_path)
        for (int j : support)
          for (int l : support) dense(j, l) += inv * values[j] * values[l];
      for (int j : support) {
        values[j] = 0.0;
        seen[j] = 0;
      }
    }
    if (dense_path) aux_dense_ = std::make_unique<Eigen::LDLT<Eigen::MatrixXd>>(dense);
  }

  // Lowest-order operators for the extension metrics. The weak-divergence
  // residual is tested against interior P2 scalars; the P1 duals are
  // degenerate on the coarsest meshes (a single interior vertex).
  acc_ = assemble_hcurl_curlcurl(vp_);
  mned_ = assemble_hcurl_mass(vp_);
  grad_pairing_ = assemble_gradient_pairing(s2_, vp_);
  interior_edges_ = complement(mesh.n_edges(), mesh.boundary_edges);
  hcurl0_gram_ = std::make_unique<SpdOperator>(
      add(acc_, mned_).submatrix(interior_edges_, interior_edges_), opts_);
  interior_scalar_nodes_ = complement(s2_.n_nodes(), s2_.boundary_nodes);
  scalar_interior_stiffness_ = std::make_unique<SpdOperator>(
      ks2_.submatrix(interior_scalar_nodes_, interior_scalar_nodes_), opts_);

  // Step 2: Neumann harmonic fields (curl-free with vanishing weak divergence
  // and weak normal trace). Simply connected boxes have none; the computation
  // is kept generic.
  {
    double tr_a = 0.0, tr_m = 0.0;
    for (int i = 0; i < n2_.n_dofs(); ++i) {
      tr_a += aug_diag_[i];
      tr_m += m2_.coeff(i, i);
    }
    const double scale = tr_m > 0.0 ? tr_a / tr_m : 1.0;
    basis_.threshold = 1e-8 * scale;

    const int count = aux_dense_ ? 3 : 1;
    std::vector<Eigen::VectorXd> block(count);
    for (int j = 0; j < count; ++j) {
      block[j] = Eigen::VectorXd::Zero(n2_.n_dofs());
      for (int i = j; i < n2_.n_dofs(); i += count)
        block[j][i] = 1.0 + 0.01 * ((i * 2654435761u) % 97);
    }
    auto orthonormalize = [&](std::vector<Eigen::VectorXd>& v) {
      for (int j = 0; j < count; ++j) {
        for (int k = 0; k < j; ++k) v[j] -= v[k].dot(m2_.apply(v[j])) * v[k];
        const double norm = std::sqrt(v[j].dot(m2_.apply(v[j])));
        if (norm > 0.0) v[j] /= norm;
      }
    };
    orthonormalize(block);
    std::vector<double> values(count, 0.0);
    for (int iter = 0; iter < 25; ++iter) {
      std::vector<double> prev = values;
      for (int j = 0; j < count; ++j) block[j] = aug_solve(m2_.apply(block[j]), nullptr);
      orthonormalize(block);
      double change = 0.0;
      for (int j = 0; j < count; ++j) {
        Eigen::VectorXd ax = Eigen::VectorXd::Zero(n2_.n_dofs());
        aug_apply(block[j], ax);
        values[j] = block[j].dot(ax);
        change = std::max(change,
                          std::abs(values[j] - prev[j]) / std::max(1.0, std::abs(values[j])));
      }
      if (iter > 2 && change < 1e-8) break;
    }
    for (int j = 0; j < count; ++j) {
      if (values[j] >= basis_.threshold) continue;
      basis_.eigenvalues.push_back(values[j]);
      basis_.fields.push_back(block[j]);
    }
  }
}

void ExtensionPipeline::aug_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  a2_.apply_add(x, y);
  // y += M2 D diag^{-1} D^T M2 x
  const Eigen::VectorXd mx = m2_.apply(x);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(s2_.n_nodes());
  for (int r = 0; r < dmap_.rows(); ++r)
    for (int k = dmap_.row_offsets()[r]; k < dmap_.row_offsets()[r + 1]; ++k)
      s[dmap_.col_indices()[k]] += dmap_.values()[k] * mx[r];
  s.array() /= p2_mass_diag_.array();
  const Eigen::VectorXd ds = dmap_.apply(s);
  y += m2_.apply(ds);
}

Eigen::VectorXd ExtensionPipeline::aug_solve(const Eigen::VectorXd& rhs,
                                             SolveReport* report) const {
  if (aux_dense_) {
    Eigen::VectorXd x = aux_dense_->solve(rhs);
    if (report) {
      report->used_direct = true;
      const double rn = rhs.norm();
      if (rn > 0.0) {
        Eigen::VectorXd ax = Eigen::VectorXd::Zero(x.size());
        aug_apply(x, ax);
        report->rel_residual = (rhs - ax).norm() / rn;
      }
      report->converged = true;
    }
    return x;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n2_.n_dofs());
  auto matvec = [this](const Eigen::VectorXd& v, Eigen::VectorXd& y) { aug_apply(v, y); };
  const SolveReport rep = conjugate_gradient(matvec, aug_diag_, rhs, x, opts_);
  if (!rep.converged)
    throw std::runtime_error("solve_auxiliary: CG did not converge, relative residual " +
                             std::to_string(rep.rel_residual));
  if (report) *report = rep;
  return x;
}

Eigen::VectorXd ExtensionPipeline::neumann_apply_inverse(const Eigen::VectorXd& rhs) const {
  if (neumann_dense_) return neumann_dense_->solve(rhs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s2_.n_nodes());
  auto matvec = [this](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    ks2_.apply_add(v, y);
    y += s2_moments_ * (s2_moments_.dot(v));
  };
  const Eigen::VectorXd diag = ks2_.diagonal() + s2_moments_.cwiseProduct(s2_moments_);
  const SolveReport rep = conjugate_gradient(matvec, diag, rhs, x, opts_);
  if (!rep.converged)
    throw std::runtime_error("extension: Neumann-operator solve did not converge");
  return x;
}

NeumannScalarSolution ExtensionPipeline::solve_neumann(const TangentialTraceData& g) const {
  NeumannScalarSolution sol;
  // The Neumann datum is -div_tau of the paper-oriented (n x .) data, which
  // is +div_tau of the stored (. x n) form.
  const Eigen::VectorXd rhs = tangential_div_boundary(g, s2_);
  sol.w = neumann_apply_inverse(rhs);
  sol.mean = s2_moments_.dot(sol.w);
  const double rhs_norm = rhs.norm();
  sol.residual = rhs_norm > 0.0 ? (ks2_.apply(sol.w) - rhs).norm() / rhs_norm : 0.0;
  sol.grad_l2 = std::sqrt(std::max(0.0, sol.w.dot(ks2_.apply(sol.w))));
  sol.h1_norm =
      std::sqrt(std::max(0.0, sol.w.dot(ks2_.apply(sol.w)) + sol.w.dot(ms2_.apply(sol.w))));
  return sol;
}

AuxiliaryField ExtensionPipeline::solve_auxiliary(const TangentialTraceData& g,
                                                  const NeumannScalarSolution& w) const {
  AuxiliaryField aux;

  // f(phi) = int (grad w + mu) . phi dx + int_bnd <G_rep x n, phi_t> ds.
  const H1ScalarSpace& s2 = s2_;
  const Eigen::VectorXd pairing = boundary_pairing(g, n2_);
  Eigen::VectorXd f = pairing;
  if (w.w.norm() > 0.0) {
    f += assemble_hcurl2_load(n2_, [&](int cell, const Vec3& ref, const Vec3&) {
      return evaluate_h1_scalar_gradient(s2, w.w, cell, ref);
    });
  }
  for (const auto& lambda : basis_.fields) f -= pairing.dot(lambda) * m2_.apply(lambda);

  // Remove the gradient component of the rhs so that the weak divergence of
  // r vanishes (the discrete analogue of div r(v) = 0). The potential solves
  // the same mean-constrained Neumann operator as step 1.
  Eigen::VectorXd f_grad = Eigen::VectorXd::Zero(s2_.n_nodes());
  for (int r = 0; r < dmap_.rows(); ++r)
    for (int k = dmap_.row_offsets()[r]; k < dmap_.row_offsets()[r + 1]; ++k)
      f_grad[dmap_.col_indices()[k]] += dmap_.values()[k] * f[r];
  const Eigen::VectorXd sigma = neumann_apply_inverse(f_grad);
  const Eigen::VectorXd rhs = f - m2_.apply(dmap_.apply(sigma));

  SolveReport rep;
  aux.r = aug_solve(rhs, &rep);
  aux.residual = rep.rel_residual;

  // Orthogonality against the harmonic fields (no-op when the basis is empty).
  aux.harmonic_coeffs = Eigen::VectorXd::Zero(basis_.dimension());
  for (int i = 0; i < basis_.dimension(); ++i) {
    const double c = basis_.fields[i].dot(m2_.apply(aux.r));
    aux.r -= c * basis_.fields[i];
    aux.harmonic_coeffs[i] = basis_.fields[i].dot(m2_.apply(aux.r));
  }

  const QuadRule rule = tetrahedron_rule(2);
  double curl2 = 0.0;
  for (int c = 0; c < mesh_->n_cells(); ++c) {
    const CellGeom geom = cell_geometry(*mesh_, c);
    Hcurl2CellBasis basis;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      hcurl2_shape(*mesh_, c, geom, rule.points[q], basis);
      Vec3 curl = Vec3::Zero();
      for (int k = 0; k < 20; ++k) curl += aux.r[basis.dofs[k]] * basis.curls[k];
      curl2 += rule.weights[q] * 6.0 * geom.volume * curl.squaredNorm();
    }
  }
  aux.curl_l2 = std::sqrt(curl2);

  // Weak divergence in the dual of the P2 scalars.
  Eigen::VectorXd weak_div = Eigen::VectorXd::Zero(s2_.n_nodes());
  const Eigen::VectorXd mr = m2_.apply(aux.r);
  for (int r = 0; r < dmap_.rows(); ++r)
    for (int k = dmap_.row_offsets()[r]; k < dmap_.row_offsets()[r + 1]; ++k)
      weak_div[dmap_.col_indices()[k]] += dmap_.values()[k] * mr[r];
  double div2 = 0.0;
  for (int q = 0; q < s2_.n_nodes(); ++q) div2 += weak_div[q] * weak_div[q] / p2_mass_diag_[q];
  aux.div_l2 = std::sqrt(div2);
  return aux;
}

Eigen::VectorXd ExtensionPipeline::interpolate_curl(const Eigen::VectorXd& r_coeffs) const {
  const Mesh& mesh = *mesh_;
  const auto incidence = edge_to_cells(mesh);
  const double t0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double t1 = 0.5 + 0.5 / std::sqrt(3.0);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec3 a = mesh.vertices[mesh.edges[e][0]];
    const Vec3 d = mesh.edge_vector(e);
    double moment = 0.0;
    for (int c : incidence[e]) {
      const CellGeom geom = cell_geometry(mesh, c);
      Mat3 b;
      b.col(0) = geom.verts[1] - geom.verts[0];
      b.col(1) = geom.verts[2] - geom.verts[0];
      b.col(2) = geom.verts[3] - geom.verts[0];
      const Mat3 binv = b.inverse();
      double m = 0.0;
      for (double t : {t0, t1}) {
        const Vec3 ref = binv * (a + t * d - geom.verts[0]);
        m += 0.5 * evaluate_hcurl2_curl(n2_, r_coeffs, c, ref).dot(d);
      }
      moment += m;
    }
    out[e] = incidence[e].empty() ? 0.0 : moment / static_cast<double>(incidence[e].size());
  }
  return out;
}

ConstructiveExtension ExtensionPipeline::extend(const TangentialTraceData& g) const {
  ConstructiveExtension ext;
  const NeumannScalarSolution w = solve_neumann(g);
  const AuxiliaryField aux = solve_auxiliary(g, w);
  ext.coeffs = interpolate_curl(aux.r);

  ExtensionReport& rep = ext.report;
  rep.harmonic_dimension = basis_.dimension();

  // Trace recovery in the boundary-L2 surrogate norm.
  TangentialTraceData diff = tangential_trace(vp_, ext.coeffs);
  diff.moments -= g.moments;
  rep.trace_error = boundary_l2_norm(*mesh_, diff);
  rep.trace_norm = boundary_l2_norm(*mesh_, g);

  // Weak curl-curl residual: dual norm over discrete H_0(curl) with the
  // H(curl) Gram.
  {
    const Eigen::VectorXd y_full = acc_.apply(ext.coeffs);
    Eigen::VectorXd y(interior_edges_.size());
    for (std::size_t i = 0; i < interior_edges_.size(); ++i) y[i] = y_full[interior_edges_[i]];
    rep.curlcurl_residual = y.norm() > 0.0 ? std::sqrt(y.dot(hcurl0_gram_->solve(y))) : 0.0;
  }

  // Weak divergence residual: dual norm over discrete H^1_0 scalars with the
  // gradient Gram.
  {
    const Eigen::VectorXd y_full = grad_pairing_.apply(ext.coeffs);
    Eigen::VectorXd y(interior_scalar_nodes_.size());
    for (std::size_t i = 0; i < interior_scalar_nodes_.size(); ++i)
      y[i] = y_full[interior_scalar_nodes_[i]];
    rep.div_residual = y.norm() > 0.0 ? std::sqrt(y.dot(scalar_interior_stiffness_->solve(y))) : 0.0;
  }

  const double div_tau_norm = tangential_div_l2(g);
  rep.c1_star = div_tau_norm > 0.0 ? w.h1_norm / div_tau_norm : 0.0;
  const double data_norm = w.grad_l2 + rep.trace_norm;
  rep.c1 = data_norm > 0.0 ? aux.curl_l2 / data_norm : 0.0;
  return ext;
}

HarmonicBasis harmonic_basis(const Mesh& mesh) { return ExtensionPipeline(mesh).harmonic(); }

ConstructiveExtension constructive_extension(const TangentialTraceData& g, const Mesh& mesh) {
  return ExtensionPipeline(mesh).extend(g);
}

//------------------------------------------------------------------------------
// Direct lifting
//------------------------------------------------------------------------------

TangentialLifter::TangentialLifter(const HcurlSpace& vp, const SolveOptions& opts) : vp_(&vp) {
  a_ = add(assemble_hcurl_curlcurl(vp), assemble_hcurl_mass(vp));
  interior_ = complement(vp.mesh->n_edges(), vp.mesh->boundary_edges);
  interior_op_ = std::make_unique<SpdOperator>(a_.submatrix(interior_, interior_), opts);
}

Eigen::VectorXd TangentialLifter::lift(const TangentialTraceData& g) const {
  const Mesh& mesh = *vp_->mesh;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.n_edges());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    full[mesh.boundary_edges[i]] = g.moments[static_cast<int>(i)];
  const Eigen::VectorXd rhs_full = a_.apply(full);
  Eigen::VectorXd rhs(interior_.size());
  for (std::size_t i = 0; i < interior_.size(); ++i) rhs[i] = -rhs_full[interior_[i]];
  const Eigen::VectorXd xi = interior_op_->solve(rhs);
  for (std::size_t i = 0; i < interior_.size(); ++i) full[interior_[i]] = xi[static_cast<int>(i)];
  return full;
}

Eigen::VectorXd direct_lifting(const TangentialTraceData& g, const HcurlSpace& vp) {
  return TangentialLifter(vp).lift(g);
}

//------------------------------------------------------------------------------
// Coupling data
//------------------------------------------------------------------------------

std::array<TangentialTraceData, 3> coupling_trace(const VectorField& g, const Mesh& mesh) {
  std::array<TangentialTraceData, 3> out{TangentialTraceData::zero(mesh),
                                         TangentialTraceData::zero(mesh),
                                         TangentialTraceData::zero(mesh)};
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& e = mesh.edges[mesh.boundary_edges[i]];
    // Edge moment of (grad g)_row is the tangential increment of g_row.
    const Vec3 diff = g(mesh.vertices[e[1]]) - g(mesh.vertices[e[0]]);
    for (int row = 0; row < 3; ++row) out[row].moments[static_cast<int>(i)] = diff[row];
  }
  return out;
}

}  // namespace micromorph
