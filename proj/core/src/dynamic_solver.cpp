#include "micromorph/dynamic_solver.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace micromorph {

namespace {

Eigen::VectorXd restrict_to(const Eigen::VectorXd& full, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = full[idx[i]];
  return out;
}

void scatter_into(const Eigen::VectorXd& reduced, const std::vector<int>& idx,
                  Eigen::VectorXd& full) {
  for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = reduced[static_cast<int>(i)];
}

std::array<TangentialTraceData, 3> tensor_trace_rows(const Mesh& mesh, const TimeMatrixField& q,
                                                     double t) {
  std::array<TangentialTraceData, 3> rows{TangentialTraceData::zero(mesh),
                                          TangentialTraceData::zero(mesh),
                                          TangentialTraceData::zero(mesh)};
  if (!q) return rows;
  const double s0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double s1 = 0.5 + 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const int e = mesh.boundary_edges[i];
    const Vec3 a = mesh.vertices[mesh.edges[e][0]];
    const Vec3 d = mesh.edge_vector(e);
    const Mat3 q0 = q(a + s0 * d, t), q1 = q(a + s1 * d, t);
    for (int row = 0; row < 3; ++row)
      rows[row].moments[static_cast<int>(i)] = 0.5 * (q0.row(row).dot(d) + q1.row(row).dot(d));
  }
  return rows;
}

}  // namespace

//------------------------------------------------------------------------------
// Boundary conditions
//------------------------------------------------------------------------------

VectorField BoundaryConditions::g_at(double t) const {
  if (!dirichlet.g) return nullptr;
  return [f = dirichlet.g, t](const Vec3& x) { return f(x, t); };
}
VectorField BoundaryConditions::g_t_at(double t) const {
  if (!dirichlet.g_t) return nullptr;
  return [f = dirichlet.g_t, t](const Vec3& x) { return f(x, t); };
}
VectorField BoundaryConditions::g_tt_at(double t) const {
  if (!dirichlet.g_tt) return nullptr;
  return [f = dirichlet.g_tt, t](const Vec3& x) { return f(x, t); };
}

std::array<TangentialTraceData, 3> BoundaryConditions::tangential_at(const Mesh& mesh,
                                                                     double t) const {
  switch (tangential) {
    case Tangential::zero:
      break;
    case Tangential::coupling:
      if (dirichlet.g) return coupling_trace(g_at(t), mesh);
      break;
    case Tangential::tensor:
      return tensor_trace_rows(mesh, q, t);
  }
  return {TangentialTraceData::zero(mesh), TangentialTraceData::zero(mesh),
          TangentialTraceData::zero(mesh)};
}

std::array<TangentialTraceData, 3> BoundaryConditions::tangential_t_at(const Mesh& mesh,
                                                                       double t) const {
  switch (tangential) {
    case Tangential::zero:
      break;
    case Tangential::coupling:
      if (dirichlet.g_t) return coupling_trace(g_t_at(t), mesh);
      break;
    case Tangential::tensor:
      return tensor_trace_rows(mesh, q_t, t);
  }
  return {TangentialTraceData::zero(mesh), TangentialTraceData::zero(mesh),
          TangentialTraceData::zero(mesh)};
}

std::array<TangentialTraceData, 3> BoundaryConditions::tangential_tt_at(const Mesh& mesh,
                                                                        double t) const {
  switch (tangential) {
    case Tangential::zero:
      break;
    case Tangential::coupling:
      if (dirichlet.g_tt) return coupling_trace(g_tt_at(t), mesh);
      break;
    case Tangential::tensor:
      return tensor_trace_rows(mesh, q_tt, t);
  }
  return {TangentialTraceData::zero(mesh), TangentialTraceData::zero(mesh),
          TangentialTraceData::zero(mesh)};
}

InitialData InitialData::zero(const H1VectorSpace& vu, const HcurlSpace& vp) {
  InitialData init;
  init.u0 = Eigen::VectorXd::Zero(vu.n_dofs());
  init.u1 = Eigen::VectorXd::Zero(vu.n_dofs());
  for (int row = 0; row < 3; ++row) {
    init.p0[row] = Eigen::VectorXd::Zero(vp.n_dofs());
    init.p1[row] = Eigen::VectorXd::Zero(vp.n_dofs());
  }
  return init;
}

//------------------------------------------------------------------------------
// Compatibility
//------------------------------------------------------------------------------

double CompatibilityReport::max_mismatch() const {
  return std::max(std::max(u0_mismatch, u1_mismatch), std::max(p0_mismatch, p1_mismatch));
}

CompatibilityReport check_compatibility(const InitialData& init, const BoundaryConditions& bc,
                                        const H1VectorSpace& vu, const HcurlSpace& vp,
                                        double tolerance) {
  const Mesh& mesh = *vp.mesh;
  CompatibilityReport report;
  report.tolerance = tolerance;

  auto dirichlet_mismatch = [&](const Eigen::VectorXd& coeffs, const VectorField& gf) {
    double worst = 0.0;
    for (int bn : vu.scalar.boundary_nodes) {
      const Vec3 gv = gf ? gf(vu.scalar.nodes[bn]) : Vec3::Zero();
      for (int comp = 0; comp < 3; ++comp)
        worst = std::max(worst, std::abs(coeffs[vu.dof(bn, comp)] - gv[comp]));
    }
    return worst;
  };
  report.u0_mismatch = dirichlet_mismatch(init.u0, bc.g_at(0.0));
  report.u1_mismatch = dirichlet_mismatch(init.u1, bc.g_t_at(0.0));

  auto tangential_mismatch = [&](const std::array<Eigen::VectorXd, 3>& rows,
                                 const std::array<TangentialTraceData, 3>& data) {
    double worst = 0.0;
    for (int row = 0; row < 3; ++row)
      for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
        worst = std::max(worst, std::abs(rows[row][mesh.boundary_edges[i]] -
                                         data[row].moments[static_cast<int>(i)]));
    return worst;
  };
  report.p0_mismatch = tangential_mismatch(init.p0, bc.tangential_at(mesh, 0.0));
  report.p1_mismatch = tangential_mismatch(init.p1, bc.tangential_t_at(mesh, 0.0));
  return report;
}

//------------------------------------------------------------------------------
// Energy
//------------------------------------------------------------------------------

EnergyRecord energy(const MicromorphicState& state, const MaterialParams& params,
                    const H1VectorSpace& vu, const HcurlSpace& vp, double time) {
  const Mesh& mesh = *vp.mesh;
  const QuadRule rule = tetrahedron_rule(4);
  EnergyRecord rec;
  rec.time = time;

  const double curl_coef = 0.5 * params.mu_macro * params.l_c * params.l_c;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    const auto nodes = vu.scalar.cell_nodes(c);
    const int npc = vu.scalar.nodes_per_cell();
    std::array<Vec3, 6> curls;
    nedelec_curls(mesh, c, geom, curls);

    // Curl P is constant per cell.
    Mat3 curl_p = Mat3::Zero();
    for (int row = 0; row < 3; ++row)
      for (int e = 0; e < 6; ++e)
        curl_p.row(row) += state.p[row][mesh.cell_edges[c][e]] * curls[e].transpose();

    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * 6.0 * geom.volume;
      double values[10];
      Vec3 grads[10];
      h1_shape(vu.scalar.degree, geom, rule.points[q], values, grads);
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);

      Mat3 grad_u = Mat3::Zero();
      Vec3 u_t = Vec3::Zero();
      for (int i = 0; i < npc; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
          grad_u.row(comp) += state.u[vu.dof(nodes[i], comp)] * grads[i].transpose();
          u_t[comp] += state.u_t[vu.dof(nodes[i], comp)] * values[i];
        }
      }
      Mat3 p = Mat3::Zero(), p_t = Mat3::Zero();
      for (int row = 0; row < 3; ++row) {
        for (int e = 0; e < 6; ++e) {
          p.row(row) += state.p[row][mesh.cell_edges[c][e]] * phi[e].transpose();
          p_t.row(row) += state.p_t[row][mesh.cell_edges[c][e]] * phi[e].transpose();
        }
      }

      const Mat3 d = grad_u - p;
      rec.kinetic += 0.5 * w * (u_t.squaredNorm() + frob2(p_t));
      rec.pot_e_sym += w * params.mu_e * frob2(sym(d));
      rec.pot_c_skew += w * params.mu_c * frob2(skew(d));
      rec.pot_e_tr += w * 0.5 * params.lambda_e * d.trace() * d.trace();
      rec.pot_micro_sym += w * params.mu_micro * frob2(sym(p));
      rec.pot_micro_tr += w * 0.5 * params.lambda_micro * p.trace() * p.trace();
      rec.pot_curl += w * curl_coef * frob2(curl_p);
    }
  }
  return rec;
}

//------------------------------------------------------------------------------
// Time integration
//------------------------------------------------------------------------------

DynamicResult run_dynamic(const DynamicRun& run, const H1VectorSpace& vu, const HcurlSpace& vp) {
  if (!(run.dt > 0.0) || !(run.t_end > 0.0))
    throw std::invalid_argument("run_dynamic: dt and t_end must be positive");
  const auto violations = validate_params(run.params);
  if (!violations.empty())
    throw std::invalid_argument("run_dynamic: invalid material parameters");

  const CompatibilityReport compat = check_compatibility(run.init, run.boundary, vu, vp);
  if (!compat.pass())
    throw std::runtime_error("run_dynamic: initial data incompatible with boundary data, max "
                             "mismatch " +
                             std::to_string(compat.max_mismatch()));

  const Mesh& mesh = *vp.mesh;
  const BlockLayout layout = block_layout(vu, vp);
  const SparseMatrix k = assemble_micromorphic(run.params, vu, vp);
  const SparseMatrix mass = assemble_mass(vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));

  const SparseMatrix k_ff = k.submatrix(free, free);
  const SparseMatrix m_ff = mass.submatrix(free, free);
  const double dt = run.dt;
  const SpdOperator stepper(add(m_ff, k_ff, 1.0, dt * dt / 4.0), run.solve);

  const bool homogeneous = run.boundary.homogeneous();
  std::unique_ptr<DirichletLifter> dirichlet;
  std::unique_ptr<TangentialLifter> tangential;
  if (!homogeneous) {
    dirichlet = std::make_unique<DirichletLifter>(vu, run.solve);
    tangential = std::make_unique<TangentialLifter>(vp, run.solve);
  }

  auto lift_sample = [&](const VectorField& gf,
                         const std::array<TangentialTraceData, 3>& rows) -> Eigen::VectorXd {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.total());
    if (homogeneous) return out;
    const Eigen::VectorXd gu =
        gf ? dirichlet->lift(gf) : Eigen::VectorXd::Zero(vu.n_dofs());
    out.head(layout.n_u) = gu;
    for (int row = 0; row < 3; ++row)
      out.segment(layout.n_u + row * layout.n_p, layout.n_p) = tangential->lift(rows[row]);
    return out;
  };
  auto lift_at = [&](double t) {
    return lift_sample(run.boundary.g_at(t), run.boundary.tangential_at(mesh, t));
  };
  auto lift_t_at = [&](double t) {
    return lift_sample(run.boundary.g_t_at(t), run.boundary.tangential_t_at(mesh, t));
  };
  auto lift_tt_at = [&](double t) {
    return lift_sample(run.boundary.g_tt_at(t), run.boundary.tangential_tt_at(mesh, t));
  };

  const bool has_loads = static_cast<bool>(run.body_force) || static_cast<bool>(run.body_moment);
  auto forcing_free = [&](double t) -> Eigen::VectorXd {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.total());
    if (has_loads) {
      VectorField f;
      MatrixField m;
      if (run.body_force) f = [&run, t](const Vec3& x) { return run.body_force(x, t); };
      if (run.body_moment) m = [&run, t](const Vec3& x) { return run.body_moment(x, t); };
      b = assemble_loads(f, m, vu, vp);
    }
    if (!homogeneous) {
      k.apply_add(lift_at(t), b, -1.0);
      mass.apply_add(lift_tt_at(t), b, -1.0);
    }
    return restrict_to(b, free);
  };

  // Lifted initial state: positions and velocities of the homogeneous unknown.
  Eigen::VectorXd x0_full = pack_state(layout, run.init.u0, run.init.p0);
  Eigen::VectorXd v0_full = pack_state(layout, run.init.u1, run.init.p1);
  if (!homogeneous) {
    x0_full -= lift_at(0.0);
    v0_full -= lift_t_at(0.0);
  }
  Eigen::VectorXd x = restrict_to(x0_full, free);
  Eigen::VectorXd v = restrict_to(v0_full, free);

  const int steps = std::max(1, static_cast<int>(std::llround(run.t_end / dt)));
  DynamicResult result;
  result.steps = steps;

  auto physical_state = [&](double t) {
    Eigen::VectorXd xf = Eigen::VectorXd::Zero(layout.total());
    Eigen::VectorXd vf = Eigen::VectorXd::Zero(layout.total());
    scatter_into(x, free, xf);
    scatter_into(v, free, vf);
    if (!homogeneous) {
      xf += lift_at(t);
      vf += lift_t_at(t);
    }
    MicromorphicState state;
    state.u = xf.head(layout.n_u);
    state.u_t = vf.head(layout.n_u);
    for (int row = 0; row < 3; ++row) {
      state.p[row] = xf.segment(layout.n_u + row * layout.n_p, layout.n_p);
      state.p_t[row] = vf.segment(layout.n_u + row * layout.n_p, layout.n_p);
    }
    return state;
  };
  auto record = [&](int step, double t) {
    TrajectorySample sample;
    sample.time = t;
    sample.step = step;
    sample.state = physical_state(t);
    result.energies.push_back(energy(sample.state, run.params, vu, vp, t));
    result.samples.push_back(std::move(sample));
  };

  record(0, 0.0);

  if (run.integrator == Integrator::implicit_midpoint) {
    for (int n = 0; n < steps; ++n) {
      const double t_mid = (n + 0.5) * dt;
      Eigen::VectorXd rhs = m_ff.apply(v);
      k_ff.apply_add(v, rhs, -dt * dt / 4.0);
      k_ff.apply_add(x, rhs, -dt);
      rhs += dt * forcing_free(t_mid);
      Eigen::VectorXd v_new;
      try {
        v_new = stepper.solve(rhs);
      } catch (const std::exception& e) {
        throw std::runtime_error("run_dynamic: step " + std::to_string(n + 1) +
                                 " solve failed: " + e.what());
      }
      x += (dt / 2.0) * (v + v_new);
      v = v_new;
      if ((n + 1) % run.output_every == 0 || n + 1 == steps) record(n + 1, (n + 1) * dt);
    }
  } else {
    // Newmark, beta = 1/4, gamma = 1/2 (average acceleration).
    const SpdOperator mass_op(m_ff, run.solve);
    Eigen::VectorXd a = mass_op.solve(forcing_free(0.0) - k_ff.apply(x));
    for (int n = 0; n < steps; ++n) {
      const double t_next = (n + 1) * dt;
      const Eigen::VectorXd x_pred = x + dt * v + (dt * dt / 4.0) * a;
      Eigen::VectorXd a_new;
      try {
        a_new = stepper.solve(forcing_free(t_next) - k_ff.apply(x_pred));
      } catch (const std::exception& e) {
        throw std::runtime_error("run_dynamic: step " + std::to_string(n + 1) +
                                 " solve failed: " + e.what());
      }
      x = x_pred + (dt * dt / 4.0) * a_new;
      v += (dt / 2.0) * (a + a_new);
      a = a_new;
      if ((n + 1) % run.output_every == 0 || n + 1 == steps) record(n + 1, t_next);
    }
  }

  result.final_state = physical_state(steps * dt);
  return result;
}

}  // namespace micromorph
