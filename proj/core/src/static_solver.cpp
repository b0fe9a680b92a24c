#include "micromorph/static_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace micromorph {

namespace {

constexpr double kResidualContract = 1e-10;

struct ReducedSolve {
  Eigen::VectorXd x;  // full-size, constrained dofs zero
  double residual = 0.0;
  int iterations = 0;
  bool used_direct = false;
};

// Solve K x = b on the free dofs, constrained dofs pinned to zero.
ReducedSolve solve_constrained(const SparseMatrix& k, const Eigen::VectorXd& b,
                               const std::vector<int>& free, const SolveOptions& opts) {
  ReducedSolve out;
  const SparseMatrix k_ff = k.submatrix(free, free);
  Eigen::VectorXd b_f(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) b_f[i] = b[free[i]];

  SolveReport report;
  const Eigen::VectorXd x_f = solve_spd(k_ff, b_f, opts, &report);
  out.residual = report.rel_residual;
  out.iterations = report.iterations;
  out.used_direct = report.used_direct;
  if (out.residual > kResidualContract)
    throw std::runtime_error("static solve: residual contract violated, relative residual " +
                             std::to_string(out.residual));

  out.x = Eigen::VectorXd::Zero(k.rows());
  for (std::size_t i = 0; i < free.size(); ++i) out.x[free[i]] = x_f[static_cast<int>(i)];
  return out;
}

StaticSolution finalize(const BlockLayout& layout, const Eigen::VectorXd& coupled,
                        const SparseMatrix& k, const ReducedSolve& reduced) {
  StaticSolution sol;
  sol.coupled = coupled;
  sol.u = coupled.head(layout.n_u);
  for (int row = 0; row < 3; ++row)
    sol.p_rows[row] = coupled.segment(layout.n_u + row * layout.n_p, layout.n_p);
  sol.energy = 0.5 * coupled.dot(k.apply(coupled));
  sol.residual = reduced.residual;
  sol.iterations = reduced.iterations;
  sol.used_direct_solver = reduced.used_direct;
  return sol;
}

}  // namespace

StaticSolution solve_static_homogeneous(const MaterialParams& params, const H1VectorSpace& vu,
                                        const HcurlSpace& vp, const VectorField& f,
                                        const MatrixField& m, const SolveOptions& opts) {
  const BlockLayout layout = block_layout(vu, vp);
  const SparseMatrix k = assemble_micromorphic(params, vu, vp);
  const Eigen::VectorXd b = assemble_loads(f, m, vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));

  const ReducedSolve reduced = solve_constrained(k, b, free, opts);
  return finalize(layout, reduced.x, k, reduced);
}

StaticSolution solve_static(const MaterialParams& params, const H1VectorSpace& vu,
                            const HcurlSpace& vp, const VectorField& f, const MatrixField& m,
                            const LiftedBoundaryData& boundary, LiftingPath lifting,
                            const SolveOptions& opts) {
  const Mesh& mesh = *vp.mesh;
  const BlockLayout layout = block_layout(vu, vp);
  const SparseMatrix k = assemble_micromorphic(params, vu, vp);
  const Eigen::VectorXd b = assemble_loads(f, m, vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));

  // Lift the boundary data.
  const Eigen::VectorXd g_lift = lift_dirichlet(vu, boundary.dirichlet);
  std::array<Eigen::VectorXd, 3> p_lift;
  if (lifting == LiftingPath::direct) {
    TangentialLifter lifter(vp, opts);
    for (int row = 0; row < 3; ++row) p_lift[row] = lifter.lift(boundary.tangential[row]);
  } else {
    ExtensionPipeline pipeline(mesh, opts);
    for (int row = 0; row < 3; ++row)
      p_lift[row] = pipeline.extend(boundary.tangential[row]).coeffs;
  }
  const Eigen::VectorXd x_lift = pack_state(layout, g_lift, p_lift);

  // Weak modified loads; statics has no inertial term.
  Eigen::VectorXd b_mod = b;
  k.apply_add(x_lift, b_mod, -1.0);

  const ReducedSolve reduced = solve_constrained(k, b_mod, free, opts);
  const Eigen::VectorXd coupled = reduced.x + x_lift;
  StaticSolution sol = finalize(layout, coupled, k, reduced);

  // Boundary satisfaction diagnostics.
  for (int bn : vu.scalar.boundary_nodes) {
    const Vec3 gv = boundary.dirichlet(vu.scalar.nodes[bn]);
    for (int comp = 0; comp < 3; ++comp)
      sol.bc_dirichlet_error =
          std::max(sol.bc_dirichlet_error, std::abs(sol.u[vu.dof(bn, comp)] - gv[comp]));
  }
  for (int row = 0; row < 3; ++row) {
    for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
      const double got = sol.p_rows[row][mesh.boundary_edges[i]];
      sol.bc_tangential_error = std::max(
          sol.bc_tangential_error,
          std::abs(got - boundary.tangential[row].moments[static_cast<int>(i)]));
    }
  }
  return sol;
}

ElasticSolution solve_elastic_static(double mu_e, double lambda_e, const H1VectorSpace& vu,
                                     const VectorField& f, const VectorField& g,
                                     const SolveOptions& opts) {
  const SparseMatrix k = assemble_elasticity(mu_e, lambda_e, vu);
  Eigen::VectorXd b = assemble_h1_load(
      vu, [&f](int, const Vec3&, const Vec3& x) { return f ? f(x) : Vec3::Zero(); });

  const Eigen::VectorXd g_lift =
      g ? lift_dirichlet(vu, g) : Eigen::VectorXd::Zero(vu.n_dofs());
  k.apply_add(g_lift, b, -1.0);

  const std::vector<int> free = complement(vu.n_dofs(), vu.boundary_dofs());
  const SparseMatrix k_ff = k.submatrix(free, free);
  Eigen::VectorXd b_f(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) b_f[i] = b[free[i]];

  SolveReport report;
  const Eigen::VectorXd x_f = solve_spd(k_ff, b_f, opts, &report);
  if (report.rel_residual > kResidualContract)
    throw std::runtime_error("elastic solve: residual contract violated");

  ElasticSolution sol;
  sol.u = g_lift;
  for (std::size_t i = 0; i < free.size(); ++i) sol.u[free[i]] += x_f[static_cast<int>(i)];
  sol.residual = report.rel_residual;
  sol.iterations = report.iterations;
  return sol;
}

}  // namespace micromorph
