#include <doctest.h>

#include <random>

#include "micromorph/cases.hpp"
#include "micromorph/static_solver.hpp"
#include "micromorph/verification.hpp"

using namespace micromorph;

namespace {

MaterialParams base_params() {
  MaterialParams p;
  p.mu_e = 1.0;
  p.lambda_e = 0.5;
  p.mu_c = 0.25;
  p.mu_micro = 1.0;
  p.lambda_micro = 0.5;
  p.mu_macro = 1.0;
  p.l_c = 1.0;
  return p;
}

}  // namespace

TEST_CASE("homogeneous solve: zero loads give the zero solution") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const StaticSolution sol = solve_static_homogeneous(base_params(), vu, vp, nullptr, nullptr);
  CHECK(sol.u.norm() == 0.0);
  for (int row = 0; row < 3; ++row) CHECK(sol.p_rows[row].norm() == 0.0);
  CHECK(sol.energy == 0.0);
}

TEST_CASE("homogeneous solve satisfies the residual contract with mu_c = 0") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  MaterialParams p = base_params();
  p.mu_c = 0.0;
  const VectorField f = [](const Vec3& x) { return Vec3(x.y(), -x.z(), 1.0); };
  const StaticSolution sol = solve_static_homogeneous(p, vu, vp, f, nullptr);
  CHECK(sol.residual < 1e-10);
  CHECK(sol.energy > 0.0);
}

TEST_CASE("lifted solve with zero boundary data matches the homogeneous solve") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const VectorField f = [](const Vec3& x) { return Vec3(1.0, x.x(), 0.0); };

  LiftedBoundaryData boundary;
  boundary.dirichlet = [](const Vec3&) { return Vec3::Zero(); };
  boundary.tangential = {TangentialTraceData::zero(mesh), TangentialTraceData::zero(mesh),
                         TangentialTraceData::zero(mesh)};
  const StaticSolution a = solve_static(base_params(), vu, vp, f, nullptr, boundary);
  const StaticSolution b = solve_static_homogeneous(base_params(), vu, vp, f, nullptr);
  CHECK((a.coupled - b.coupled).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("affine manufactured case is exact to solver tolerance") {
  const ManufacturedCase c = manufactured_case("affine");
  const MaterialParams p = base_params();
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);

  LiftedBoundaryData boundary;
  boundary.dirichlet = c.u_star;
  boundary.tangential = case_tangential_data(c, mesh);
  const StaticSolution sol =
      solve_static(p, vu, vp, c.force(p), c.moment(p), boundary);

  CHECK(l2_error_u(vu, sol.u, c.u_star) < 1e-10);
  CHECK(l2_error_p(vp, sol.p_rows, c.p_star) < 1e-10);
  // Boundary data is satisfied exactly by construction of the lifting.
  CHECK(sol.bc_dirichlet_error < 1e-13);
  CHECK(sol.bc_tangential_error < 1e-13);
}

TEST_CASE("poly3 manufactured case converges at first order or better") {
  const ConvergenceResult res =
      manufactured_convergence("poly3", base_params(), {2, 4});
  CHECK(res.oracle_residual < 1e-6);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[1].err_u < res.rows[0].err_u);
  CHECK(res.rows[1].err_p < res.rows[0].err_p);
  CHECK(res.order_u > 0.9);
  CHECK(res.order_p > 0.9);
}

TEST_CASE("lifting-path invariance: direct and constructive solutions agree") {
  const ManufacturedCase c = manufactured_case("poly3");
  const MaterialParams p = base_params();
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 3, 3, 3});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);

  LiftedBoundaryData boundary;
  boundary.dirichlet = c.u_star;
  boundary.tangential = case_tangential_data(c, mesh);
  const StaticSolution direct =
      solve_static(p, vu, vp, c.force(p), c.moment(p), boundary, LiftingPath::direct);
  const StaticSolution constructive =
      solve_static(p, vu, vp, c.force(p), c.moment(p), boundary, LiftingPath::constructive);

  const double discretization_error =
      l2_error_u(vu, direct.u, c.u_star) + l2_error_p(vp, direct.p_rows, c.p_star);

  // L2 norm of the difference of the two final solutions.
  const SparseMatrix mass = assemble_mass(vu, vp);
  const Eigen::VectorXd diff = direct.coupled - constructive.coupled;
  const double gap = std::sqrt(std::max(0.0, diff.dot(mass.apply(diff))));
  CHECK(gap < 5.0 * discretization_error);
}

TEST_CASE("uniqueness surrogate: random CG initial guesses give the same solution") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams p = base_params();
  const SparseMatrix k = assemble_micromorphic(p, vu, vp);
  const Eigen::VectorXd b =
      assemble_loads([](const Vec3& x) { return Vec3(x.z(), 1.0, -x.y()); }, nullptr, vu, vp);
  const BlockLayout layout = block_layout(vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));
  const SparseMatrix k_ff = k.submatrix(free, free);
  Eigen::VectorXd b_f(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) b_f[i] = b[free[i]];

  SolveOptions opts;
  opts.direct_threshold = 0;  // force CG
  opts.rtol = 1e-12;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd g1(b_f.size()), g2(b_f.size());
  for (int i = 0; i < b_f.size(); ++i) {
    g1[i] = dist(rng);
    g2[i] = dist(rng);
  }
  const Eigen::VectorXd x1 = solve_spd(k_ff, b_f, opts, nullptr, &g1);
  const Eigen::VectorXd x2 = solve_spd(k_ff, b_f, opts, nullptr, &g2);
  const double energy_gap = std::sqrt(std::max(0.0, (x1 - x2).dot(k_ff.apply(x1 - x2))));
  CHECK(energy_gap < 1e-8 * std::max(1.0, std::sqrt(x1.dot(k_ff.apply(x1)))));
}

TEST_CASE("Galerkin orthogonality against random constrained test vectors") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams p = base_params();
  const VectorField f = [](const Vec3& x) { return Vec3(x.x() * x.y(), 0.0, 1.0); };
  const StaticSolution sol = solve_static_homogeneous(p, vu, vp, f, nullptr);

  const SparseMatrix k = assemble_micromorphic(p, vu, vp);
  const Eigen::VectorXd b = assemble_loads(f, nullptr, vu, vp);
  const Eigen::VectorXd residual = b - k.apply(sol.coupled);

  const BlockLayout layout = block_layout(vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.total());
    for (int d : free) v[d] = dist(rng);
    CHECK(std::abs(residual.dot(v)) < 1e-9 * b.norm() * v.norm());
  }
}

TEST_CASE("energy minimization among admissible perturbations") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams p = base_params();
  const VectorField f = [](const Vec3& x) { return Vec3(0.0, x.z(), -1.0); };
  const StaticSolution sol = solve_static_homogeneous(p, vu, vp, f, nullptr);

  const SparseMatrix k = assemble_micromorphic(p, vu, vp);
  const Eigen::VectorXd b = assemble_loads(f, nullptr, vu, vp);
  auto functional = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(k.apply(x)) - b.dot(x); };

  const BlockLayout layout = block_layout(vu, vp);
  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  const double j0 = functional(sol.coupled);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = sol.coupled;
    for (int d : free) x[d] += dist(rng);
    CHECK(functional(x) >= j0 - 1e-12);
  }
}

TEST_CASE("elastic baseline: rigid rotations and zero data") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);

  // Pure infinitesimal rotation: sym grad = 0, reproduced exactly.
  Mat3 w;
  w << 0.0, 0.3, -0.2, -0.3, 0.0, 0.5, 0.2, -0.5, 0.0;
  const VectorField g = [&w](const Vec3& x) { return Vec3(w * x); };
  const ElasticSolution sol = solve_elastic_static(1.0, 0.5, vu, nullptr, g);
  const Eigen::VectorXd exact = interpolate_h1(vu, g);
  CHECK((sol.u - exact).lpNorm<Eigen::Infinity>() < 1e-10);

  const ElasticSolution zero = solve_elastic_static(1.0, 0.5, vu, nullptr, nullptr);
  CHECK(zero.u.norm() == 0.0);
}

TEST_CASE("elastic baseline: manufactured polynomial converges") {
  // u* = (x^2, y^2 - x z, z^2 + x y): F = -Div(2 mu sym grad u + lambda tr id)
  const double mu = 1.0, lambda = 0.7;
  const VectorField u_star = [](const Vec3& v) {
    return Vec3(v.x() * v.x(), v.y() * v.y() - v.x() * v.z(), v.z() * v.z() + v.x() * v.y());
  };
  // grad u rows: (2x,0,0), (-z,2y,-x), (y,x,2z); sym and div derived by hand.
  const VectorField force = [mu, lambda](const Vec3&) {
    // Div sym grad u = (2, 2, 2) + 0.5*(0,0,0)... computed by hand:
    // sym(grad u) = [[2x, -z/2, y/2], [-z/2, 2y, 0], [y/2, 0, 2z]]
    // row divergences: (2, 2, 2); grad(tr grad u) = (2, 2, 2).
    return Vec3(-(2.0 * mu * 2.0 + lambda * 2.0), -(2.0 * mu * 2.0 + lambda * 2.0),
                -(2.0 * mu * 2.0 + lambda * 2.0));
  };

  double prev = -1.0;
  for (int nx : {2, 4}) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    const H1VectorSpace vu = make_h1_vector(mesh, 1);
    const ElasticSolution sol = solve_elastic_static(mu, lambda, vu, force, u_star);
    double err = 0.0;
    const QuadRule rule = tetrahedron_rule(4);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const CellGeom geom = cell_geometry(mesh, c);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 diff =
            evaluate_h1(vu, sol.u, c, rule.points[q]) - u_star(geom.map(rule.points[q]));
        err += rule.weights[q] * 6.0 * geom.volume * diff.squaredNorm();
      }
    }
    err = std::sqrt(err);
    if (prev >= 0.0) CHECK(err < 0.55 * prev);
    prev = err;
  }
}