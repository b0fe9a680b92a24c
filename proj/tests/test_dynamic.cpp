#include <doctest.h>

#include <random>

#include "micromorph/cases.hpp"
#include "micromorph/dynamic_solver.hpp"

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

InitialData random_homogeneous_init(const Mesh& mesh, const H1VectorSpace& vu,
                                    const HcurlSpace& vp, std::uint64_t seed) {
  InitialData init = InitialData::zero(vu, vp);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<char> on_boundary(vu.n_dofs(), 0);
  for (int d : vu.boundary_dofs()) on_boundary[d] = 1;
  for (int d = 0; d < vu.n_dofs(); ++d)
    if (!on_boundary[d]) {
      init.u0[d] = dist(rng);
      init.u1[d] = dist(rng);
    }
  for (int row = 0; row < 3; ++row)
    for (int e = 0; e < mesh.n_edges(); ++e)
      if (!mesh.edge_is_boundary(e)) {
        init.p0[row][e] = dist(rng);
        init.p1[row][e] = dist(rng);
      }
  return init;
}

double state_diff(const MicromorphicState& a, const MicromorphicState& b) {
  double out = (a.u - b.u).lpNorm<Eigen::Infinity>();
  out = std::max(out, (a.u_t - b.u_t).lpNorm<Eigen::Infinity>());
  for (int row = 0; row < 3; ++row) {
    out = std::max(out, (a.p[row] - b.p[row]).lpNorm<Eigen::Infinity>());
    out = std::max(out, (a.p_t[row] - b.p_t[row]).lpNorm<Eigen::Infinity>());
  }
  return out;
}

double state_scale(const MicromorphicState& a) {
  double out = a.u.lpNorm<Eigen::Infinity>();
  out = std::max(out, a.u_t.lpNorm<Eigen::Infinity>());
  for (int row = 0; row < 3; ++row) {
    out = std::max(out, a.p[row].lpNorm<Eigen::Infinity>());
    out = std::max(out, a.p_t[row].lpNorm<Eigen::Infinity>());
  }
  return out;
}

}  // namespace

TEST_CASE("compatibility: sampled initial data passes, perturbations are reported") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const BoundaryConditions bc = dynamic_case("harmonic-bc", 3.0);

  InitialData init = InitialData::zero(vu, vp);
  DirichletLifter dlift(vu);
  TangentialLifter tlift(vp);
  init.u0 = dlift.lift(bc.g_at(0.0));
  init.u1 = dlift.lift(bc.g_t_at(0.0));
  const auto g0 = bc.tangential_at(mesh, 0.0);
  const auto g1 = bc.tangential_t_at(mesh, 0.0);
  for (int row = 0; row < 3; ++row) {
    init.p0[row] = tlift.lift(g0[row]);
    init.p1[row] = tlift.lift(g1[row]);
  }

  const CompatibilityReport pass = check_compatibility(init, bc, vu, vp);
  CHECK(pass.pass());
  CHECK(pass.max_mismatch() < 1e-13);

  // Perturb the boundary values of u0 by 1e-3: reported within 10%.
  InitialData bad = init;
  for (int bn : vu.scalar.boundary_nodes) bad.u0[vu.dof(bn, 0)] += 1e-3;
  const CompatibilityReport fail = check_compatibility(bad, bc, vu, vp);
  CHECK(!fail.pass());
  CHECK(fail.u0_mismatch == doctest::Approx(1e-3).epsilon(0.1));

  // Homogeneous data with zero initial state passes.
  const CompatibilityReport zero =
      check_compatibility(InitialData::zero(vu, vp), BoundaryConditions{}, vu, vp);
  CHECK(zero.pass());
}

TEST_CASE("zero everything gives the identically zero trajectory") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  DynamicRun run;
  run.params = base_params();
  run.init = InitialData::zero(vu, vp);
  run.t_end = 0.2;
  run.dt = 0.02;
  const DynamicResult result = run_dynamic(run, vu, vp);
  CHECK(state_scale(result.final_state) == 0.0);
  for (const auto& e : result.energies) CHECK(e.total() == 0.0);
}

TEST_CASE("implicit midpoint conserves energy on a free run") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  DynamicRun run;
  run.params = base_params();
  run.init = random_homogeneous_init(mesh, vu, vp, 42);
  run.dt = 0.01;
  run.t_end = 2.0;  // 200 steps
  run.output_every = 50;
  const DynamicResult result = run_dynamic(run, vu, vp);
  const double e0 = result.energies.front().total();
  const double eT = result.energies.back().total();
  REQUIRE(e0 > 0.0);
  CHECK(std::abs(eT - e0) / e0 < 1e-8);
}

TEST_CASE("time reversibility of the midpoint rule") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  DynamicRun forward;
  forward.params = base_params();
  forward.init = random_homogeneous_init(mesh, vu, vp, 7);
  forward.dt = 0.02;
  forward.t_end = 1.0;
  forward.output_every = 1000000;
  const DynamicResult fwd = run_dynamic(forward, vu, vp);

  DynamicRun backward = forward;
  backward.init.u0 = fwd.final_state.u;
  backward.init.u1 = -fwd.final_state.u_t;
  for (int row = 0; row < 3; ++row) {
    backward.init.p0[row] = fwd.final_state.p[row];
    backward.init.p1[row] = -fwd.final_state.p_t[row];
  }
  const DynamicResult bwd = run_dynamic(backward, vu, vp);

  MicromorphicState recovered = bwd.final_state;
  recovered.u_t = -recovered.u_t;
  for (int row = 0; row < 3; ++row) recovered.p_t[row] = -recovered.p_t[row];

  MicromorphicState initial;
  initial.u = forward.init.u0;
  initial.u_t = forward.init.u1;
  initial.p = forward.init.p0;
  initial.p_t = forward.init.p1;
  CHECK(state_diff(recovered, initial) < 1e-8 * std::max(1.0, state_scale(initial)));
}

TEST_CASE("harmonic boundary data: match at outputs and integrator gap order") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const double omega = 3.0;
  const BoundaryConditions bc = dynamic_case("harmonic-bc", omega);

  auto make_run = [&](Integrator integrator, double dt) {
    DynamicRun run;
    run.params = base_params();
    run.boundary = bc;
    run.init = InitialData::zero(vu, vp);
    DirichletLifter dlift(vu);
    TangentialLifter tlift(vp);
    run.init.u1 = dlift.lift(bc.g_t_at(0.0));
    const auto g1 = bc.tangential_t_at(mesh, 0.0);
    for (int row = 0; row < 3; ++row) run.init.p1[row] = tlift.lift(g1[row]);
    run.integrator = integrator;
    run.dt = dt;
    run.t_end = 0.5;
    run.output_every = 1000000;
    return run;
  };

  // Boundary conditions hold exactly at every output time.
  {
    DynamicRun run = make_run(Integrator::implicit_midpoint, 0.025);
    run.output_every = 5;
    const DynamicResult result = run_dynamic(run, vu, vp);
    for (const auto& sample : result.samples) {
      const VectorField g = bc.g_at(sample.time);
      double worst = 0.0;
      for (int bn : vu.scalar.boundary_nodes) {
        const Vec3 gv = g ? g(vu.scalar.nodes[bn]) : Vec3::Zero();
        for (int comp = 0; comp < 3; ++comp)
          worst = std::max(worst,
                           std::abs(sample.state.u[vu.dof(bn, comp)] - gv[comp]));
      }
      CHECK(worst < 1e-12);
      const auto rows = bc.tangential_at(mesh, sample.time);
      for (int row = 0; row < 3; ++row)
        for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
          CHECK(std::abs(sample.state.p[row][mesh.boundary_edges[i]] -
                         rows[row].moments[static_cast<int>(i)]) < 1e-12);
    }
  }

  // Newmark and midpoint differ at O(dt^2): halving dt cuts the gap ~4x.
  auto final_gap = [&](double dt) {
    const DynamicResult mid = run_dynamic(make_run(Integrator::implicit_midpoint, dt), vu, vp);
    const DynamicResult nwm = run_dynamic(make_run(Integrator::newmark, dt), vu, vp);
    return state_diff(mid.final_state, nwm.final_state);
  };
  const double gap_h = final_gap(0.05);
  const double gap_h2 = final_gap(0.025);
  const double ratio = gap_h / gap_h2;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("linearity: doubling data doubles the trajectory") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);

  auto make_run = [&](double scale) {
    DynamicRun run;
    run.params = base_params();
    run.body_force = [scale](const Vec3& x, double t) {
      return Vec3(scale * std::sin(t) * x.y(), 0.0, scale * x.z());
    };
    run.init = random_homogeneous_init(mesh, vu, vp, 11);
    run.init.u0 *= scale;
    run.init.u1 *= scale;
    for (int row = 0; row < 3; ++row) {
      run.init.p0[row] *= scale;
      run.init.p1[row] *= scale;
    }
    run.dt = 0.02;
    run.t_end = 0.3;
    run.output_every = 1000000;
    return run;
  };
  const DynamicResult one = run_dynamic(make_run(1.0), vu, vp);
  const DynamicResult two = run_dynamic(make_run(2.0), vu, vp);
  MicromorphicState doubled = one.final_state;
  doubled.u *= 2.0;
  doubled.u_t *= 2.0;
  for (int row = 0; row < 3; ++row) {
    doubled.p[row] *= 2.0;
    doubled.p_t[row] *= 2.0;
  }
  CHECK(state_diff(doubled, two.final_state) < 1e-10 * std::max(1.0, state_scale(two.final_state)));
}

TEST_CASE("energy record: zero state, compatible state, identity state") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams p = base_params();

  MicromorphicState zero;
  zero.u = Eigen::VectorXd::Zero(vu.n_dofs());
  zero.u_t = zero.u;
  for (int row = 0; row < 3; ++row) {
    zero.p[row] = Eigen::VectorXd::Zero(vp.n_dofs());
    zero.p_t[row] = zero.p[row];
  }
  const EnergyRecord zero_record = energy(zero, p, vu, vp);
  CHECK(zero_record.total() == 0.0);

  // grad u = P (compatible): the three relative terms vanish.
  Mat3 b;
  b << 0.4, -0.2, 0.1, 0.3, 0.5, -0.6, 0.0, 0.2, -0.3;
  MicromorphicState compat = zero;
  compat.u = interpolate_h1(vu, [&b](const Vec3& x) { return Vec3(b * x); });
  for (int row = 0; row < 3; ++row)
    compat.p[row] =
        interpolate_hcurl(vp, [&b, row](const Vec3&) { return Vec3(b.row(row).transpose()); });
  const EnergyRecord compat_record = energy(compat, p, vu, vp);
  CHECK(compat_record.pot_e_sym < 1e-13);
  CHECK(compat_record.pot_c_skew < 1e-13);
  CHECK(compat_record.pot_e_tr < 1e-13);
  CHECK(compat_record.pot_micro_sym > 0.0);

  // u = x, P = id: hand-integrated potential 3 mu_micro + 4.5 lambda_micro.
  MicromorphicState identity = zero;
  identity.u = interpolate_h1(vu, [](const Vec3& x) { return x; });
  for (int row = 0; row < 3; ++row)
    identity.p[row] =
        interpolate_hcurl(vp, [row](const Vec3&) { return Vec3(Mat3::Identity().row(row)); });
  const EnergyRecord id_record = energy(identity, p, vu, vp);
  CHECK(id_record.potential() ==
        doctest::Approx(3.0 * p.mu_micro + 4.5 * p.lambda_micro).epsilon(1e-12));
}

TEST_CASE("incompatible initial data is refused") {
  const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, 2, 2, 2});
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  DynamicRun run;
  run.params = base_params();
  run.boundary = dynamic_case("harmonic-bc", 2.0);
  run.init = InitialData::zero(vu, vp);
  // u1 must match g_t(0) != 0 on the boundary; the zero init is incompatible.
  run.dt = 0.01;
  run.t_end = 0.05;
  CHECK_THROWS_AS(run_dynamic(run, vu, vp), std::runtime_error);
}