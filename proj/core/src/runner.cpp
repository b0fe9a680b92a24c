#include "micromorph/runner.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "micromorph/cases.hpp"
#include "micromorph/io.hpp"
#include "micromorph/verification.hpp"

namespace micromorph {

namespace {

using KV = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) { return format_double(v); }

void run_mesh(const RunConfig& config, const std::string& out) {
  const Mesh mesh = build_box_mesh(config.box());
  if (config.write_vtk) write_vtk_mesh(out + "/mesh.vtk", mesh);

  double volume = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) volume += mesh.cell_volume(c);
  const int euler = mesh.n_vertices() - mesh.n_edges() + mesh.n_faces() - mesh.n_cells();

  KV report;
  report.emplace_back("n_vertices", std::to_string(mesh.n_vertices()));
  report.emplace_back("n_cells", std::to_string(mesh.n_cells()));
  report.emplace_back("n_edges", std::to_string(mesh.n_edges()));
  report.emplace_back("n_faces", std::to_string(mesh.n_faces()));
  report.emplace_back("n_boundary_faces", std::to_string(static_cast<int>(mesh.boundary_faces.size())));
  report.emplace_back("n_boundary_edges", std::to_string(static_cast<int>(mesh.boundary_edges.size())));
  report.emplace_back("total_volume", num(volume));
  report.emplace_back("euler_characteristic", std::to_string(euler));
  write_key_value(out + "/mesh_report.txt", report);
}

void run_solve_static(const RunConfig& config, const std::string& out) {
  const Mesh mesh = build_box_mesh(config.box());
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);

  StaticSolution sol;
  if (config.static_case == "inline") {
    // Affine Dirichlet data from inline coefficients, coupled tangential data.
    const std::array<double, 3>& c0 = config.inline_g_const;
    const std::array<double, 9>& cl = config.inline_g_linear;
    Mat3 b;
    b << cl[0], cl[1], cl[2], cl[3], cl[4], cl[5], cl[6], cl[7], cl[8];
    const Vec3 shift(c0[0], c0[1], c0[2]);
    const VectorField g = [b, shift](const Vec3& x) -> Vec3 { return shift + b * x; };
    LiftedBoundaryData boundary;
    boundary.dirichlet = g;
    boundary.tangential = coupling_trace(g, mesh);
    sol = solve_static(config.material, vu, vp, nullptr, nullptr, boundary,
                       config.lifting_path());
  } else {
    const ManufacturedCase c = manufactured_case(config.static_case);
    if (config.static_case == "zero") {
      sol = solve_static_homogeneous(config.material, vu, vp, c.force(config.material),
                                     c.moment(config.material));
    } else {
      LiftedBoundaryData boundary;
      boundary.dirichlet = c.u_star;
      boundary.tangential = case_tangential_data(c, mesh);
      sol = solve_static(config.material, vu, vp, c.force(config.material),
                         c.moment(config.material), boundary, config.lifting_path());
    }
  }

  if (config.write_vtk)
    write_vtk_solution(out + "/solution.vtk", mesh, &vu, &sol.u, &vp, &sol.p_rows);
  if (config.dump_matrix)
    write_matrix_market(out + "/stiffness.mtx",
                        assemble_micromorphic(config.material, vu, vp));

  KV report;
  report.emplace_back("case", config.static_case);
  report.emplace_back("lifting", config.lifting);
  report.emplace_back("n_dofs", std::to_string(block_layout(vu, vp).total()));
  report.emplace_back("energy", num(sol.energy));
  report.emplace_back("residual", num(sol.residual));
  report.emplace_back("iterations", std::to_string(sol.iterations));
  report.emplace_back("bc_dirichlet_error", num(sol.bc_dirichlet_error));
  report.emplace_back("bc_tangential_error", num(sol.bc_tangential_error));
  write_key_value(out + "/static_summary.txt", report);
}

void run_solve_dynamic(const RunConfig& config, const std::string& out) {
  const Mesh mesh = build_box_mesh(config.box());
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);

  DynamicRun run;
  run.params = config.material;
  run.boundary = dynamic_case(config.dynamic_case, config.omega);
  run.dt = config.dt;
  run.t_end = config.dt * config.steps;
  run.integrator = config.integrator_kind();
  run.output_every = config.output_every;

  if (config.dynamic_init == "zero") {
    run.init = InitialData::zero(vu, vp);
  } else if (config.dynamic_init == "random") {
    if (!run.boundary.homogeneous())
      throw std::runtime_error("dynamic init 'random' requires homogeneous boundary data");
    run.init = InitialData::zero(vu, vp);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    const std::vector<int> ubd = vu.boundary_dofs();
    std::vector<char> is_boundary(vu.n_dofs(), 0);
    for (int d : ubd) is_boundary[d] = 1;
    for (int d = 0; d < vu.n_dofs(); ++d)
      if (!is_boundary[d]) {
        run.init.u0[d] = dist(rng);
        run.init.u1[d] = dist(rng);
      }
    for (int row = 0; row < 3; ++row)
      for (int e = 0; e < mesh.n_edges(); ++e)
        if (!mesh.edge_is_boundary(e)) {
          run.init.p0[row][e] = dist(rng);
          run.init.p1[row][e] = dist(rng);
        }
  } else {  // from-boundary: lift the t = 0 boundary data
    run.init = InitialData::zero(vu, vp);
    if (!run.boundary.homogeneous()) {
      DirichletLifter dlift(vu);
      TangentialLifter tlift(vp);
      if (run.boundary.dirichlet.g) run.init.u0 = dlift.lift(run.boundary.g_at(0.0));
      if (run.boundary.dirichlet.g_t) run.init.u1 = dlift.lift(run.boundary.g_t_at(0.0));
      const auto g0 = run.boundary.tangential_at(mesh, 0.0);
      const auto g1 = run.boundary.tangential_t_at(mesh, 0.0);
      for (int row = 0; row < 3; ++row) {
        run.init.p0[row] = tlift.lift(g0[row]);
        run.init.p1[row] = tlift.lift(g1[row]);
      }
    }
  }

  const DynamicResult result = run_dynamic(run, vu, vp);

  std::vector<std::vector<std::string>> rows;
  for (const auto& e : result.energies)
    rows.push_back({num(e.time), num(e.kinetic), num(e.pot_e_sym), num(e.pot_c_skew),
                    num(e.pot_e_tr), num(e.pot_micro_sym), num(e.pot_micro_tr), num(e.pot_curl),
                    num(e.potential()), num(e.total())});
  write_csv(out + "/energy.csv",
            {"time", "kinetic", "pot_e_sym", "pot_c_skew", "pot_e_tr", "pot_micro_sym",
             "pot_micro_tr", "pot_curl", "potential", "total"},
            rows);

  if (config.write_vtk) {
    for (const auto& sample : result.samples) {
      char name[64];
      std::snprintf(name, sizeof(name), "/solution_%06d.vtk", sample.step);
      write_vtk_solution(out + name, mesh, &vu, &sample.state.u, &vp, &sample.state.p);
    }
  }

  const double e0 = result.energies.front().total();
  const double eT = result.energies.back().total();
  KV report;
  report.emplace_back("case", config.dynamic_case);
  report.emplace_back("integrator", config.integrator);
  report.emplace_back("steps", std::to_string(result.steps));
  report.emplace_back("dt", num(config.dt));
  report.emplace_back("energy_initial", num(e0));
  report.emplace_back("energy_final", num(eT));
  report.emplace_back("energy_drift_rel", num(e0 != 0.0 ? std::abs(eT - e0) / std::abs(e0) : 0.0));
  write_key_value(out + "/dynamic_summary.txt", report);
}

void run_verify_extension(const RunConfig& config, const std::string& out) {
  const ExtensionSuiteResult suite =
      extension_property_suite(config.extension_levels, config.seed, config.ensemble_random);

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : suite.rows)
    rows.push_back({r.member, std::to_string(r.nx), r.smooth ? "1" : "0",
                    num(r.report.trace_error), num(r.report.trace_norm),
                    num(r.report.curlcurl_residual), num(r.report.div_residual),
                    num(r.report.c1_star), num(r.report.c1),
                    std::to_string(r.report.harmonic_dimension)});
  write_csv(out + "/extension_report.csv",
            {"member", "nx", "smooth", "trace_error", "trace_norm", "curlcurl_residual",
             "div_residual", "c1_star", "c1", "harmonic_dim"},
            rows);

  KV report;
  report.emplace_back("norm_note", "H^{-1/2} pairings replaced by boundary-L2 surrogates");
  for (std::size_t i = 0; i < suite.levels.size(); ++i) {
    const std::string level = std::to_string(suite.levels[i]);
    report.emplace_back("harmonic_dim_nx" + level, std::to_string(suite.harmonic_dims[i]));
    report.emplace_back("c1_star_nx" + level, num(suite.c1_star.values[i]));
    report.emplace_back("c1_nx" + level, num(suite.c1.values[i]));
  }
  report.emplace_back("c1_star_spread", num(suite.c1_star.spread()));
  report.emplace_back("c1_spread", num(suite.c1.spread()));
  write_key_value(out + "/extension_summary.txt", report);
}

void run_korn(const RunConfig& config, const std::string& out) {
  std::vector<std::vector<std::string>> rows;
  KV report;
  report.emplace_back("norm_note", "discrete surrogate constants, unit-cube levels");

  std::vector<double> lambdas;
  for (int nx : config.korn_levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    const double lambda = korn_lambda_min(mesh);
    const double guard = korn_skew_guard(mesh);
    lambdas.push_back(lambda);
    rows.push_back({std::to_string(nx), num(lambda), num(1.0 / lambda), num(guard)});
  }
  write_csv(out + "/korn.csv", {"nx", "lambda_min", "korn_constant", "skew_guard"}, rows);

  double lo = lambdas.front(), hi = lambdas.front();
  for (double v : lambdas) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  report.emplace_back("korn_lambda_min_spread", num(lo > 0.0 ? (hi - lo) / lo : 0.0));

  std::vector<std::vector<std::string>> coercivity_rows;
  for (int nx : config.coercivity_levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    MaterialParams zero_case = config.material;
    zero_case.mu_c = 0.0;
    MaterialParams one_case = config.material;
    one_case.mu_c = 1.0;
    coercivity_rows.push_back({std::to_string(nx), num(coercivity_lambda_min(zero_case, mesh)),
                               num(coercivity_lambda_min(one_case, mesh))});
  }
  write_csv(out + "/coercivity.csv", {"nx", "lambda_min_mu_c_0", "lambda_min_mu_c_1"},
            coercivity_rows);
  write_key_value(out + "/korn_summary.txt", report);
}

void run_convergence(const RunConfig& config, const std::string& out) {
  const ConvergenceResult result = manufactured_convergence(
      config.convergence_case, config.material, config.convergence_levels, config.lifting_path());

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.rows)
    rows.push_back(
        {std::to_string(r.nx), num(r.h), num(r.err_u), num(r.err_p), num(r.err_curl_p)});
  write_csv(out + "/convergence.csv", {"nx", "h", "err_u", "err_p", "err_curl_p"}, rows);

  KV report;
  report.emplace_back("case", result.case_name);
  report.emplace_back("oracle_residual", num(result.oracle_residual));
  report.emplace_back("order_u", num(result.order_u));
  report.emplace_back("order_p", num(result.order_p));
  report.emplace_back("order_curl_p", num(result.order_curl_p));
  write_key_value(out + "/convergence_summary.txt", report);
}

}  // namespace

void run(const RunConfig& config, const std::string& out_dir) {
  if (config.command.empty()) throw std::runtime_error("no command given");
  std::filesystem::create_directories(out_dir);

  if (config.command == "mesh")
    run_mesh(config, out_dir);
  else if (config.command == "solve-static")
    run_solve_static(config, out_dir);
  else if (config.command == "solve-dynamic")
    run_solve_dynamic(config, out_dir);
  else if (config.command == "verify-extension")
    run_verify_extension(config, out_dir);
  else if (config.command == "korn")
    run_korn(config, out_dir);
  else if (config.command == "convergence")
    run_convergence(config, out_dir);
  else
    throw std::runtime_error("unknown command '" + config.command + "'");
}

}  // namespace micromorph
