#include "micromorph/verification.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace micromorph {

namespace {

//------------------------------------------------------------------------------
// Tensor-space forms for the Korn study (no material constants)
//------------------------------------------------------------------------------

struct TensorForms {
  SparseMatrix sym_gram;   // <sym P, sym Q>
  SparseMatrix mass;       // <P, Q>
  SparseMatrix curlcurl;   // <Curl P, Curl Q>
  int n = 0;               // 3 * edges
};

TensorForms assemble_tensor_forms(const Mesh& mesh) {
  const HcurlSpace vp = make_hcurl(mesh);
  const int n_p = vp.n_dofs();
  TensorForms forms;
  forms.n = 3 * n_p;

  const QuadRule rule = tetrahedron_rule(4);
  std::vector<SparseMatrix::Triplet> sym_trip, mass_trip, curl_trip;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    std::array<Vec3, 6> curls;
    nedelec_curls(mesh, c, geom, curls);

    for (int r = 0; r < 3; ++r)
      for (int e = 0; e < 6; ++e)
        for (int f = 0; f < 6; ++f)
          curl_trip.push_back({r * n_p + mesh.cell_edges[c][e], r * n_p + mesh.cell_edges[c][f],
                               geom.volume * curls[e].dot(curls[f])});

    for (std::size_t q = 0; q < rule.size(); ++q) {
      std::array<Vec3, 6> phi;
      nedelec_shape(mesh, c, geom, rule.points[q], phi);
      const double w = rule.weights[q] * 6.0 * geom.volume;
      for (int r = 0; r < 3; ++r) {
        for (int e = 0; e < 6; ++e) {
          Mat3 pe = Mat3::Zero();
          pe.row(r) = phi[e].transpose();
          const Mat3 se = sym(pe);
          for (int s = 0; s < 3; ++s) {
            for (int f = 0; f < 6; ++f) {
              Mat3 pf = Mat3::Zero();
              pf.row(s) = phi[f].transpose();
              sym_trip.push_back({r * n_p + mesh.cell_edges[c][e],
                                  s * n_p + mesh.cell_edges[c][f], w * ddot(se, sym(pf))});
            }
          }
        }
      }
      // Mass is row-diagonal.
      for (int r = 0; r < 3; ++r)
        for (int e = 0; e < 6; ++e)
          for (int f = 0; f < 6; ++f)
            mass_trip.push_back({r * n_p + mesh.cell_edges[c][e], r * n_p + mesh.cell_edges[c][f],
                                 w * phi[e].dot(phi[f])});
    }
  }
  forms.sym_gram = SparseMatrix::from_triplets(forms.n, forms.n, std::move(sym_trip), true);
  forms.mass = SparseMatrix::from_triplets(forms.n, forms.n, std::move(mass_trip), true);
  forms.curlcurl = SparseMatrix::from_triplets(forms.n, forms.n, std::move(curl_trip), true);
  return forms;
}

std::vector<int> tensor_interior_dofs(const Mesh& mesh) {
  std::vector<int> out;
  const int n_p = mesh.n_edges();
  for (int r = 0; r < 3; ++r)
    for (int e = 0; e < n_p; ++e)
      if (!mesh.edge_is_boundary(e)) out.push_back(r * n_p + e);
  return out;
}

Eigen::VectorXd constant_tensor_field(const Mesh& mesh, const Mat3& value) {
  Eigen::VectorXd x(3 * mesh.n_edges());
  for (int r = 0; r < 3; ++r)
    for (int e = 0; e < mesh.n_edges(); ++e)
      x[r * mesh.n_edges() + e] = value.row(r).dot(mesh.edge_vector(e));
  return x;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  // Least-squares slope of log(err) against log(1/h).
  const int n = static_cast<int>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (int i = 0; i < n; ++i) {
    if (err[i] <= 0.0) continue;
    const double x = -std::log(h[i]);
    const double y = -std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) return 0.0;
  return (used * sxy - sx * sy) / (used * sxx - sx * sx);
}

constexpr double kEigenDenseThreshold = 3000;

}  // namespace

double ConstantReport::spread() const {
  if (values.empty()) return 0.0;
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 ? (hi - lo) / lo : 0.0;
}

//------------------------------------------------------------------------------
// Korn
//------------------------------------------------------------------------------

double korn_lambda_min(const Mesh& mesh) {
  const TensorForms forms = assemble_tensor_forms(mesh);
  const std::vector<int> interior = tensor_interior_dofs(mesh);
  const SparseMatrix a =
      add(forms.sym_gram, forms.curlcurl).submatrix(interior, interior);
  const SparseMatrix b = add(forms.mass, forms.curlcurl).submatrix(interior, interior);
  const auto pairs = smallest_generalized_eigenpairs(a, b, 1, kEigenDenseThreshold);
  return pairs.front().value;
}

double korn_skew_guard(const Mesh& mesh) {
  const TensorForms forms = assemble_tensor_forms(mesh);
  Mat3 skew_w;
  skew_w << 0.0, 1.0, -0.5, -1.0, 0.0, 0.75, 0.5, -0.75, 0.0;
  const Eigen::VectorXd x = constant_tensor_field(mesh, skew_w);
  const double num = x.dot(forms.sym_gram.apply(x)) + x.dot(forms.curlcurl.apply(x));
  const double den = x.dot(forms.mass.apply(x)) + x.dot(forms.curlcurl.apply(x));
  return num / den;
}

ConstantReport korn_constant(const std::vector<int>& levels) {
  ConstantReport report;
  report.name = "korn_lambda_min";
  for (int nx : levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    report.levels.push_back(nx);
    report.values.push_back(korn_lambda_min(mesh));
  }
  return report;
}

//------------------------------------------------------------------------------
// Coercivity
//------------------------------------------------------------------------------

double coercivity_lambda_min(const MaterialParams& params, const Mesh& mesh) {
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const BlockLayout layout = block_layout(vu, vp);

  const SparseMatrix k = assemble_micromorphic(params, vu, vp);

  // Gram of ||grad u||^2 + ||P||^2 + ||Curl P||^2.
  std::vector<SparseMatrix::Triplet> triplets;
  {
    const SparseMatrix ku = assemble_h1_vector_stiffness(vu);
    for (int r = 0; r < ku.rows(); ++r)
      for (int kk = ku.row_offsets()[r]; kk < ku.row_offsets()[r + 1]; ++kk)
        triplets.push_back({layout.u_dof(r), layout.u_dof(ku.col_indices()[kk]), ku.values()[kk]});
    const SparseMatrix mp = add(assemble_hcurl_mass(vp), assemble_hcurl_curlcurl(vp));
    for (int row = 0; row < 3; ++row)
      for (int r = 0; r < mp.rows(); ++r)
        for (int kk = mp.row_offsets()[r]; kk < mp.row_offsets()[r + 1]; ++kk)
          triplets.push_back(
              {layout.p_dof(row, r), layout.p_dof(row, mp.col_indices()[kk]), mp.values()[kk]});
  }
  const SparseMatrix n =
      SparseMatrix::from_triplets(layout.total(), layout.total(), std::move(triplets), true);

  const std::vector<int> free = complement(layout.total(), constrained_dofs(vu, vp));
  const auto pairs = smallest_generalized_eigenpairs(k.submatrix(free, free),
                                                     n.submatrix(free, free), 1,
                                                     kEigenDenseThreshold);
  return pairs.front().value;
}

ConstantReport coercivity_constant(const MaterialParams& params, const std::vector<int>& levels) {
  ConstantReport report;
  report.name = "coercivity_lambda_min";
  for (int nx : levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    report.levels.push_back(nx);
    report.values.push_back(coercivity_lambda_min(params, mesh));
  }
  return report;
}

//------------------------------------------------------------------------------
// L2 errors
//------------------------------------------------------------------------------

double l2_error_u(const H1VectorSpace& vu, const Eigen::VectorXd& u, const VectorField& exact) {
  const Mesh& mesh = *vu.scalar.mesh;
  const QuadRule rule = tetrahedron_rule(6);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const Vec3 diff = evaluate_h1(vu, u, c, rule.points[q]) - exact(x);
      acc += rule.weights[q] * 6.0 * geom.volume * diff.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

double l2_error_p(const HcurlSpace& vp, const std::array<Eigen::VectorXd, 3>& rows,
                  const MatrixField& exact) {
  const Mesh& mesh = *vp.mesh;
  const QuadRule rule = tetrahedron_rule(6);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const Mat3 px = exact(x);
      double err2 = 0.0;
      for (int row = 0; row < 3; ++row) {
        const Vec3 diff =
            evaluate_hcurl(vp, rows[row], c, rule.points[q]) - px.row(row).transpose();
        err2 += diff.squaredNorm();
      }
      acc += rule.weights[q] * 6.0 * geom.volume * err2;
    }
  }
  return std::sqrt(acc);
}

double l2_error_curl_p(const HcurlSpace& vp, const std::array<Eigen::VectorXd, 3>& rows,
                       const MatrixField& exact_curl) {
  const Mesh& mesh = *vp.mesh;
  const QuadRule rule = tetrahedron_rule(6);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeom geom = cell_geometry(mesh, c);
    std::array<Vec3, 3> curls;
    for (int row = 0; row < 3; ++row) curls[row] = cell_curl(vp, rows[row], c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = geom.map(rule.points[q]);
      const Mat3 cx = exact_curl(x);
      double err2 = 0.0;
      for (int row = 0; row < 3; ++row) err2 += (curls[row] - cx.row(row).transpose()).squaredNorm();
      acc += rule.weights[q] * 6.0 * geom.volume * err2;
    }
  }
  return std::sqrt(acc);
}

//------------------------------------------------------------------------------
// Finite-difference oracle
//------------------------------------------------------------------------------

double manufactured_oracle_residual(const ManufacturedCase& c, const MaterialParams& params) {
  const double h = 1e-5;
  auto stress = [&](const Vec3& x) -> Mat3 {
    const Mat3 a = c.grad_u_star(x) - c.p_star(x);
    return 2.0 * params.mu_e * sym(a) + 2.0 * params.mu_c * skew(a) +
           params.lambda_e * a.trace() * Mat3::Identity();
  };
  auto curl_of = [&](const std::function<Mat3(const Vec3&)>& field, const Vec3& x) -> Mat3 {
    // Row-wise curl by central differences.
    Mat3 out;
    std::array<Mat3, 3> dp, dm;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      dp[j] = field(xp);
      dm[j] = field(xm);
    }
    auto d = [&](int row, int comp, int j) {
      return (dp[j](row, comp) - dm[j](row, comp)) / (2.0 * h);
    };
    for (int row = 0; row < 3; ++row) {
      out(row, 0) = d(row, 2, 1) - d(row, 1, 2);
      out(row, 1) = d(row, 0, 2) - d(row, 2, 0);
      out(row, 2) = d(row, 1, 0) - d(row, 0, 1);
    }
    return out;
  };

  const VectorField force = c.force(params);
  const MatrixField moment = c.moment(params);
  double worst = 0.0;
  for (int ix = 0; ix < 4; ++ix) {
    for (int iy = 0; iy < 4; ++iy) {
      for (int iz = 0; iz < 4; ++iz) {
        const Vec3 x(0.15 + 0.2 * ix, 0.15 + 0.2 * iy, 0.15 + 0.2 * iz);

        // First equation: Div(S) + F = 0.
        Vec3 div_s = Vec3::Zero();
        for (int j = 0; j < 3; ++j) {
          Vec3 xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          const Mat3 sp = stress(xp), sm = stress(xm);
          for (int i = 0; i < 3; ++i) div_s[i] += (sp(i, j) - sm(i, j)) / (2.0 * h);
        }
        worst = std::max(worst, (div_s + force(x)).cwiseAbs().maxCoeff());

        // Stated curls match the fields.
        const Mat3 curl_fd = curl_of(c.p_star, x);
        worst = std::max(worst, (curl_fd - c.curl_p_star(x)).cwiseAbs().maxCoeff());

        // Second equation: S - micro terms - mu_macro L_c^2 CurlCurl P + M = 0.
        const Mat3 curlcurl_fd = curl_of(c.curl_p_star, x);
        const Mat3 p = c.p_star(x);
        const Mat3 r2 = stress(x) -
                        (2.0 * params.mu_micro * sym(p) +
                         params.lambda_micro * p.trace() * Mat3::Identity()) -
                        params.mu_macro * params.l_c * params.l_c * curlcurl_fd + moment(x);
        worst = std::max(worst, r2.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

//------------------------------------------------------------------------------
// Convergence study
//------------------------------------------------------------------------------

ConvergenceResult manufactured_convergence(const std::string& case_name,
                                           const MaterialParams& params,
                                           const std::vector<int>& levels, LiftingPath lifting,
                                           const SolveOptions& opts) {
  const ManufacturedCase c = manufactured_case(case_name);
  ConvergenceResult result;
  result.case_name = case_name;
  result.oracle_residual = manufactured_oracle_residual(c, params);
  if (result.oracle_residual > 1e-6)
    throw std::runtime_error("manufactured_convergence: case '" + case_name +
                             "' fails the finite-difference oracle, residual " +
                             std::to_string(result.oracle_residual));

  std::vector<double> hs, eu, ep, ec;
  for (int nx : levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    const H1VectorSpace vu = make_h1_vector(mesh, 1);
    const HcurlSpace vp = make_hcurl(mesh);

    LiftedBoundaryData boundary;
    boundary.dirichlet = c.u_star;
    boundary.tangential = case_tangential_data(c, mesh);
    const StaticSolution sol = solve_static(params, vu, vp, c.force(params), c.moment(params),
                                            boundary, lifting, opts);

    ConvergenceRow row;
    row.nx = nx;
    row.h = 1.0 / nx;
    row.err_u = l2_error_u(vu, sol.u, c.u_star);
    row.err_p = l2_error_p(vp, sol.p_rows, c.p_star);
    row.err_curl_p = l2_error_curl_p(vp, sol.p_rows, c.curl_p_star);
    result.rows.push_back(row);
    hs.push_back(row.h);
    eu.push_back(row.err_u);
    ep.push_back(row.err_p);
    ec.push_back(row.err_curl_p);
  }
  result.order_u = fit_order(hs, eu);
  result.order_p = fit_order(hs, ep);
  result.order_curl_p = fit_order(hs, ec);
  return result;
}

//------------------------------------------------------------------------------
// Extension property suite
//------------------------------------------------------------------------------

const ExtensionSuiteRow& ExtensionSuiteResult::row(const std::string& member, int nx) const {
  for (const auto& r : rows)
    if (r.member == member && r.nx == nx) return r;
  throw std::out_of_range("extension suite: no row " + member + " at nx " + std::to_string(nx));
}

ExtensionSuiteResult extension_property_suite(const std::vector<int>& levels, std::uint64_t seed,
                                              int n_random) {
  struct SmoothMember {
    std::string name;
    VectorField field;
  };
  const std::vector<SmoothMember> smooth = {
      {"zero", [](const Vec3&) { return Vec3::Zero(); }},
      {"grad-harmonic", [](const Vec3& x) { return Vec3(2.0 * x.x(), -2.0 * x.y(), 0.0); }},
      {"rotation", [](const Vec3& x) { return Vec3(-x.y(), x.x(), 0.0); }},
      {"quadratic",
       [](const Vec3& x) { return Vec3(x.y() * x.y(), x.z() * x.z(), x.x() * x.x()); }},
      {"cubic",
       [](const Vec3& x) { return Vec3(x.y() * x.z(), -x.z() * x.x(), x.x() * x.y()); }},
  };

  ExtensionSuiteResult result;
  result.levels = levels;
  result.c1_star.name = "c1_star";
  result.c1.name = "c1";

  for (int nx : levels) {
    const Mesh mesh = build_box_mesh({1.0, 1.0, 1.0, nx, nx, nx});
    const HcurlSpace vp = make_hcurl(mesh);
    const ExtensionPipeline pipeline(mesh);
    result.harmonic_dims.push_back(pipeline.harmonic().dimension());

    double level_c1_star = 0.0, level_c1 = 0.0;
    for (const auto& member : smooth) {
      const Eigen::VectorXd coeffs = interpolate_hcurl(vp, member.field);
      const TangentialTraceData g = tangential_trace(vp, coeffs);
      ExtensionSuiteRow row;
      row.member = member.name;
      row.nx = nx;
      row.smooth = true;
      row.report = pipeline.extend(g).report;
      if (member.name != "zero") {
        level_c1_star = std::max(level_c1_star, row.report.c1_star);
        level_c1 = std::max(level_c1, row.report.c1);
      }
      result.rows.push_back(std::move(row));
    }

    for (int r = 0; r < n_random; ++r) {
      std::mt19937_64 rng(seed + 1000ull * static_cast<std::uint64_t>(nx) +
                          static_cast<std::uint64_t>(r));
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      TangentialTraceData g = TangentialTraceData::zero(mesh);
      for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
        g.moments[static_cast<int>(i)] =
            dist(rng) * mesh.edge_vector(mesh.boundary_edges[i]).norm();
      ExtensionSuiteRow row;
      row.member = "random-" + std::to_string(r);
      row.nx = nx;
      row.smooth = false;
      row.report = pipeline.extend(g).report;
      result.rows.push_back(std::move(row));
    }

    result.c1_star.levels.push_back(nx);
    result.c1_star.values.push_back(level_c1_star);
    result.c1.levels.push_back(nx);
    result.c1.values.push_back(level_c1);
  }
  return result;
}

}  // namespace micromorph
