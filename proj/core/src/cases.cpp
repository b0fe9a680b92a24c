#include "micromorph/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace micromorph {

namespace {

Mat3 stress_like(const MaterialParams& p, const Mat3& a) {
  return 2.0 * p.mu_e * sym(a) + 2.0 * p.mu_c * skew(a) +
         p.lambda_e * a.trace() * Mat3::Identity();
}

ManufacturedCase zero_case() {
  ManufacturedCase c;
  c.name = "zero";
  c.trivially_exact = true;
  c.u_star = [](const Vec3&) { return Vec3::Zero(); };
  c.grad_u_star = [](const Vec3&) { return Mat3::Zero(); };
  c.p_star = [](const Vec3&) { return Mat3::Zero(); };
  c.curl_p_star = [](const Vec3&) { return Mat3::Zero(); };
  c.force = [](const MaterialParams&) -> VectorField {
    return [](const Vec3&) { return Vec3::Zero(); };
  };
  c.moment = [](const MaterialParams&) -> MatrixField {
    return [](const Vec3&) { return Mat3::Zero(); };
  };
  return c;
}

ManufacturedCase affine_case() {
  // u affine with P = grad u constant: both fields lie in the discrete spaces,
  // so the Galerkin solution is exact up to solver tolerance.
  ManufacturedCase c;
  c.name = "affine";
  c.trivially_exact = true;
  Mat3 b;
  b << 0.5, 0.2, -0.1, 0.3, -0.4, 0.25, -0.15, 0.1, 0.6;
  const Vec3 shift(0.1, -0.2, 0.3);
  c.u_star = [b, shift](const Vec3& x) -> Vec3 { return shift + b * x; };
  c.grad_u_star = [b](const Vec3&) { return b; };
  c.p_star = [b](const Vec3&) { return b; };
  c.curl_p_star = [](const Vec3&) { return Mat3::Zero(); };
  c.force = [](const MaterialParams&) -> VectorField {
    return [](const Vec3&) { return Vec3::Zero(); };
  };
  c.moment = [b](const MaterialParams& p) -> MatrixField {
    const Mat3 m =
        2.0 * p.mu_micro * sym(b) + p.lambda_micro * b.trace() * Mat3::Identity();
    return [m](const Vec3&) { return m; };
  };
  return c;
}

ManufacturedCase poly3_case() {
  ManufacturedCase c;
  c.name = "poly3";
  c.u_star = [](const Vec3& v) {
    const double x = v.x(), y = v.y(), z = v.z();
    return Vec3(x * x * x + y * z, y * y * y + x * z, z * z * z + 2.0 * x * y);
  };
  c.grad_u_star = [](const Vec3& v) {
    const double x = v.x(), y = v.y(), z = v.z();
    Mat3 g;
    g << 3.0 * x * x, z, y,
         z, 3.0 * y * y, x,
         2.0 * y, 2.0 * x, 3.0 * z * z;
    return g;
  };
  c.p_star = [](const Vec3& v) {
    const double x = v.x(), y = v.y(), z = v.z();
    Mat3 p;
    p << y * y, z * z, x * x,
         x * y, y * z, z * x,
         z * z, x * x, y * y;
    return p;
  };
  c.curl_p_star = [](const Vec3& v) {
    const double x = v.x(), y = v.y(), z = v.z();
    Mat3 cp;
    cp << -2.0 * z, -2.0 * x, -2.0 * y,
          -y, -z, -x,
          2.0 * y, 2.0 * z, 2.0 * x;
    return cp;
  };
  // Row-wise Curl Curl of P*: constant.
  const Mat3 curlcurl = (Mat3() << -2.0, -2.0, -2.0, 1.0, 1.0, 1.0, -2.0, -2.0, -2.0).finished();

  c.force = [](const MaterialParams& p) -> VectorField {
    return [p](const Vec3& v) {
      const double x = v.x(), y = v.y(), z = v.z();
      // Hand-derived divergences of sym/skew(grad u* - P*) and grad tr(...).
      const Vec3 div_sym(5.5 * x - z, 5.5 * y - z - 0.5 * x, 6.0 * z - x);
      const Vec3 div_skew(0.5 * (x + 2.0 * z), -0.5 * (y + x), x);
      const Vec3 grad_tr(6.0 * x, 2.0 * y - z, 6.0 * z - y);
      return Vec3(-(2.0 * p.mu_e * div_sym + 2.0 * p.mu_c * div_skew + p.lambda_e * grad_tr));
    };
  };
  c.moment = [curlcurl, grad_u = c.grad_u_star, p_star = c.p_star](const MaterialParams& p) -> MatrixField {
    return [=](const Vec3& v) {
      const Mat3 a = grad_u(v) - p_star(v);
      const Mat3 pm = p_star(v);
      Mat3 m = -stress_like(p, a);
      m += 2.0 * p.mu_micro * sym(pm) + p.lambda_micro * pm.trace() * Mat3::Identity();
      m += p.mu_macro * p.l_c * p.l_c * curlcurl;
      return m;
    };
  };
  return c;
}

}  // namespace

ManufacturedCase manufactured_case(const std::string& name) {
  if (name == "zero") return zero_case();
  if (name == "affine") return affine_case();
  if (name == "poly3") return poly3_case();
  throw std::invalid_argument("unknown manufactured case '" + name + "'");
}

std::vector<std::string> manufactured_case_names() { return {"zero", "affine", "poly3"}; }

BoundaryConditions dynamic_case(const std::string& name, double omega) {
  BoundaryConditions bc;
  if (name == "zero") return bc;
  if (name == "harmonic-bc") {
    auto ghat = [](const Vec3& v) { return Vec3(v.y() * v.z(), v.z() * v.x(), v.x() * v.y()); };
    bc.dirichlet.g = [ghat, omega](const Vec3& x, double t) -> Vec3 {
      return std::sin(omega * t) * ghat(x);
    };
    bc.dirichlet.g_t = [ghat, omega](const Vec3& x, double t) -> Vec3 {
      return omega * std::cos(omega * t) * ghat(x);
    };
    bc.dirichlet.g_tt = [ghat, omega](const Vec3& x, double t) -> Vec3 {
      return -omega * omega * std::sin(omega * t) * ghat(x);
    };
    bc.tangential = BoundaryConditions::Tangential::coupling;
    return bc;
  }
  throw std::invalid_argument("unknown dynamic case '" + name + "'");
}

std::vector<std::string> dynamic_case_names() { return {"zero", "harmonic-bc"}; }

std::array<TangentialTraceData, 3> case_tangential_data(const ManufacturedCase& c,
                                                        const Mesh& mesh) {
  std::array<TangentialTraceData, 3> rows{TangentialTraceData::zero(mesh),
                                          TangentialTraceData::zero(mesh),
                                          TangentialTraceData::zero(mesh)};
  const double s0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double s1 = 0.5 + 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const int e = mesh.boundary_edges[i];
    const Vec3 a = mesh.vertices[mesh.edges[e][0]];
    const Vec3 d = mesh.edge_vector(e);
    const Mat3 q0 = c.p_star(a + s0 * d), q1 = c.p_star(a + s1 * d);
    for (int row = 0; row < 3; ++row)
      rows[row].moments[static_cast<int>(i)] = 0.5 * (q0.row(row).dot(d) + q1.row(row).dot(d));
  }
  return rows;
}

}  // namespace micromorph
