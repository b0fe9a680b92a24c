#include "micromorph/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace micromorph {

namespace {

// Gauss-Jacobi rule for the weight (1-t)^alpha on [0,1], via Golub-Welsch on the
// symmetric tridiagonal recurrence matrix of the Jacobi polynomials (beta = 0).
QuadRule gauss_jacobi_unit(int n, int alpha) {
  if (n < 1) throw std::invalid_argument("quadrature: need at least one point");
  const double a = static_cast<double>(alpha);
  const double b = 0.0;

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double diag;
    if (k == 0) {
      diag = (b - a) / (a + b + 2.0);
    } else {
      const double s = 2.0 * k + a + b;
      diag = (b * b - a * a) / (s * (s + 2.0));
    }
    jac(k, k) = diag;
    if (k >= 1) {
      const double s = 2.0 * k + a + b;
      const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
      const double den = s * s * (s + 1.0) * (s - 1.0);
      const double off = std::sqrt(num / den);
      jac(k, k - 1) = off;
      jac(k - 1, k) = off;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolve failed");

  // Zeroth moment of (1-x)^a on [-1,1]; beta = 0.
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);

  QuadRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    // Map [-1,1] -> [0,1]; the weight picks up 2^{-(alpha+1)}.
    rule.points[i] = Vec3((x + 1.0) / 2.0, 0.0, 0.0);
    rule.weights[i] = mu0 * v0 * v0 / std::pow(2.0, a + 1.0);
  }
  return rule;
}

}  // namespace

QuadRule gauss_segment(int n) { return gauss_jacobi_unit(n, 0); }

QuadRule conical_triangle(int n) {
  const QuadRule r1 = gauss_jacobi_unit(n, 1);
  const QuadRule r0 = gauss_jacobi_unit(n, 0);
  QuadRule rule;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = r1.points[i].x();
      const double y = r0.points[j].x() * (1.0 - x);
      rule.points.emplace_back(x, y, 0.0);
      rule.weights.push_back(r1.weights[i] * r0.weights[j]);
    }
  }
  return rule;
}

QuadRule conical_tetrahedron(int n) {
  const QuadRule r2 = gauss_jacobi_unit(n, 2);
  const QuadRule r1 = gauss_jacobi_unit(n, 1);
  const QuadRule r0 = gauss_jacobi_unit(n, 0);
  QuadRule rule;
  rule.points.reserve(n * n * n);
  rule.weights.reserve(n * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double x = r2.points[i].x();
        const double y = r1.points[j].x() * (1.0 - x);
        const double z = r0.points[k].x() * (1.0 - x) * (1.0 - r1.points[j].x());
        rule.points.emplace_back(x, y, z);
        rule.weights.push_back(r2.weights[i] * r1.weights[j] * r0.weights[k]);
      }
    }
  }
  return rule;
}

QuadRule tetrahedron_rule(int degree) { return conical_tetrahedron(degree / 2 + 1); }
QuadRule triangle_rule(int degree) { return conical_triangle(degree / 2 + 1); }
QuadRule segment_rule(int degree) { return gauss_segment(degree / 2 + 1); }

double reference_tet_monomial_integral(int a, int b, int c) {
  // a! b! c! / (a+b+c+3)!
  double value = 1.0;
  int denom_start = 1;
  for (int k = 2; k <= a; ++k) value *= k;
  for (int k = 2; k <= b; ++k) value *= k;
  for (int k = 2; k <= c; ++k) value *= k;
  for (int k = denom_start; k <= a + b + c + 3; ++k) value /= k;
  return value;
}

double reference_tri_monomial_integral(int a, int b) {
  double value = 1.0;
  for (int k = 2; k <= a; ++k) value *= k;
  for (int k = 2; k <= b; ++k) value *= k;
  for (int k = 1; k <= a + b + 2; ++k) value /= k;
  return value;
}

}  // namespace micromorph
