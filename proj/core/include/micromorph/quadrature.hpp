#pragma once

#include <vector>

#include "micromorph/geometry.hpp"

namespace micromorph {

/// A quadrature rule on a reference simplex (or segment), as points with weights.
/// Reference domains: segment [0,1]; triangle {x,y >= 0, x+y <= 1};
/// tetrahedron {x,y,z >= 0, x+y+z <= 1}. Weights sum to the reference measure.
struct QuadRule {
  std::vector<Vec3> points;   // z (and y) unused for lower-dimensional rules
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule on [0,1], exact for polynomials of degree 2n-1.
QuadRule gauss_segment(int n);

/// Conical-product rule on the reference triangle, exact for total degree 2n-1.
QuadRule conical_triangle(int n);

/// Conical-product rule on the reference tetrahedron, exact for total degree 2n-1.
QuadRule conical_tetrahedron(int n);

/// Rule of at least the requested total-degree exactness.
QuadRule tetrahedron_rule(int degree);
QuadRule triangle_rule(int degree);
QuadRule segment_rule(int degree);

/// Exact integral of x^a y^b z^c over the reference tetrahedron: a! b! c! / (a+b+c+3)!.
double reference_tet_monomial_integral(int a, int b, int c);

/// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double reference_tri_monomial_integral(int a, int b);

}  // namespace micromorph
