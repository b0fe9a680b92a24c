#pragma once

#include <Eigen/Dense>

namespace micromorph {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 sym(const Mat3& x) { return 0.5 * (x + x.transpose()); }
inline Mat3 skew(const Mat3& x) { return 0.5 * (x - x.transpose()); }

/// Frobenius inner product tr(X Y^T).
inline double ddot(const Mat3& x, const Mat3& y) { return (x.array() * y.array()).sum(); }

inline double frob2(const Mat3& x) { return ddot(x, x); }

/// Signed volume of the tetrahedron (a,b,c,d).
inline double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Mat3 m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  return m.determinant() / 6.0;
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace micromorph
