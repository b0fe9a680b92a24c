#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "micromorph/cases.hpp"
#include "micromorph/extension.hpp"
#include "micromorph/static_solver.hpp"

namespace micromorph {

//------------------------------------------------------------------------------
// Measured structural constants
//------------------------------------------------------------------------------

/// One named constant measured across mesh levels. All reported numbers are
/// surrogate measurements in discrete norms.
struct ConstantReport {
  std::string name;
  std::vector<int> levels;
  std::vector<double> values;

  /// (max - min) / min over the levels.
  double spread() const;
};

/// Smallest generalized eigenvalue of
///   (sym Gram + curl-curl) x = lambda (L2 Gram + curl-curl) x
/// over the constrained tensor space (boundary-edge dofs eliminated). The
/// discrete incompatible-Korn constant is 1/lambda_min. The forms carry no
/// material constants.
double korn_lambda_min(const Mesh& mesh);

/// Rayleigh quotient of the same pencil over the UNCONSTRAINED space at a
/// constant skew-symmetric tensor: sym P = 0 and Curl P = 0, so the quotient
/// vanishes, witnessing that the boundary condition is necessary.
double korn_skew_guard(const Mesh& mesh);

ConstantReport korn_constant(const std::vector<int>& levels);

/// Smallest generalized eigenvalue of the energy form against the Gram of
/// ||grad u||^2 + ||P||^2 + ||Curl P||^2 on the constrained space.
double coercivity_lambda_min(const MaterialParams& params, const Mesh& mesh);

ConstantReport coercivity_constant(const MaterialParams& params, const std::vector<int>& levels);

//------------------------------------------------------------------------------
// Manufactured-solution convergence
//------------------------------------------------------------------------------

/// L2 errors of a coupled discrete solution against closed-form fields.
double l2_error_u(const H1VectorSpace& vu, const Eigen::VectorXd& u, const VectorField& exact);
double l2_error_p(const HcurlSpace& vp, const std::array<Eigen::VectorXd, 3>& rows,
                  const MatrixField& exact);
double l2_error_curl_p(const HcurlSpace& vp, const std::array<Eigen::VectorXd, 3>& rows,
                       const MatrixField& exact_curl);

/// Finite-difference check that the case's loads match its fields: maximum
/// pointwise residual of the strong equations (and of the stated curls) over
/// an interior sample grid of the unit cube.
double manufactured_oracle_residual(const ManufacturedCase& c, const MaterialParams& params);

struct ConvergenceRow {
  int nx = 0;
  double h = 0.0;
  double err_u = 0.0;
  double err_p = 0.0;
  double err_curl_p = 0.0;
};

struct ConvergenceResult {
  std::string case_name;
  double oracle_residual = 0.0;
  std::vector<ConvergenceRow> rows;
  double order_u = 0.0;
  double order_p = 0.0;
  double order_curl_p = 0.0;
};

/// Solves the named case on unit-cube meshes at the given levels and fits
/// L2 convergence orders. Refuses (throws) when the finite-difference oracle
/// rejects the case's loads.
ConvergenceResult manufactured_convergence(const std::string& case_name,
                                           const MaterialParams& params,
                                           const std::vector<int>& levels,
                                           LiftingPath lifting = LiftingPath::direct,
                                           const SolveOptions& opts = {});

//------------------------------------------------------------------------------
// Extension-operator property suite
//------------------------------------------------------------------------------

struct ExtensionSuiteRow {
  std::string member;
  int nx = 0;
  bool smooth = false;
  ExtensionReport report;
};

struct ExtensionSuiteResult {
  std::vector<int> levels;
  std::vector<ExtensionSuiteRow> rows;
  std::vector<int> harmonic_dims;     // per level
  ConstantReport c1_star;             // max over smooth members, per level
  ConstantReport c1;

  const ExtensionSuiteRow& row(const std::string& member, int nx) const;
};

/// Runs the constructive pipeline over an ensemble of boundary data (traces
/// of smooth fields, the zero datum, and seeded random edge moments) on
/// unit-cube meshes at the given levels.
ExtensionSuiteResult extension_property_suite(const std::vector<int>& levels, std::uint64_t seed,
                                              int n_random = 2);

}  // namespace micromorph
