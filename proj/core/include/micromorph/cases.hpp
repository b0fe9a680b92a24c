#pragma once

#include <string>
#include <vector>

#include "micromorph/assembly.hpp"
#include "micromorph/dynamic_solver.hpp"

namespace micromorph {

/// Closed-form solution of the static system with the loads that it induces.
/// The load fields depend on the material parameters.
struct ManufacturedCase {
  std::string name;
  VectorField u_star;
  MatrixField grad_u_star;    // rows are gradients of the components
  MatrixField p_star;
  MatrixField curl_p_star;    // rows are curls of the rows of P
  std::function<VectorField(const MaterialParams&)> force;
  std::function<MatrixField(const MaterialParams&)> moment;
  bool trivially_exact = false;  // contained in the discrete spaces
};

/// Named static cases: "zero", "affine", "poly3".
ManufacturedCase manufactured_case(const std::string& name);
std::vector<std::string> manufactured_case_names();

/// Named time-dependent boundary-condition cases for the dynamic solver:
/// "zero" and "harmonic-bc" (g = sin(omega t) ghat with the coupling data
/// G_i = (grad g)_i x n).
BoundaryConditions dynamic_case(const std::string& name, double omega);
std::vector<std::string> dynamic_case_names();

/// Tangential boundary data of a manufactured case: edge moments of the rows
/// of P* over the boundary edges.
std::array<TangentialTraceData, 3> case_tangential_data(const ManufacturedCase& c,
                                                        const Mesh& mesh);

}  // namespace micromorph
