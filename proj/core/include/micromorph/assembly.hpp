#pragma once

#include <string>
#include <vector>

#include "micromorph/sparse.hpp"
#include "micromorph/spaces.hpp"

namespace micromorph {

/// Constitutive constants of the relaxed micromorphic model.
struct MaterialParams {
  double mu_e = 1.0;
  double lambda_e = 0.0;
  double mu_c = 0.0;
  double mu_micro = 1.0;
  double lambda_micro = 0.0;
  double mu_macro = 1.0;
  double l_c = 1.0;

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Names of the violated admissibility inequalities; empty means valid.
/// The checks are: mu_e > 0, 2*mu_e + 3*lambda_e > 0, mu_c >= 0, mu_micro > 0,
/// 2*mu_micro + 3*lambda_micro > 0, mu_macro > 0, L_c > 0.
std::vector<std::string> validate_params(const MaterialParams& p);

inline bool params_valid(const MaterialParams& p) { return validate_params(p).empty(); }

/// Dof layout of the coupled unknown (u, P): u dofs first, then the three
/// Nedelec rows of P.
struct BlockLayout {
  int n_u = 0;
  int n_p = 0;

  int total() const { return n_u + 3 * n_p; }
  int u_dof(int d) const { return d; }
  int p_dof(int row, int edge) const { return n_u + row * n_p + edge; }
};

BlockLayout block_layout(const H1VectorSpace& vu, const HcurlSpace& vp);

/// Constrained (boundary) dofs of the coupled system in increasing order:
/// u dofs at boundary nodes and boundary-edge dofs of every P row.
std::vector<int> constrained_dofs(const H1VectorSpace& vu, const HcurlSpace& vp);
std::vector<int> complement(int n, const std::vector<int>& subset);

//------------------------------------------------------------------------------
// Bilinear forms
//------------------------------------------------------------------------------

/// Galerkin matrix of the full micromorphic bilinear form
///   2 mu_e <sym(Du-P), sym(Dv-Q)> + 2 mu_c <skew(Du-P), skew(Dv-Q)>
///   + lambda_e tr(Du-P) tr(Dv-Q) + 2 mu_micro <sym P, sym Q>
///   + lambda_micro tr P tr Q + mu_macro L_c^2 <Curl P, Curl Q>.
/// Throws std::invalid_argument when the parameters are inadmissible.
SparseMatrix assemble_micromorphic(const MaterialParams& p, const H1VectorSpace& vu,
                                   const HcurlSpace& vp);

/// Block-diagonal L2 Gram matrix of (u, P) (unit density).
SparseMatrix assemble_mass(const H1VectorSpace& vu, const HcurlSpace& vp);

/// Linear elasticity form 2 mu_e <sym Du, sym Dv> + lambda_e tr(Du) tr(Dv).
SparseMatrix assemble_elasticity(double mu_e, double lambda_e, const H1VectorSpace& vu);

// Scalar building blocks.
SparseMatrix assemble_scalar_stiffness(const H1ScalarSpace& space);
SparseMatrix assemble_scalar_mass(const H1ScalarSpace& space);
/// Vector of int_Omega psi_i dx (volume moments of the scalar basis).
Eigen::VectorXd assemble_scalar_volume_moments(const H1ScalarSpace& space);

// H(curl) building blocks.
SparseMatrix assemble_hcurl_mass(const HcurlSpace& space);
SparseMatrix assemble_hcurl_curlcurl(const HcurlSpace& space);
/// Mixed matrix B[q, e] = int grad(psi_q) . phi_e dx (scalar space x edge space).
SparseMatrix assemble_gradient_pairing(const H1ScalarSpace& scalar, const HcurlSpace& vp);

/// Gram of <curl ., curl .> + <div ., div .> on a vector Lagrange space.
SparseMatrix assemble_curlcurl_divdiv(const H1VectorSpace& space);
/// Vector Lagrange L2 mass.
SparseMatrix assemble_h1_vector_mass(const H1VectorSpace& space);
/// Gram of <grad ., grad .> (component-wise) on a vector Lagrange space.
SparseMatrix assemble_h1_vector_stiffness(const H1VectorSpace& space);

// Second-order edge space.
SparseMatrix assemble_hcurl2_mass(const Hcurl2Space& space);
SparseMatrix assemble_hcurl2_curlcurl(const Hcurl2Space& space);
/// Expansion of the gradients of the scalar P2 basis in the Hcurl2 basis:
/// grad(psi_q) = sum_J D[J, q] Phi_J, with integer-valued entries.
SparseMatrix hcurl2_gradient_map(const H1ScalarSpace& p2, const Hcurl2Space& space);

//------------------------------------------------------------------------------
// Load functionals
//------------------------------------------------------------------------------

/// Body force F against u tests plus body moment M against P tests.
Eigen::VectorXd assemble_loads(const VectorField& f, const MatrixField& m,
                               const H1VectorSpace& vu, const HcurlSpace& vp);

/// Volume load on a vector Lagrange space from an arbitrary integrand
/// evaluated per (cell, reference point, physical point).
using CellVectorField = std::function<Vec3(int cell, const Vec3& ref, const Vec3& x)>;
Eigen::VectorXd assemble_h1_load(const H1VectorSpace& space, const CellVectorField& f);

/// Volume load against the edge basis.
Eigen::VectorXd assemble_hcurl_load(const HcurlSpace& space, const CellVectorField& f);
Eigen::VectorXd assemble_hcurl2_load(const Hcurl2Space& space, const CellVectorField& f);

/// Weak realization of the lifted loads: b(F, M) - K x_lift - Mass x_lift_tt,
/// i.e. the Div(...) and Curl Curl terms of the shifted problem are applied by
/// integration by parts; no strong derivative of the discrete lift is formed.
/// Pass a zero x_lift_tt in statics.
Eigen::VectorXd assemble_modified_loads(const Eigen::VectorXd& loads, const SparseMatrix& k,
                                        const SparseMatrix& mass, const Eigen::VectorXd& x_lift,
                                        const Eigen::VectorXd& x_lift_tt);

/// Pack (u coefficients, three P rows) into a coupled block vector.
Eigen::VectorXd pack_state(const BlockLayout& layout, const Eigen::VectorXd& u,
                           const std::array<Eigen::VectorXd, 3>& p_rows);

/// Assembled coupled system: stiffness, mass, load, and the constrained dofs
/// (homogeneous after lifting). The stiffness restricted to the free dofs is
/// positive definite for admissible parameters.
struct BlockSystem {
  BlockLayout layout;
  SparseMatrix stiffness;
  SparseMatrix mass;
  Eigen::VectorXd load;
  std::vector<int> constrained;
};

BlockSystem build_block_system(const MaterialParams& p, const H1VectorSpace& vu,
                               const HcurlSpace& vp, const VectorField& f, const MatrixField& m);

}  // namespace micromorph
