#pragma once

#include <array>
#include <memory>

#include "micromorph/assembly.hpp"
#include "micromorph/solvers.hpp"
#include "micromorph/spaces.hpp"

namespace micromorph {

//------------------------------------------------------------------------------
// Dirichlet lifting
//------------------------------------------------------------------------------

/// Time-parameterized Dirichlet data with analytic time derivatives. The
/// derivative slots may be empty for static data.
struct DirichletData {
  std::function<Vec3(const Vec3&, double)> g;
  std::function<Vec3(const Vec3&, double)> g_t;
  std::function<Vec3(const Vec3&, double)> g_tt;

  bool empty() const { return !g; }
};

/// Diagnostic: maximum mismatch over the boundary nodes between the supplied
/// analytic time derivatives and central differences of the samples
/// (O(dt^2) for consistent data).
double dirichlet_derivative_consistency(const DirichletData& data, const H1VectorSpace& vu,
                                        double t, double dt);

/// Discrete-harmonic Dirichlet extension: boundary nodes carry the samples,
/// interior nodes solve a component-wise Laplace problem. The interior
/// factorization is cached so repeated lifts (time stepping) are cheap.
class DirichletLifter {
 public:
  explicit DirichletLifter(const H1VectorSpace& vu, const SolveOptions& opts = {});

  /// Lift boundary samples given as a function of position.
  Eigen::VectorXd lift(const VectorField& g) const;
  /// Lift explicit per-boundary-node samples (indexed like scalar boundary_nodes).
  Eigen::VectorXd lift_samples(const std::vector<Vec3>& boundary_values) const;

  const H1VectorSpace& space() const { return *vu_; }

 private:
  const H1VectorSpace* vu_;
  std::vector<int> interior_nodes_;
  SparseMatrix k_scalar_;
  std::unique_ptr<SpdOperator> interior_op_;
};

Eigen::VectorXd lift_dirichlet(const H1VectorSpace& vu, const VectorField& g);

//------------------------------------------------------------------------------
// Tangential data and the constructive extension pipeline
//------------------------------------------------------------------------------

/// Functional values of the discrete tangential divergence of G on the scalar
/// trace space: out[i] = -int_bnd <G_rep x n, grad_tau psi_i> ds, where G_rep
/// is the facewise Whitney reconstruction of the edge moments. Entries vanish
/// for interior basis functions.
Eigen::VectorXd tangential_div_boundary(const TangentialTraceData& g, const H1ScalarSpace& space);

/// Facewise L2 norm of div_tau(G_rep x n) (the absolutely continuous part of
/// the surface divergence; a boundary-L2 surrogate of the H^{-1/2} norm).
double tangential_div_l2(const TangentialTraceData& g);

/// Boundary pairing [G, phi] = int_bnd <G_rep x n, phi_t> ds against the
/// tangential traces of the second-order edge space.
Eigen::VectorXd boundary_pairing(const TangentialTraceData& g, const Hcurl2Space& vp);

struct NeumannScalarSolution {
  Eigen::VectorXd w;       // scalar coefficients
  double mean = 0.0;       // int w dx (should vanish)
  double residual = 0.0;   // relative residual of the constrained solve
  double h1_norm = 0.0;
  double grad_l2 = 0.0;
};

struct HarmonicBasis {
  /// L2-orthonormal coefficient vectors in the second-order edge space.
  std::vector<Eigen::VectorXd> fields;
  std::vector<double> eigenvalues;
  double threshold = 0.0;

  int dimension() const { return static_cast<int>(fields.size()); }
};

struct AuxiliaryField {
  /// Second-order edge-space coefficients of r, so curl r is piecewise
  /// linear. The space H(curl) cap H_0(div) is realized through a weak
  /// divergence against scalar P2 test functions; the normal trace and the
  /// divergence of r vanish weakly (to solver tolerance) by construction of
  /// the gradient-corrected right-hand side.
  Eigen::VectorXd r;
  double curl_l2 = 0.0;             // ||curl r||_L2
  double div_l2 = 0.0;              // weak-divergence norm of r
  double residual = 0.0;            // solver relative residual
  Eigen::VectorXd harmonic_coeffs;  // <r, lambda_i>_L2 after deflation
};

struct ExtensionReport {
  double trace_error = 0.0;        // ||gamma(R) - G|| in the boundary-L2 surrogate
  double trace_norm = 0.0;         // ||G|| in the same norm
  double curlcurl_residual = 0.0;  // sup <curl R, curl phi> over unit discrete H_0(curl)
  double div_residual = 0.0;       // sup <R, grad q> over unit discrete H^1_0 scalars
  double c1_star = 0.0;            // ||w||_H1 / ||div_tau G||_L2 surrogate for (2.19)-type bound
  double c1 = 0.0;                 // ||curl r|| / (||grad w|| + ||G||_L2) surrogate
  int harmonic_dimension = 0;
};

struct ConstructiveExtension {
  Eigen::VectorXd coeffs;  // Nedelec coefficients of R = curl r
  ExtensionReport report;
};

/// The three-step constructive extension on one mesh, with shared
/// factorizations: (1) scalar Neumann problem for w, (2) Neumann harmonic
/// fields, (3) auxiliary curl/div problem for r; the extension is the
/// lowest-order edge interpolant of the piecewise-linear field curl r.
///
/// Step (3) is posed on the second-order edge space with a weak divergence:
/// the rhs is first made gradient-free through a scalar potential solve with
/// the same Neumann operator as step (1), which forces the weak divergence
/// (and weak normal trace) of r to vanish, mirroring div r(v) = 0 of the
/// continuous construction.
class ExtensionPipeline {
 public:
  explicit ExtensionPipeline(const Mesh& mesh, const SolveOptions& opts = {});

  NeumannScalarSolution solve_neumann(const TangentialTraceData& g) const;
  AuxiliaryField solve_auxiliary(const TangentialTraceData& g, const NeumannScalarSolution& w) const;
  ConstructiveExtension extend(const TangentialTraceData& g) const;

  const HarmonicBasis& harmonic() const { return basis_; }
  const H1ScalarSpace& neumann_space() const { return s2_; }
  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  SolveOptions opts_;
  HcurlSpace vp_;      // lowest-order space of the extension R
  Hcurl2Space n2_;     // second-order space of the auxiliary field r
  H1ScalarSpace s2_;   // P2 scalars (Neumann problem, gradient correction, duals)

  SparseMatrix ks2_;            // P2 scalar stiffness
  Eigen::VectorXd s2_moments_;  // volume moments (mean constraint)
  SparseMatrix ms2_;            // P2 scalar mass
  std::unique_ptr<Eigen::LDLT<Eigen::MatrixXd>> neumann_dense_;

  SparseMatrix a2_;              // curl-curl on the second-order edge space
  SparseMatrix m2_;              // mass on the second-order edge space
  SparseMatrix dmap_;            // gradients of P2 scalars in the edge basis
  Eigen::VectorXd p2_mass_diag_;
  Eigen::VectorXd aug_diag_;     // diagonal of the augmented operator
  std::unique_ptr<Eigen::LDLT<Eigen::MatrixXd>> aux_dense_;

  SparseMatrix acc_;             // lowest-order curl-curl (metrics)
  SparseMatrix mned_;            // lowest-order mass
  SparseMatrix grad_pairing_;    // B[q, e] = int grad(psi_q) . phi_e, P2 x N1
  std::unique_ptr<SpdOperator> hcurl0_gram_;  // (acc+mned) on interior edges
  std::unique_ptr<SpdOperator> scalar_interior_stiffness_;
  std::vector<int> interior_edges_;
  std::vector<int> interior_scalar_nodes_;

  HarmonicBasis basis_;

  void aug_apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd aug_solve(const Eigen::VectorXd& rhs, SolveReport* report) const;
  Eigen::VectorXd neumann_apply_inverse(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd interpolate_curl(const Eigen::VectorXd& r_coeffs) const;
};

/// Neumann harmonic fields of the mesh (eigenvectors of curlcurl+divdiv on the
/// W space below 1e-8 x scale). Empty on simply connected domains.
HarmonicBasis harmonic_basis(const Mesh& mesh);

/// One-shot constructive extension (builds a pipeline internally).
ConstructiveExtension constructive_extension(const TangentialTraceData& g, const Mesh& mesh);

//------------------------------------------------------------------------------
// Direct (discrete-harmonic) tangential lifting
//------------------------------------------------------------------------------

/// Minimizes ||Curl v||^2 + ||v||^2 over interior edge dofs with the boundary
/// dofs fixed to G; the discrete trace is matched exactly.
class TangentialLifter {
 public:
  explicit TangentialLifter(const HcurlSpace& vp, const SolveOptions& opts = {});

  Eigen::VectorXd lift(const TangentialTraceData& g) const;

 private:
  const HcurlSpace* vp_;
  SparseMatrix a_;  // curlcurl + mass
  std::vector<int> interior_;
  std::unique_ptr<SpdOperator> interior_op_;
};

Eigen::VectorXd direct_lifting(const TangentialTraceData& g, const HcurlSpace& vp);

//------------------------------------------------------------------------------
// Coupling data G_i = (grad g)_i x n
//------------------------------------------------------------------------------

/// Tangential data induced by the gradient of Dirichlet data: the edge moment
/// of (grad g)_i along a boundary edge is the difference of the endpoint
/// values of g_i, so the data is exact given g alone.
std::array<TangentialTraceData, 3> coupling_trace(const VectorField& g, const Mesh& mesh);

}  // namespace micromorph
