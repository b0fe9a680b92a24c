#pragma once

#include <array>
#include <optional>

#include "micromorph/assembly.hpp"
#include "micromorph/extension.hpp"
#include "micromorph/solvers.hpp"

namespace micromorph {

enum class LiftingPath { direct, constructive };

/// Non-homogeneous boundary data for a static solve: Dirichlet samples for u
/// and tangential edge moments for the three rows of P.
struct LiftedBoundaryData {
  VectorField dirichlet;
  std::array<TangentialTraceData, 3> tangential;
};

struct StaticSolution {
  Eigen::VectorXd u;                       // H1 coefficients
  std::array<Eigen::VectorXd, 3> p_rows;   // Nedelec coefficients per row
  Eigen::VectorXd coupled;                 // packed (u, P)

  double energy = 0.0;         // potential energy I(grad u, P)
  double residual = 0.0;       // relative free-dof residual
  int iterations = 0;
  bool used_direct_solver = false;

  double bc_dirichlet_error = 0.0;   // max boundary-node mismatch against g
  double bc_tangential_error = 0.0;  // max boundary-moment mismatch against G
};

/// Homogeneous problem: find (u, P) in the discrete H^1_0 x H_0(Curl) space
/// with a((u,P),(v,Q)) = (F,v) + (M,Q). CG with Jacobi preconditioning,
/// dense LDLT below 3000 free dofs. Relative residual contract 1e-10.
StaticSolution solve_static_homogeneous(const MaterialParams& params, const H1VectorSpace& vu,
                                        const HcurlSpace& vp, const VectorField& f,
                                        const MatrixField& m, const SolveOptions& opts = {});

/// Lifted problem: u = u0 + g_tilde, P = P0 + G_tilde with (u0, P0) the
/// homogeneous solution under the weakly assembled modified loads.
StaticSolution solve_static(const MaterialParams& params, const H1VectorSpace& vu,
                            const HcurlSpace& vp, const VectorField& f, const MatrixField& m,
                            const LiftedBoundaryData& boundary,
                            LiftingPath lifting = LiftingPath::direct,
                            const SolveOptions& opts = {});

/// Classical linear elasticity with Dirichlet lifting (baseline mode).
struct ElasticSolution {
  Eigen::VectorXd u;
  double residual = 0.0;
  int iterations = 0;
};

ElasticSolution solve_elastic_static(double mu_e, double lambda_e, const H1VectorSpace& vu,
                                     const VectorField& f, const VectorField& g,
                                     const SolveOptions& opts = {});

}  // namespace micromorph
