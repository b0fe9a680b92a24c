#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "micromorph/sparse.hpp"

namespace micromorph {

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  bool used_direct = false;
  bool converged = true;
};

struct SolveOptions {
  double rtol = 1e-12;
  int max_iterations = 50000;
  /// Dense LDLT below this size, preconditioned CG above.
  int direct_threshold = 3000;
};

/// Jacobi-preconditioned conjugate gradients on a matrix given as a matvec.
/// `diag` supplies the preconditioner; an optional projector is applied to
/// iterates (used for kernel deflation). Deterministic for fixed inputs.
SolveReport conjugate_gradient(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& matvec,
                               const Eigen::VectorXd& diag, const Eigen::VectorXd& rhs,
                               Eigen::VectorXd& x, const SolveOptions& opts,
                               const std::function<void(Eigen::VectorXd&)>& project = nullptr);

/// Solve an SPD system: dense LDLT at small size, CG(Jacobi) otherwise.
/// Throws std::runtime_error on non-convergence.
Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                          const SolveOptions& opts = {}, SolveReport* report = nullptr,
                          const Eigen::VectorXd* initial_guess = nullptr);

/// Factorized SPD operator reused across many right-hand sides (time stepping,
/// lifting). Dense LDLT when small, otherwise CG per application.
class SpdOperator {
 public:
  SpdOperator(SparseMatrix a, const SolveOptions& opts = {});

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveReport* report = nullptr) const;
  const SparseMatrix& matrix() const { return a_; }
  int size() const { return a_.rows(); }

 private:
  SparseMatrix a_;
  SolveOptions opts_;
  bool direct_ = false;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd diag_;
};

struct EigenPair {
  double value;
  Eigen::VectorXd vector;
};

/// Smallest eigenpairs of the generalized symmetric problem A x = lambda B x,
/// with A, B symmetric and B positive definite. Dense solve below the
/// threshold, B-orthogonal inverse iteration above (with inner solves of A).
std::vector<EigenPair> smallest_generalized_eigenpairs(const SparseMatrix& a,
                                                       const SparseMatrix& b, int count,
                                                       int dense_threshold = 3000,
                                                       int max_outer = 60, double tol = 1e-10,
                                                       const SolveOptions& inner = {});

}  // namespace micromorph
