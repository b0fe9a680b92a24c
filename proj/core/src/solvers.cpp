#include "micromorph/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace micromorph {

SolveReport conjugate_gradient(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& matvec,
    const Eigen::VectorXd& diag, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
    const SolveOptions& opts, const std::function<void(Eigen::VectorXd&)>& project) {
  const int n = static_cast<int>(rhs.size());
  SolveReport report;

  Eigen::VectorXd inv_diag(n);
  for (int i = 0; i < n; ++i) inv_diag[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;

  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  if (project) project(x);

  Eigen::VectorXd ax(n);
  ax.setZero();
  matvec(x, ax);
  Eigen::VectorXd r = rhs - ax;
  if (project) project(r);

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    x.setZero();
    report.rel_residual = 0.0;
    return report;
  }

  Eigen::VectorXd z = inv_diag.asDiagonal() * r;
  if (project) project(z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd ap(n);

  for (int it = 0; it < opts.max_iterations; ++it) {
    report.iterations = it;
    report.rel_residual = r.norm() / rhs_norm;
    if (report.rel_residual < opts.rtol) return report;

    ap.setZero();
    matvec(p, ap);
    if (project) project(ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // lost positive definiteness numerically
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    z = inv_diag.asDiagonal() * r;
    if (project) project(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }

  report.rel_residual = r.norm() / rhs_norm;
  report.converged = report.rel_residual < opts.rtol;
  return report;
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                          const SolveOptions& opts, SolveReport* report,
                          const Eigen::VectorXd* initial_guess) {
  const int n = a.rows();
  if (n != rhs.size()) throw std::invalid_argument("solve_spd: size mismatch");

  if (n <= opts.direct_threshold) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a.to_dense());
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("solve_spd: LDLT failed");
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (report) {
      report->used_direct = true;
      report->iterations = 0;
      const double rn = rhs.norm();
      report->rel_residual = rn > 0.0 ? (rhs - a.apply(x)).norm() / rn : 0.0;
      report->converged = true;
    }
    return x;
  }

  Eigen::VectorXd x =
      initial_guess ? *initial_guess : Eigen::VectorXd::Zero(n);
  auto matvec = [&a](const Eigen::VectorXd& v, Eigen::VectorXd& out) { a.apply_add(v, out); };
  SolveReport rep = conjugate_gradient(matvec, a.diagonal(), rhs, x, opts);
  if (!rep.converged)
    throw std::runtime_error("solve_spd: CG did not converge, relative residual " +
                             std::to_string(rep.rel_residual));
  if (report) *report = rep;
  return x;
}

SpdOperator::SpdOperator(SparseMatrix a, const SolveOptions& opts) : a_(std::move(a)), opts_(opts) {
  direct_ = a_.rows() <= opts_.direct_threshold;
  if (direct_) {
    ldlt_.compute(a_.to_dense());
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("SpdOperator: LDLT failed");
  } else {
    diag_ = a_.diagonal();
  }
}

Eigen::VectorXd SpdOperator::solve(const Eigen::VectorXd& rhs, SolveReport* report) const {
  if (direct_) {
    Eigen::VectorXd x = ldlt_.solve(rhs);
    if (report) {
      report->used_direct = true;
      const double rn = rhs.norm();
      report->rel_residual = rn > 0.0 ? (rhs - a_.apply(x)).norm() / rn : 0.0;
      report->converged = true;
    }
    return x;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a_.rows());
  auto matvec = [this](const Eigen::VectorXd& v, Eigen::VectorXd& out) { a_.apply_add(v, out); };
  SolveReport rep = conjugate_gradient(matvec, diag_, rhs, x, opts_);
  if (!rep.converged)
    throw std::runtime_error("SpdOperator: CG did not converge, relative residual " +
                             std::to_string(rep.rel_residual));
  if (report) *report = rep;
  return x;
}

std::vector<EigenPair> smallest_generalized_eigenpairs(const SparseMatrix& a,
                                                       const SparseMatrix& b, int count,
                                                       int dense_threshold, int max_outer,
                                                       double tol, const SolveOptions& inner) {
  const int n = a.rows();
  if (n != b.rows()) throw std::invalid_argument("eigensolver: size mismatch");
  count = std::min(count, n);

  if (n <= dense_threshold) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(), b.to_dense());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver: dense solve failed");
    std::vector<EigenPair> out;
    for (int i = 0; i < count; ++i) out.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
    return out;
  }

  // Block inverse iteration on A^{-1} B with B-orthonormalization.
  SpdOperator ainv(a, inner);
  std::vector<Eigen::VectorXd> block(count);
  for (int j = 0; j < count; ++j) {
    block[j] = Eigen::VectorXd::Zero(n);
    for (int i = j; i < n; i += count) block[j][i] = 1.0 + 0.01 * ((i * 2654435761u) % 97);
  }

  auto b_orthonormalize = [&](std::vector<Eigen::VectorXd>& v) {
    for (int j = 0; j < count; ++j) {
      for (int k = 0; k < j; ++k) {
        const double c = v[k].dot(b.apply(v[j]));
        v[j] -= c * v[k];
      }
      const double norm = std::sqrt(v[j].dot(b.apply(v[j])));
      if (norm > 0.0) v[j] /= norm;
    }
  };

  b_orthonormalize(block);
  std::vector<double> values(count, 0.0);
  for (int iter = 0; iter < max_outer; ++iter) {
    std::vector<double> prev = values;
    for (int j = 0; j < count; ++j) block[j] = ainv.solve(b.apply(block[j]));
    b_orthonormalize(block);
    double change = 0.0;
    for (int j = 0; j < count; ++j) {
      values[j] = block[j].dot(a.apply(block[j]));
      change = std::max(change, std::abs(values[j] - prev[j]) / std::max(1.0, std::abs(values[j])));
    }
    if (iter > 2 && change < tol) break;
  }

  std::vector<EigenPair> out;
  for (int j = 0; j < count; ++j) out.push_back({values[j], block[j]});
  std::sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) {
    return x.value < y.value;
  });
  return out;
}

}  // namespace micromorph
