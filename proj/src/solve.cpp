#include "cutfem/solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace cutfem {

namespace {

void check_shape(const SparseMatrix& K, const Eigen::VectorXd& b) {
  if (K.rows() != K.cols() || K.rows() != b.size()) throw Error("solve: dimension mismatch");
}

void finish(SolveReport& r, const SparseMatrix& K, const Eigen::VectorXd& b, const SolveOptions& options) {
  r.residual = (K * r.solution - b).norm();
  const double bn = b.norm();
  r.relative_residual = bn > 0.0 ? r.residual / bn : r.residual;
  if (!(r.relative_residual <= options.rtol) && !(bn == 0.0 && r.residual == 0.0)) {
    std::ostringstream msg;
    msg << "solve: relative residual " << r.relative_residual << " above " << options.rtol << " (" << r.method
        << ")";
    throw Error(msg.str());
  }
}

const char* breakdown_hint = "; the system is not positive definite, increase beta";

} // namespace

SolveReport solve_standard(const SparseMatrix& K, const Eigen::VectorXd& b, const SolveOptions& options) {
  check_shape(K, b);
  SolveReport r;
  if (b.size() == 0 || b.isZero(0.0)) {
    r.method = "trivial";
    r.solution = Eigen::VectorXd::Zero(b.size());
    return r;
  }
  if (K.rows() < options.iterative_threshold) {
    r.method = "simplicial-ldlt";
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw Error(std::string("solve_standard: factorization failed") + breakdown_hint);
    if (!(ldlt.vectorD().minCoeff() > 0.0))
      throw Error(std::string("solve_standard: non-positive pivot") + breakdown_hint);
    r.solution = ldlt.solve(b);
  } else {
    r.method = "pcg-jacobi";
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(0.1 * options.rtol);
    cg.setMaxIterations(10 * static_cast<int>(K.rows()));
    cg.compute(K);
    r.solution = cg.solve(b);
    r.iterations = static_cast<int>(cg.iterations());
    if (cg.info() != Eigen::Success) throw Error(std::string("solve_standard: CG breakdown") + breakdown_hint);
  }
  finish(r, K, b, options);
  return r;
}

SolveReport solve_standard(const SystemMatrices& m, const SolveOptions& options) {
  if (!m.symmetric) throw Error("solve_standard: system is not symmetric, use solve_regularized");
  return solve_standard(m.system(), m.b, options);
}

SolveReport solve_regularized(const SparseMatrix& K, const Eigen::VectorXd& b, const SolveOptions& options) {
  check_shape(K, b);
  SolveReport r;
  r.method = "sparse-lu";
  if (b.size() == 0 || b.isZero(0.0)) {
    r.solution = Eigen::VectorXd::Zero(b.size());
    return r;
  }
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) throw Error("solve_regularized: singular system (" + lu.lastErrorMessage() + ")");
  r.solution = lu.solve(b);
  finish(r, K, b, options);
  return r;
}

SolveReport solve_regularized(const SystemMatrices& m, const SolveOptions& options) {
  return solve_regularized(m.system(), m.b, options);
}

namespace {

// Power iteration on a symmetric operator; returns the dominant Rayleigh quotient.
template <class Apply>
double power_iteration(Apply&& apply, Eigen::Index n, const ConditionOptions& options, int& iterations,
                       const char* what) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + 3.7 * static_cast<double>(i));
  x.normalize();
  double lambda = 0.0;
  for (int k = 1; k <= options.max_iterations; ++k) {
    const Eigen::VectorXd y = apply(x);
    const double next = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) throw Error(std::string("condition_estimate: zero iterate in ") + what);
    x = y / ny;
    if (k > 1 && std::abs(next - lambda) <= options.rel_change * std::abs(next)) {
      iterations += k;
      return next;
    }
    lambda = next;
  }
  std::ostringstream msg;
  msg << "condition_estimate: " << what << " did not converge in " << options.max_iterations
      << " iterations, partial estimate " << lambda;
  throw Error(msg.str());
}

} // namespace

ConditionEstimate condition_extremes(const SparseMatrix& K, const ConditionOptions& options) {
  if (K.rows() != K.cols() || K.rows() == 0) throw Error("condition_estimate: need a non-empty square matrix");
  ConditionEstimate est;
  est.lambda_max = std::abs(power_iteration([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(K * x); },
                                            K.rows(), options, est.iterations, "power iteration"));
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw Error("condition_estimate: matrix is singular");
  const double inv = std::abs(power_iteration([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(ldlt.solve(x)); },
                                              K.rows(), options, est.iterations, "inverse iteration"));
  est.lambda_min = 1.0 / inv;
  return est;
}

double condition_estimate(const SparseMatrix& K, const ConditionOptions& options) {
  return condition_extremes(K, options).condition();
}

double condition_estimate(const SystemMatrices& m, const ConditionOptions& options) {
  if (!m.symmetric) throw Error("condition_estimate: system is not symmetric");
  return condition_estimate(m.system(), options);
}

} // namespace cutfem
