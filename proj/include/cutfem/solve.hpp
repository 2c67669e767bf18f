#ifndef CUTFEM_SOLVE_HPP
#define CUTFEM_SOLVE_HPP

#include "cutfem/assembly.hpp"

#include <optional>
#include <string>

namespace cutfem {

struct SolveReport {
  Eigen::VectorXd solution;
  std::string method;
  int iterations = 0; ///< 0 for direct factorizations
  double residual = 0.0;
  double relative_residual = 0.0;
  std::optional<double> condition;
};

struct SolveOptions {
  double rtol = 1e-10;
  /// Systems at least this large use preconditioned conjugate gradients.
  int iterative_threshold = 20000;
};

/// SPD solve of the standard system. Throws on breakdown.
SolveReport solve_standard(const SparseMatrix& K, const Eigen::VectorXd& b, const SolveOptions& options = {});
SolveReport solve_standard(const SystemMatrices& m, const SolveOptions& options = {});

/// Nonsymmetric direct solve for the regularized system.
SolveReport solve_regularized(const SparseMatrix& K, const Eigen::VectorXd& b, const SolveOptions& options = {});
SolveReport solve_regularized(const SystemMatrices& m, const SolveOptions& options = {});

struct ConditionOptions {
  double rel_change = 1e-6;
  int max_iterations = 500;
};

struct ConditionEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int iterations = 0;
  double condition() const { return lambda_max / lambda_min; }
};

/// Extreme eigenvalues of a symmetric matrix by power iteration on K and K^{-1}.
ConditionEstimate condition_extremes(const SparseMatrix& K, const ConditionOptions& options = {});
double condition_estimate(const SparseMatrix& K, const ConditionOptions& options = {});
double condition_estimate(const SystemMatrices& m, const ConditionOptions& options = {});

} // namespace cutfem

#endif // CUTFEM_SOLVE_HPP
