#ifndef CUTFEM_GAUSS_HPP
#define CUTFEM_GAUSS_HPP

#include <functional>
#include <vector>

namespace cutfem {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [0,1], exact for polynomials of degree 2m-1.
/// Rules are computed once per m and cached.
const GaussRule1d& gauss_legendre(int m);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive bisection with an 8-point Gauss-Legendre rule, comparing each interval with
/// its two halves. Stops when the summed local error estimate is below
/// max(rel_tol * |value|, abs_tol).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol = 0.0, int max_depth = 48);

} // namespace cutfem

#endif // CUTFEM_GAUSS_HPP
