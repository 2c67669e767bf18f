#include "cutfem/gauss.hpp"

#include "cutfem/types.hpp"

#include <cmath>
#include <queue>

namespace cutfem {

namespace {

constexpr int max_gauss_points = 64;

GaussRule1d compute_gauss_legendre(int m) {
  GaussRule1d rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    // Newton on P_m starting from the Chebyshev-like guess.
    double x = std::cos(pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pm = (m == 1) ? x : p1;
      const double pm1 = (m == 1) ? 1.0 : p0;
      dp = m * (x * pm - pm1) / (x * x - 1.0);
      const double dx = pm / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pm = (m == 1) ? x : p1;
    const double pm1 = (m == 1) ? 1.0 : p0;
    dp = m * (x * pm - pm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[m - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[m - 1 - i] = 0.5 * w;
  }
  return rule;
}

struct Interval {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Interval& other) const { return error < other.error; }
};

double gauss_on(const std::function<double(double)>& f, double a, double b) {
  const GaussRule1d& g = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(a + (b - a) * g.nodes[i]);
  return s * (b - a);
}

Interval make_interval(const std::function<double(double)>& f, double a, double b, int depth) {
  const double m = 0.5 * (a + b);
  const double whole = gauss_on(f, a, b);
  const double halves = gauss_on(f, a, m) + gauss_on(f, m, b);
  return {a, b, halves, std::abs(halves - whole), depth};
}

} // namespace

const GaussRule1d& gauss_legendre(int m) {
  static const std::vector<GaussRule1d> table = [] {
    std::vector<GaussRule1d> t(max_gauss_points + 1);
    for (int k = 1; k <= max_gauss_points; ++k) t[k] = compute_gauss_legendre(k);
    return t;
  }();
  if (m < 1 || m > max_gauss_points) throw Error("gauss_legendre: unsupported point count " + std::to_string(m));
  return table[m];
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int max_depth) {
  AdaptiveResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<Interval> active;
  active.push(make_interval(f, a, b, 0));
  double value = active.top().value;
  double error = active.top().error;
  double frozen_error = 0.0;
  for (int iteration = 0; iteration < 200000; ++iteration) {
    result.value = value;
    result.error = error + frozen_error;
    if (result.error <= std::max(rel_tol * std::abs(value), abs_tol)) {
      result.converged = true;
      return result;
    }
    if (active.empty()) return result;
    const Interval worst = active.top();
    active.pop();
    if (worst.depth >= max_depth) {
      error -= worst.error;
      frozen_error += worst.error;
      continue;
    }
    const double m = 0.5 * (worst.a + worst.b);
    const Interval left = make_interval(f, worst.a, m, worst.depth + 1);
    const Interval right = make_interval(f, m, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }
  return result;
}

} // namespace cutfem
