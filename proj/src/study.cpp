#include "cutfem/study.hpp"

#include "cutfem/gauss.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace cutfem {

// ---------------------------------------------------------------------------
// Manufactured problems

ScalarField ManufacturedProblem::g_N() const {
  const Point c = domain.center();
  const VectorField g = grad_u;
  return [c, g](const Point& x) {
    const Vector2 d = x - c;
    return g(x).dot(d / d.norm());
  };
}

void ManufacturedProblem::validate(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double R = domain.radius();
  const double exclusion = 0.05 * R;
  auto far_from_singularities = [&](const Point& x) {
    for (const auto& z : singular_points)
      if ((x - z).norm() < exclusion) return false;
    return true;
  };
  const double step = 1e-4 * R;
  int checked = 0;
  for (int attempt = 0; checked < samples && attempt < 100 * samples; ++attempt) {
    const double r = 0.95 * R * std::sqrt(unit(rng));
    const double a = two_pi * unit(rng);
    const Point x = domain.center() + r * Vector2(std::cos(a), std::sin(a));
    if (!far_from_singularities(x)) continue;
    const double u0 = u(x);
    const double uxx = u(x + Vector2(step, 0)) - 2.0 * u0 + u(x - Vector2(step, 0));
    const double uyy = u(x + Vector2(0, step)) - 2.0 * u0 + u(x - Vector2(0, step));
    const double lap = (uxx + uyy) / (step * step);
    const double scale = std::max({1.0, std::abs(f(x)), (std::abs(uxx) + std::abs(uyy)) / (step * step)});
    if (std::abs(-lap - f(x)) > 1e-4 * scale) {
      std::ostringstream msg;
      msg << name << ": PDE residual " << std::abs(-lap - f(x)) << " at (" << x.x() << ", " << x.y() << ")";
      throw Error(msg.str());
    }
    ++checked;
  }
  const ScalarField gn = g_N();
  const double s = 1e-4 * R;
  checked = 0;
  for (int attempt = 0; checked < samples && attempt < 100 * samples; ++attempt) {
    const Point b = domain.boundary_point(two_pi * unit(rng));
    if (!far_from_singularities(b)) continue;
    const Vector2 n = domain.normal(b);
    // One-sided second-order difference from inside Ω.
    const double dn = (3.0 * u(b) - 4.0 * u(b - s * n) + u(b - 2.0 * s * n)) / (2.0 * s);
    const double scale = std::max(1.0, grad_u(b).norm());
    if (std::abs(dn - gn(b)) > 1e-4 * scale) {
      std::ostringstream msg;
      msg << name << ": Neumann trace mismatch " << std::abs(dn - gn(b)) << " at (" << b.x() << ", " << b.y()
          << ")";
      throw Error(msg.str());
    }
    ++checked;
  }
}

ManufacturedProblem manufactured_smooth(const LevelSetDomain& domain) {
  ManufacturedProblem p{"smooth", domain, {}, {}, {}, 2.0, {}};
  p.u = [](const Point& x) { return std::sin(pi * x.x()) * std::cos(pi * x.y()); };
  p.grad_u = [](const Point& x) {
    return Vector2(pi * std::cos(pi * x.x()) * std::cos(pi * x.y()), -pi * std::sin(pi * x.x()) * std::sin(pi * x.y()));
  };
  p.f = [](const Point& x) { return 2.0 * pi * pi * std::sin(pi * x.x()) * std::cos(pi * x.y()); };
  return p;
}

ManufacturedProblem manufactured_singular(const LevelSetDomain& domain, int sigma_index) {
  if (sigma_index < 0 || sigma_index >= static_cast<int>(domain.sigma().size()))
    throw Error("manufactured_singular: no interface point with index " + std::to_string(sigma_index));
  const SigmaPoint& z = domain.sigma()[sigma_index];
  const Point z0 = z.position;
  const Vector2 n_out = domain.normal(z0);
  const Vector2 tangent(-n_out.y(), n_out.x());
  // e1 points along ∂Ω into the Dirichlet part, e2 into Ω; the branch cut runs along -e2.
  const Vector2 e1 = static_cast<double>(z.dirichlet_side) * tangent;
  const Vector2 e2 = -n_out;
  for (double t : {1e-6, 1e-3, 0.1, 1.0, 10.0}) {
    if (signed_distance(domain, z0 + t * domain.radius() * n_out) <= 0.0)
      throw Error("manufactured_singular: branch cut intersects the closure of the domain");
  }
  auto polar = [z0, e1, e2](const Point& x, double& r, double& theta) {
    const Vector2 d = x - z0;
    const double xi = d.dot(e1);
    const double eta = d.dot(e2);
    r = std::hypot(xi, eta);
    theta = std::atan2(eta, xi);
    if (theta <= -0.5 * pi) theta += two_pi;
  };
  ManufacturedProblem p{"singular", domain, {}, {}, {}, 1.5, {z0}};
  p.u = [polar](const Point& x) {
    double r, theta;
    polar(x, r, theta);
    return std::sqrt(r) * std::sin(0.5 * theta);
  };
  p.grad_u = [polar, e1, e2](const Point& x) {
    double r, theta;
    polar(x, r, theta);
    if (r == 0.0) return Vector2(Vector2::Zero());
    const double s = 0.5 / std::sqrt(r);
    return Vector2(s * (-std::sin(0.5 * theta) * e1 + std::cos(0.5 * theta) * e2));
  };
  p.f = [](const Point&) { return 0.0; };
  return p;
}

ManufacturedProblem manufactured_quadratic(const LevelSetDomain& domain, const std::array<double, 6>& c) {
  ManufacturedProblem p{"custom", domain, {}, {}, {}, 2.0, {}};
  p.u = [c](const Point& x) {
    return c[0] + c[1] * x.x() + c[2] * x.y() + c[3] * x.x() * x.x() + c[4] * x.x() * x.y() + c[5] * x.y() * x.y();
  };
  p.grad_u = [c](const Point& x) {
    return Vector2(c[1] + 2.0 * c[3] * x.x() + c[4] * x.y(), c[2] + c[4] * x.x() + 2.0 * c[5] * x.y());
  };
  const double f = -2.0 * (c[3] + c[5]);
  p.f = [f](const Point&) { return f; };
  return p;
}

ManufacturedProblem manufactured_zero(const LevelSetDomain& domain) {
  ManufacturedProblem p = manufactured_quadratic(domain, {0, 0, 0, 0, 0, 0});
  p.name = "zero";
  return p;
}

// ---------------------------------------------------------------------------
// Utilities

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex guard;
  int failed_index = std::numeric_limits<int>::max();
  std::exception_ptr failure;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        // Report the lowest failing job so errors do not depend on scheduling.
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("log_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double eoc(double e1, double e2, double h1, double h2) {
  if (!(e1 > 0.0) || !(e2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e1 / e2) / std::log(h1 / h2);
}

QuadratureOptions with_cutoff_breaks(QuadratureOptions options, const LevelSetDomain& domain,
                                     const std::vector<double>& eps_values) {
  for (double eps : eps_values) {
    if (!(eps > 0.0)) continue;
    for (const auto& z : domain.sigma()) {
      options.arc_breaks.push_back(wrap_angle(z.angle + eps / domain.radius()));
      options.arc_breaks.push_back(wrap_angle(z.angle - eps / domain.radius()));
    }
  }
  return options;
}

NitscheParams level_params(const StudySettings& s, const LevelSetDomain& domain, double h, double epsilon) {
  NitscheParams p = default_params(domain, h, epsilon);
  p.beta = s.beta;
  p.sigma = s.sigma;
  if (s.delta0 > 0.0) p.tubular.delta0 = s.delta0;
  if (s.epsilon0 > 0.0) p.tubular.epsilon0 = s.epsilon0;
  p.tubular.delta = std::min(s.delta_factor * h, p.tubular.delta0);
  return p;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string level_context(int n, const std::exception& e) {
  std::ostringstream msg;
  msg << "level n=" << n << ": " << e.what();
  return msg.str();
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

// max vᵀAv / vᵀBv over v outside ker B, assuming ker B ⊆ ker A.
double max_generalized_ratio(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
  const Eigen::VectorXd& lambda = eb.eigenvalues();
  const double cutoff = 1e-10 * lambda.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > cutoff) keep.push_back(i);
  if (keep.empty()) return 0.0;
  Eigen::MatrixXd W(B.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    W.col(static_cast<Eigen::Index>(k)) = eb.eigenvectors().col(keep[k]) / std::sqrt(lambda[keep[k]]);
  const Eigen::MatrixXd reduced = W.transpose() * A * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(0.5 * (reduced + reduced.transpose()), Eigen::EigenvaluesOnly);
  return er.eigenvalues().maxCoeff();
}

} // namespace

// ---------------------------------------------------------------------------
// Convergence

ErrorReport run_convergence(const ManufacturedProblem& problem, const std::vector<int>& levels,
                            const StudySettings& settings) {
  if (levels.size() < 3) throw Error("run_convergence: need at least 3 levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw Error("run_convergence: levels must be strictly increasing");
  problem.validate();
  ErrorReport report;
  report.settings = settings;
  report.levels.resize(levels.size());
  parallel_for(static_cast<int>(levels.size()), settings.threads, [&](int i) {
    const int n = levels[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto d = discretize(problem.domain, settings.box, n, settings.shift, settings.quadrature);
      const NitscheParams params = level_params(settings, problem.domain, d->h());
      const SystemMatrices m = assemble_system(*d, params, problem.data());
      const SolveReport sol = solve_standard(m);
      const FeFunction uh(d, sol.solution);
      LevelResult& r = report.levels[i];
      r.n = n;
      r.h = d->h();
      r.ndof = d->ndof();
      r.errors = error_norms(problem.u, problem.grad_u, uh, params);
      r.seconds = seconds_since(start);
    } catch (const std::exception& e) {
      throw Error(level_context(n, e));
    }
  });
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const LevelResult& a = report.levels[i - 1];
    const LevelResult& b = report.levels[i];
    report.eoc_energy.push_back(eoc(a.errors.energy, b.errors.energy, a.h, b.h));
    report.eoc_sh.push_back(eoc(a.errors.sh_norm, b.errors.sh_norm, a.h, b.h));
    report.eoc_l2.push_back(eoc(a.errors.l2, b.errors.l2, a.h, b.h));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Discrete inequalities

InequalityReport verify_inequalities(const Discretization& d, const NitscheParams& params, int trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw Error("verify_inequalities: trials must be at least 1");
  InequalityReport rep;
  rep.trials = trials;
  const double h = d.h();
  const int N = d.ndof();

  // (a) active-mesh gradient against the physical gradient plus the stabilizer.
  const SparseMatrix grad_full = assemble_full_gradient(d);
  const SparseMatrix rhs_a = assemble_a(d) + assemble_s_h(d, params.sigma);

  // (b) h‖∇_n v‖² on ∂Ω_D against the gradient on T_h(∂Ω_D).
  std::vector<Eigen::Triplet<double>> tb, tg;
  // (c) per cut element.
  double exact_c = 0.0;
  struct CutCell {
    std::array<int, 3> dofs;
    Eigen::Matrix3d trace;
    Eigen::Matrix3d mass;
  };
  std::vector<CutCell> cut_cells;
  for (std::size_t k = 0; k < d.topology.active.size(); ++k) {
    const int t = d.topology.active[k];
    if (!d.topology.is_cut(t)) continue;
    const Triangle tri = d.mesh.triangle(t);
    const auto g = p1_gradients(tri);
    const auto& dofs = d.dofs.cell_dofs[k];
    const BoundaryRules& br = d.rules.boundary[k];
    if (!br.dirichlet.empty()) {
      const double area = std::abs(signed_area(tri));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double v = 0.0;
          for (std::size_t q = 0; q < br.dirichlet.size(); ++q)
            v += br.dirichlet.weights[q] * g[i].dot(br.dirichlet.normals[q]) * g[j].dot(br.dirichlet.normals[q]);
          tb.emplace_back(dofs[i], dofs[j], h * v);
          tg.emplace_back(dofs[i], dofs[j], area * g[i].dot(g[j]));
        }
    }
    CutCell cell{dofs, Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero()};
    for (const QuadRule* r : {&br.dirichlet, &br.neumann}) {
      for (std::size_t q = 0; q < r->size(); ++q) {
        const Eigen::Vector3d l = barycentric(tri, r->points[q]);
        cell.trace += r->weights[q] * l * l.transpose();
      }
    }
    const double area = std::abs(signed_area(tri));
    cell.mass = (area / 12.0) * (Eigen::Matrix3d::Ones() + Eigen::Matrix3d::Identity());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(cell.trace, cell.mass, Eigen::EigenvaluesOnly);
    exact_c = std::max(exact_c, h * es.eigenvalues().maxCoeff());
    cut_cells.push_back(cell);
  }
  SparseMatrix lhs_b(N, N), rhs_b(N, N);
  lhs_b.setFromTriplets(tb.begin(), tb.end());
  rhs_b.setFromTriplets(tg.begin(), tg.end());

  rep.exact_a = max_generalized_ratio(dense(grad_full), dense(rhs_a));
  rep.exact_b = tb.empty() ? 0.0 : max_generalized_ratio(dense(lhs_b), dense(rhs_b));
  rep.exact_c = exact_c;

  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    const Eigen::VectorXd v = random_vector(rng, N);
    const double da = v.dot(rhs_a * v);
    if (da > 0.0) rep.sampled_a = std::max(rep.sampled_a, v.dot(grad_full * v) / da);
    const double db = v.dot(rhs_b * v);
    if (db > 0.0) rep.sampled_b = std::max(rep.sampled_b, v.dot(lhs_b * v) / db);
    for (const auto& cell : cut_cells) {
      const Eigen::Vector3d vl(v[cell.dofs[0]], v[cell.dofs[1]], v[cell.dofs[2]]);
      rep.sampled_c = std::max(rep.sampled_c, h * vl.dot(cell.trace * vl) / vl.dot(cell.mass * vl));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cut-off lemma

CutoffReport verify_cutoff_lemma(const LevelSetDomain& domain, double delta, const std::vector<double>& ratios,
                                 int sigma_index) {
  if (!(delta > 0.0) || !(delta < domain.radius())) throw Error("verify_cutoff_lemma: delta must lie in (0, R)");
  CutoffReport rep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double ratio : ratios) {
    if (!(ratio > 0.0)) throw Error("verify_cutoff_lemma: ratios must be positive");
    CutoffRow row;
    row.ratio = ratio;
    row.delta = delta;
    row.epsilon = delta / ratio;
    TubularParams tp;
    tp.delta = delta;
    tp.epsilon = row.epsilon;
    tp.delta0 = std::max(delta, 0.5 * domain.radius());
    tp.epsilon0 = std::max(row.epsilon, delta);
    tp.validate(domain);
    row.integral = nu_profile_integral(domain, tp, sigma_index);
    row.log_term = std::log1p(ratio);
    row.normalized = row.integral / row.log_term;
    const double eps = row.epsilon;
    row.model_integral = integrate_adaptive([eps](double t) { return 1.0 / (t + eps); }, 0.0, delta, 1e-14).value;
    lo = std::min(lo, row.normalized);
    hi = std::max(hi, row.normalized);
    rep.rows.push_back(row);
  }
  rep.variation = rep.rows.empty() ? 0.0 : hi / lo;
  rep.flagged = rep.variation > 3.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Regularization

namespace {

struct RegularizedPair {
  double gap = 0.0;
  double norm_eps = 0.0;
  double norm_standard = 0.0;
};

RegularizedPair solve_pair(const Discretization& d, const NitscheParams& params, const BoundaryData& data,
                           const Eigen::VectorXd& uh, const SparseMatrix& gram) {
  const SparseMatrix K = assemble_A_h_eps(d, params) + assemble_s_h(d, params.sigma);
  const SolveReport r = solve_regularized(K, assemble_L_h(d, params, data));
  const Eigen::VectorXd diff = r.solution - uh;
  RegularizedPair out;
  out.gap = std::sqrt(std::max(0.0, diff.dot(gram * diff)));
  out.norm_eps = std::sqrt(std::max(0.0, r.solution.dot(gram * r.solution)));
  out.norm_standard = std::sqrt(std::max(0.0, uh.dot(gram * uh)));
  return out;
}

std::vector<double> positive_only(const std::vector<double>& x, const std::vector<double>& y,
                                  std::vector<double>& y_out) {
  std::vector<double> x_out;
  y_out.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      x_out.push_back(x[i]);
      y_out.push_back(y[i]);
    }
  }
  return x_out;
}

} // namespace

RegularizationReport regularization_study(const ManufacturedProblem& problem, int n,
                                          const std::vector<double>& eps_values, const StudySettings& settings) {
  problem.validate();
  const QuadratureOptions quad = with_cutoff_breaks(settings.quadrature, problem.domain, eps_values);
  const auto d = discretize(problem.domain, settings.box, n, settings.shift, quad);
  const NitscheParams base = level_params(settings, problem.domain, d->h());
  const BoundaryData data = problem.data();
  const SystemMatrices standard = assemble_system(*d, base, data);
  const Eigen::VectorXd uh = solve_standard(standard).solution;
  const SparseMatrix gram = energy_gram(*d, base, NormVariant::with_stab);
  RegularizationReport rep;
  rep.rows.resize(eps_values.size());
  parallel_for(static_cast<int>(eps_values.size()), settings.threads, [&](int i) {
    NitscheParams p = base;
    p.epsilon = eps_values[i];
    p.validate(problem.domain);
    const RegularizedPair pair = solve_pair(*d, p, data, uh, gram);
    rep.rows[i] = {n, d->h(), eps_values[i], pair.gap, pair.norm_eps, pair.norm_standard};
  });
  std::vector<double> eps, gaps, y;
  for (const auto& r : rep.rows) {
    eps.push_back(r.epsilon);
    gaps.push_back(r.gap);
  }
  const std::vector<double> x = positive_only(eps, gaps, y);
  rep.slope = x.size() >= 2 ? log_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

RegularizationReport regularization_refinement(const ManufacturedProblem& problem, const std::vector<int>& levels,
                                               double c, const StudySettings& settings) {
  problem.validate();
  RegularizationReport rep;
  rep.rows.resize(levels.size());
  parallel_for(static_cast<int>(levels.size()), settings.threads, [&](int i) {
    const int n = levels[i];
    try {
      const double h = build_background(settings.box, n).h;
      const double eps = c * h * h;
      const QuadratureOptions quad = with_cutoff_breaks(settings.quadrature, problem.domain, {eps});
      const auto d = discretize(problem.domain, settings.box, n, settings.shift, quad);
      const NitscheParams base = level_params(settings, problem.domain, d->h());
      const BoundaryData data = problem.data();
      const Eigen::VectorXd uh = solve_standard(assemble_system(*d, base, data)).solution;
      const SparseMatrix gram = energy_gram(*d, base, NormVariant::with_stab);
      NitscheParams p = base;
      p.epsilon = eps;
      p.validate(problem.domain);
      const RegularizedPair pair = solve_pair(*d, p, data, uh, gram);
      rep.rows[i] = {n, d->h(), eps, pair.gap, pair.norm_eps, pair.norm_standard};
    } catch (const std::exception& e) {
      throw Error(level_context(n, e));
    }
  });
  std::vector<double> hs, gaps, y;
  for (const auto& r : rep.rows) {
    hs.push_back(r.h);
    gaps.push_back(r.gap);
  }
  const std::vector<double> x = positive_only(hs, gaps, y);
  rep.slope = x.size() >= 2 ? log_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

FormGap form_gap(const Discretization& d, const NitscheParams& params, int samples, std::uint64_t seed) {
  NitscheParams standard = params;
  standard.epsilon = 0.0;
  const SparseMatrix D = assemble_A_h_eps(d, params) - assemble_A_h(d, standard);
  const SparseMatrix G = energy_gram(d, params, NormVariant::with_stab);
  FormGap gap;
  Eigen::LLT<Eigen::MatrixXd> llt(dense(G));
  if (llt.info() != Eigen::Success) throw Error("form_gap: energy Gram matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd M = L.triangularView<Eigen::Lower>().solve(dense(D));
  M = L.triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  gap.exact = svd.singularValues()[0];
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd v = random_vector(rng, d.ndof());
    gap.sampled = std::max(gap.sampled, std::abs(v.dot(D * v)) / v.dot(G * v));
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Conditioning

std::vector<Point> shift_sweep(const Box& box, int n, int count) {
  if (count < 1) throw Error("shift_sweep: count must be positive");
  const Vector2 cell = (box.upper - box.lower) / n;
  std::vector<Point> shifts;
  for (int k = 0; k < count; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / count;
    shifts.emplace_back(s * cell.x(), s * 0.61803398875 * cell.y());
  }
  return shifts;
}

double coercivity_constant(const Discretization& d, const NitscheParams& params) {
  const Eigen::MatrixXd K = dense(assemble_A_h(d, params) + assemble_s_h(d, params.sigma));
  const Eigen::MatrixXd G = dense(energy_gram(d, params, NormVariant::with_stab));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()), G,
                                                                Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("coercivity_constant: energy Gram matrix is not positive definite");
  return es.eigenvalues().minCoeff();
}

ConditionReport condition_sweep(const LevelSetDomain& domain, int n, int count, const StudySettings& settings) {
  const std::vector<Point> shifts = shift_sweep(settings.box, n, count);
  ConditionReport rep;
  rep.rows.resize(shifts.size());
  parallel_for(count, settings.threads, [&](int k) {
    const auto d = discretize(domain, settings.box, n, shifts[k], settings.quadrature);
    const NitscheParams p = level_params(settings, domain, d->h());
    ConditionRow& row = rep.rows[k];
    row.index = k;
    row.shift = shifts[k];
    row.ndof = d->ndof();
    row.coercivity = coercivity_constant(*d, p);
    const SparseMatrix A = assemble_A_h(*d, p);
    row.kappa = condition_estimate(SparseMatrix(A + assemble_s_h(*d, p.sigma)));
    try {
      row.kappa_unstabilized = condition_estimate(A);
    } catch (const Error&) {
      row.kappa_unstabilized = std::numeric_limits<double>::infinity();
    }
  });
  rep.min_coercivity = std::numeric_limits<double>::infinity();
  double kmin = std::numeric_limits<double>::infinity();
  double kmax = 0.0;
  double worst = -1.0;
  for (const auto& r : rep.rows) {
    rep.min_coercivity = std::min(rep.min_coercivity, r.coercivity);
    kmin = std::min(kmin, r.kappa);
    kmax = std::max(kmax, r.kappa);
    if (r.kappa_unstabilized > worst) {
      worst = r.kappa_unstabilized;
      rep.worst_index = r.index;
    }
  }
  rep.kappa_spread = kmax / kmin;
  const ConditionRow& w = rep.rows[rep.worst_index];
  rep.worst_blowup = w.kappa_unstabilized / w.kappa;
  return rep;
}

// ---------------------------------------------------------------------------
// Interpolation

InterpolationReport interpolation_study(const ManufacturedProblem& problem, const std::vector<int>& levels,
                                        const StudySettings& settings) {
  problem.validate();
  InterpolationReport rep;
  rep.rows.resize(levels.size());
  parallel_for(static_cast<int>(levels.size()), settings.threads, [&](int i) {
    const int n = levels[i];
    const auto d = discretize(problem.domain, settings.box, n, settings.shift, settings.quadrature);
    const NitscheParams p = level_params(settings, problem.domain, d->h());
    const FeFunction pu = clement_interpolate(problem.u, d);
    const ErrorNorms e = error_norms(problem.u, problem.grad_u, pu, p);
    rep.rows[i] = {n, d->h(), e.energy, e.sh_norm, std::hypot(e.gradient, e.l2)};
  });
  std::vector<double> hs, en, h1;
  for (const auto& r : rep.rows) {
    hs.push_back(r.h);
    en.push_back(r.energy + r.sh_norm);
    h1.push_back(r.h1);
  }
  if (hs.size() >= 2) {
    rep.slope_energy = log_slope(hs, en);
    rep.slope_h1 = log_slope(hs, h1);
  }
  return rep;
}

} // namespace cutfem
