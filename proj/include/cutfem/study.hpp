#ifndef CUTFEM_STUDY_HPP
#define CUTFEM_STUDY_HPP

#include "cutfem/solve.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cutfem {

struct ManufacturedProblem {
  std::string name;
  LevelSetDomain domain;
  ScalarField u;
  VectorField grad_u;
  ScalarField f;
  double regularity_s = 2.0;
  /// Points excluded from the residual checks (singularities).
  std::vector<Point> singular_points;

  ScalarField g_D() const { return u; }
  /// ∇u·n with n the outward normal at the closest boundary point.
  ScalarField g_N() const;
  BoundaryData data() const { return {f, g_D(), g_N()}; }

  /// Finite-difference check of −Δu = f and of the boundary traces; throws on failure.
  void validate(int samples = 100, std::uint64_t seed = 7) const;
};

ManufacturedProblem manufactured_smooth(const LevelSetDomain& domain);
/// r^{1/2} sin(θ/2) centred at the interface point with the given index.
ManufacturedProblem manufactured_singular(const LevelSetDomain& domain, int sigma_index = 0);
/// u = c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y².
ManufacturedProblem manufactured_quadratic(const LevelSetDomain& domain, const std::array<double, 6>& c);
/// u ≡ 0 with zero data.
ManufacturedProblem manufactured_zero(const LevelSetDomain& domain);

/// Runs `count` independent jobs on up to `threads` workers. Jobs write to their own slot.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

double log_slope(const std::vector<double>& x, const std::vector<double>& y);
double eoc(double e1, double e2, double h1, double h2);

/// Settings shared by all discrete studies.
struct StudySettings {
  Box box;
  double beta = 10.0;
  double sigma = 0.1;
  Point shift = Point::Zero();
  /// δ = delta_factor·h, capped at δ0.
  double delta_factor = 1.0;
  /// Zero selects the defaults δ0 = R/2 and ε0 = h.
  double delta0 = 0.0;
  double epsilon0 = 0.0;
  QuadratureOptions quadrature;
  int threads = 1;
};

/// Adds boundary breaks at Σ ± ε/R so χ is resolved on ∂Ω_N.
QuadratureOptions with_cutoff_breaks(QuadratureOptions options, const LevelSetDomain& domain,
                                     const std::vector<double>& eps_values);

NitscheParams level_params(const StudySettings& s, const LevelSetDomain& domain, double h, double epsilon = 0.0);

struct LevelResult {
  int n = 0;
  double h = 0.0;
  int ndof = 0;
  ErrorNorms errors;
  double seconds = 0.0;
};

struct ErrorReport {
  std::vector<LevelResult> levels;
  std::vector<double> eoc_energy; ///< one per consecutive pair
  std::vector<double> eoc_sh;
  std::vector<double> eoc_l2;
  StudySettings settings;
};

ErrorReport run_convergence(const ManufacturedProblem& problem, const std::vector<int>& levels,
                            const StudySettings& settings);

struct InequalityReport {
  double sampled_a = 0.0; ///< ‖∇v‖²_{T_h} / (‖∇v‖²_Ω + ‖v‖²_{s_h})
  double sampled_b = 0.0; ///< h‖∇_n v‖²_{∂Ω_D} / ‖∇v‖²_{T_h(∂Ω_D)}
  double sampled_c = 0.0; ///< max over cut T of h‖v‖²_{T∩∂Ω} / ‖v‖²_T
  double exact_a = 0.0;
  double exact_b = 0.0;
  double exact_c = 0.0;
  int trials = 0;
};

InequalityReport verify_inequalities(const Discretization& d, const NitscheParams& params, int trials,
                                     std::uint64_t seed = 1);

struct CutoffRow {
  double ratio = 0.0; ///< δ/ε
  double delta = 0.0;
  double epsilon = 0.0;
  double integral = 0.0;
  double log_term = 0.0;
  double normalized = 0.0; ///< integral / ln(1 + δ/ε)
  double model_integral = 0.0; ///< ∫₀^δ (t+ε)^{-1} dt by adaptive quadrature
};

struct CutoffReport {
  std::vector<CutoffRow> rows;
  double variation = 0.0; ///< max/min of the normalized column
  bool flagged = false;   ///< variation above 3
};

CutoffReport verify_cutoff_lemma(const LevelSetDomain& domain, double delta, const std::vector<double>& ratios,
                                 int sigma_index = 0);

struct RegularizationRow {
  int n = 0;
  double h = 0.0;
  double epsilon = 0.0;
  double gap = 0.0;          ///< |||u_{h,ε} − u_h|||_h
  double norm_eps = 0.0;     ///< |||u_{h,ε}|||_h
  double norm_standard = 0.0;
};

struct RegularizationReport {
  std::vector<RegularizationRow> rows;
  double slope = 0.0; ///< log-log slope of gap against ε (fixed h) or h (ε = c h²)
};

/// Fixed mesh, ε sweep.
RegularizationReport regularization_study(const ManufacturedProblem& problem, int n,
                                          const std::vector<double>& eps_values, const StudySettings& settings);
/// ε = c h² on each level.
RegularizationReport regularization_refinement(const ManufacturedProblem& problem, const std::vector<int>& levels,
                                               double c, const StudySettings& settings);

struct FormGap {
  double exact = 0.0;   ///< sup |D(v,w)| / (|||v||| |||w|||)
  double sampled = 0.0; ///< max |D(v,v)| / |||v|||² over random v
};
/// Gap between A_{h,ε} and A_h in the energy metric.
FormGap form_gap(const Discretization& d, const NitscheParams& params, int samples = 100, std::uint64_t seed = 3);

struct ConditionRow {
  int index = 0;
  Point shift = Point::Zero();
  int ndof = 0;
  double coercivity = 0.0; ///< smallest eigenvalue of sym(A_h + S) against the energy Gram
  double kappa = 0.0;
  double kappa_unstabilized = 0.0;
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  double min_coercivity = 0.0;
  double kappa_spread = 0.0;     ///< max/min κ across the sweep
  double worst_blowup = 0.0;     ///< κ(σ=0)/κ(σ) at the position with the largest κ(σ=0)
  int worst_index = 0;
};

/// Deterministic sub-cell shifts s_k = ((k + 1/2)/N)·cell·(1, 0.618...).
std::vector<Point> shift_sweep(const Box& box, int n, int count);

/// Smallest generalized eigenvalue of sym(K) against the with-stab energy Gram.
double coercivity_constant(const Discretization& d, const NitscheParams& params);

ConditionReport condition_sweep(const LevelSetDomain& domain, int n, int count, const StudySettings& settings);

struct InterpolationRow {
  int n = 0;
  double h = 0.0;
  double energy = 0.0;  ///< |||u − π_h u||| without stabilizer
  double sh_norm = 0.0; ///< ‖π_h u‖_{s_h}
  double h1 = 0.0;      ///< ‖u − π_h u‖_{H¹(Ω)}
};

struct InterpolationReport {
  std::vector<InterpolationRow> rows;
  double slope_energy = 0.0; ///< of energy + sh_norm
  double slope_h1 = 0.0;
};

InterpolationReport interpolation_study(const ManufacturedProblem& problem, const std::vector<int>& levels,
                                        const StudySettings& settings);

} // namespace cutfem

#endif // CUTFEM_STUDY_HPP
