#ifndef CUTFEM_CONFIG_HPP
#define CUTFEM_CONFIG_HPP

#include "cutfem/study.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cutfem {

/// Raised for malformed or infeasible configurations. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ProblemKind { smooth, singular, custom };
enum class StudyKind { convergence, regularization, inequalities, cutoff_lemma, condition_sweep, interpolation };

struct EpsilonRule {
  enum class Kind { fixed, c_h2 } kind = Kind::c_h2;
  double value = 0.0; ///< fixed ε
  double c = 0.1;     ///< ε = c h²

  double epsilon(double h) const { return kind == Kind::fixed ? value : c * h * h; }
};

struct ExperimentConfig {
  // geometry
  Point center = Point::Zero();
  double radius = 0.7;
  std::vector<AngularInterval> dirichlet_arcs{{0.0, two_pi}};
  // mesh
  Box box;
  std::vector<int> levels{8, 16, 32, 64};
  int shift_sweep_count = 20;
  Point shift = Point::Zero();
  // params
  double beta = 10.0;
  double sigma = 0.1;
  EpsilonRule epsilon_rule;
  double delta_factor = 1.0;
  double delta0 = 0.0;
  double epsilon0 = 0.0;
  // problem
  ProblemKind problem = ProblemKind::smooth;
  int sigma_index = 0;
  std::array<double, 6> coefficients{};
  // study
  StudyKind study = StudyKind::convergence;
  std::string mode = "eps_sweep";        ///< regularization: eps_sweep | refinement
  int study_n = 16;                      ///< mesh for single-mesh studies
  std::vector<double> eps_values;        ///< regularization eps_sweep
  std::vector<double> ratios{10, 100, 1000}; ///< cutoff_lemma δ/ε
  double cutoff_delta = 0.0;             ///< 0 selects 0.1 R
  int trials = 100;
  std::uint64_t seed = 1;
  // output
  std::string output_path = ".";
  // quadrature
  double quadrature_tol = 1e-10;
  int volume_points = 5;

  /// Canonical JSON text of the parsed configuration.
  std::string echo;

  LevelSetDomain domain() const { return LevelSetDomain(center, radius, dirichlet_arcs); }
  StudySettings settings(int threads) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string study_name(StudyKind kind);

struct RunOptions {
  std::filesystem::path out_dir; ///< empty: use the configured output path
  int threads = 1;
  bool quiet = false;
};

struct RunArtifacts {
  std::filesystem::path csv_path;
  std::filesystem::path manifest_path;
  std::string csv;
};

/// CSV text for the configured study.
std::string run_study_csv(const ExperimentConfig& config, int threads, std::ostream* log);

/// Executes the study and writes `<study>.csv` and `manifest.txt`.
RunArtifacts run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream* log);

/// Formats a value with 17 significant digits.
std::string format_number(double x);

} // namespace cutfem

#endif // CUTFEM_CONFIG_HPP
