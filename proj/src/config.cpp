#include "cutfem/config.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace cutfem {

using nlohmann::json;

namespace {

// Checks that `node` is an object whose keys are all in `allowed`.
void check_fields(const json& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (!allowed.count(it.key())) {
      const std::string full = path.empty() ? it.key() : path + "." + it.key();
      throw ConfigError("unknown field '" + full + "'");
    }
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_number(const json& node, const std::string& path, const std::string& key, double fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  return v.get<double>();
}

int get_int(const json& node, const std::string& path, const std::string& key, int fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& node, const std::string& path, const std::string& key,
                       const std::string& fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

Point get_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path + ": expected [x, y]");
  return Point(v[0].get<double>(), v[1].get<double>());
}

std::vector<double> get_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(path + ": expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void parse_geometry(const json& g, ExperimentConfig& c) {
  check_fields(g, "geometry", {"center", "radius", "dirichlet_arcs"});
  if (g.contains("center")) c.center = get_point(g.at("center"), "geometry.center");
  c.radius = get_number(g, "geometry", "radius", c.radius);
  if (!(c.radius > 0.0)) throw ConfigError("geometry.radius must be positive");
  if (g.contains("dirichlet_arcs")) {
    const json& arcs = g.at("dirichlet_arcs");
    if (!arcs.is_array()) throw ConfigError("geometry.dirichlet_arcs: expected a list of [begin, end] pairs");
    c.dirichlet_arcs.clear();
    for (const auto& a : arcs) {
      const std::vector<double> pair = get_numbers(a, "geometry.dirichlet_arcs");
      if (pair.size() != 2) throw ConfigError("geometry.dirichlet_arcs: expected [begin, end] pairs");
      if (!(pair[1] > pair[0])) throw ConfigError("geometry.dirichlet_arcs: arc end must exceed its begin");
      c.dirichlet_arcs.push_back({pair[0], pair[1]});
    }
  }
}

void parse_mesh(const json& m, ExperimentConfig& c) {
  check_fields(m, "mesh", {"box", "levels", "shift_sweep_count", "shift"});
  if (m.contains("box")) {
    const json& b = m.at("box");
    if (!b.is_array() || b.size() != 2) throw ConfigError("mesh.box: expected [[x0, y0], [x1, y1]]");
    c.box.lower = get_point(b[0], "mesh.box");
    c.box.upper = get_point(b[1], "mesh.box");
    if (!(c.box.upper.x() > c.box.lower.x() && c.box.upper.y() > c.box.lower.y()))
      throw ConfigError("mesh.box: upper corner must exceed lower corner");
  }
  if (m.contains("levels")) {
    const json& l = m.at("levels");
    if (!l.is_array() || l.empty()) throw ConfigError("mesh.levels: expected a non-empty list of integers");
    c.levels.clear();
    for (const auto& x : l) {
      if (!x.is_number_integer() || x.get<int>() < 1) throw ConfigError("mesh.levels: entries must be integers >= 1");
      c.levels.push_back(x.get<int>());
    }
    for (std::size_t i = 1; i < c.levels.size(); ++i)
      if (c.levels[i] <= c.levels[i - 1]) throw ConfigError("mesh.levels: must be strictly increasing");
  }
  c.shift_sweep_count = get_int(m, "mesh", "shift_sweep_count", c.shift_sweep_count);
  if (c.shift_sweep_count < 1) throw ConfigError("mesh.shift_sweep_count must be at least 1");
  if (m.contains("shift")) c.shift = get_point(m.at("shift"), "mesh.shift");
  if (c.center.x() - c.radius <= c.box.lower.x() || c.center.x() + c.radius >= c.box.upper.x() ||
      c.center.y() - c.radius <= c.box.lower.y() || c.center.y() + c.radius >= c.box.upper.y())
    throw ConfigError("mesh.box must contain the disk");
}

void parse_params(const json& p, ExperimentConfig& c) {
  check_fields(p, "params", {"beta", "sigma", "epsilon_rule", "delta_rule", "delta0", "epsilon0"});
  c.beta = get_number(p, "params", "beta", c.beta);
  if (!(c.beta > 0.0)) throw ConfigError("params.beta must be positive");
  c.sigma = get_number(p, "params", "sigma", c.sigma);
  if (!(c.sigma >= 0.0)) throw ConfigError("params.sigma must be non-negative");
  if (p.contains("epsilon_rule")) {
    const json& e = p.at("epsilon_rule");
    check_fields(e, "params.epsilon_rule", {"kind", "c", "value"});
    const std::string kind = get_string(e, "params.epsilon_rule", "kind", "c_h2");
    if (kind == "fixed") {
      c.epsilon_rule.kind = EpsilonRule::Kind::fixed;
      c.epsilon_rule.value = get_number(e, "params.epsilon_rule", "value", 0.0);
      if (!(c.epsilon_rule.value >= 0.0)) throw ConfigError("params.epsilon_rule.value must be non-negative");
    } else if (kind == "c_h2") {
      c.epsilon_rule.kind = EpsilonRule::Kind::c_h2;
      c.epsilon_rule.c = get_number(e, "params.epsilon_rule", "c", 0.1);
      if (!(c.epsilon_rule.c > 0.0)) throw ConfigError("params.epsilon_rule.c must be positive");
    } else {
      throw ConfigError("params.epsilon_rule.kind must be 'fixed' or 'c_h2'");
    }
  }
  if (p.contains("delta_rule")) {
    const json& d = p.at("delta_rule");
    check_fields(d, "params.delta_rule", {"factor"});
    c.delta_factor = get_number(d, "params.delta_rule", "factor", 1.0);
    if (!(c.delta_factor > 0.0)) throw ConfigError("params.delta_rule.factor must be positive");
  }
  c.delta0 = get_number(p, "params", "delta0", 0.0);
  c.epsilon0 = get_number(p, "params", "epsilon0", 0.0);
  if (c.delta0 < 0.0) throw ConfigError("params.delta0 must be positive");
  if (c.delta0 >= c.radius) throw ConfigError("params.delta0 must be below the radius");
  if (c.epsilon0 < 0.0) throw ConfigError("params.epsilon0 must be positive");
  if (c.epsilon0 > 0.0 && c.epsilon_rule.kind == EpsilonRule::Kind::fixed && c.epsilon_rule.value > c.epsilon0)
    throw ConfigError("params.epsilon_rule.value exceeds params.epsilon0");
}

void parse_problem(const json& p, ExperimentConfig& c) {
  check_fields(p, "problem", {"kind", "sigma_index", "coefficients"});
  const std::string kind = get_string(p, "problem", "kind", "smooth");
  if (kind == "smooth") {
    c.problem = ProblemKind::smooth;
  } else if (kind == "singular") {
    c.problem = ProblemKind::singular;
    c.sigma_index = get_int(p, "problem", "sigma_index", 0);
  } else if (kind == "custom") {
    c.problem = ProblemKind::custom;
    if (!p.contains("coefficients")) throw ConfigError("problem.coefficients required for kind 'custom'");
    const std::vector<double> k = get_numbers(p.at("coefficients"), "problem.coefficients");
    if (k.size() != 6) throw ConfigError("problem.coefficients: expected 6 numbers");
    std::copy(k.begin(), k.end(), c.coefficients.begin());
  } else {
    throw ConfigError("problem.kind must be 'smooth', 'singular' or 'custom'");
  }
  if ((p.contains("sigma_index") && c.problem != ProblemKind::singular) ||
      (p.contains("coefficients") && c.problem != ProblemKind::custom))
    throw ConfigError("problem: field not valid for kind '" + kind + "'");
}

void parse_study(const json& s, ExperimentConfig& c) {
  check_fields(s, "study", {"kind", "mode", "n", "eps_values", "ratios", "delta", "trials", "seed"});
  const std::string kind = get_string(s, "study", "kind", "convergence");
  static const std::map<std::string, StudyKind> kinds = {
      {"convergence", StudyKind::convergence},     {"regularization", StudyKind::regularization},
      {"inequalities", StudyKind::inequalities},   {"cutoff_lemma", StudyKind::cutoff_lemma},
      {"condition_sweep", StudyKind::condition_sweep}, {"interpolation", StudyKind::interpolation}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) throw ConfigError("study.kind: unknown study '" + kind + "'");
  c.study = it->second;
  c.mode = get_string(s, "study", "mode", c.mode);
  if (c.mode != "eps_sweep" && c.mode != "refinement")
    throw ConfigError("study.mode must be 'eps_sweep' or 'refinement'");
  c.study_n = get_int(s, "study", "n", c.study_n);
  if (c.study_n < 1) throw ConfigError("study.n must be at least 1");
  if (s.contains("eps_values")) {
    c.eps_values = get_numbers(s.at("eps_values"), "study.eps_values");
    for (double e : c.eps_values)
      if (!(e >= 0.0)) throw ConfigError("study.eps_values must be non-negative");
  }
  if (s.contains("ratios")) {
    c.ratios = get_numbers(s.at("ratios"), "study.ratios");
    for (double r : c.ratios)
      if (!(r > 0.0)) throw ConfigError("study.ratios must be positive");
  }
  c.cutoff_delta = get_number(s, "study", "delta", 0.0);
  if (c.cutoff_delta < 0.0 || c.cutoff_delta >= c.radius) throw ConfigError("study.delta must lie in (0, radius)");
  c.trials = get_int(s, "study", "trials", c.trials);
  if (c.trials < 1) throw ConfigError("study.trials must be at least 1");
  if (s.contains("seed")) {
    if (!s.at("seed").is_number_unsigned()) throw ConfigError("study.seed: expected a non-negative integer");
    c.seed = s.at("seed").get<std::uint64_t>();
  }
  if (c.study == StudyKind::convergence && c.levels.size() < 3)
    throw ConfigError("mesh.levels: the convergence study needs at least 3 levels");
  if (c.study == StudyKind::regularization && c.mode == "eps_sweep" && c.eps_values.empty())
    throw ConfigError("study.eps_values required for the eps_sweep regularization study");
}

} // namespace

StudySettings ExperimentConfig::settings(int threads) const {
  StudySettings s;
  s.box = box;
  s.beta = beta;
  s.sigma = sigma;
  s.shift = shift;
  s.delta_factor = delta_factor;
  s.delta0 = delta0;
  s.epsilon0 = epsilon0;
  s.quadrature.tol = quadrature_tol;
  s.quadrature.volume_points = volume_points;
  s.threads = threads;
  return s;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_fields(root, "", {"geometry", "mesh", "params", "problem", "study", "output", "quadrature"});
  ExperimentConfig c;
  // Geometry first: later sections validate against the disk.
  if (root.contains("geometry")) parse_geometry(root.at("geometry"), c);
  if (root.contains("mesh")) parse_mesh(root.at("mesh"), c);
  else parse_mesh(json::object(), c);
  if (root.contains("params")) parse_params(root.at("params"), c);
  if (root.contains("problem")) parse_problem(root.at("problem"), c);
  if (root.contains("quadrature")) {
    const json& q = root.at("quadrature");
    check_fields(q, "quadrature", {"tol", "volume_points"});
    c.quadrature_tol = get_number(q, "quadrature", "tol", c.quadrature_tol);
    if (!(c.quadrature_tol > 0.0)) throw ConfigError("quadrature.tol must be positive");
    c.volume_points = get_int(q, "quadrature", "volume_points", c.volume_points);
    if (c.volume_points < 1 || c.volume_points > 64) throw ConfigError("quadrature.volume_points must be in [1, 64]");
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    check_fields(o, "output", {"path"});
    c.output_path = get_string(o, "output", "path", c.output_path);
  }
  parse_study(root.contains("study") ? root.at("study") : json::object(), c);
  try {
    (void)c.domain();
  } catch (const Error& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  if (c.problem == ProblemKind::singular) {
    const LevelSetDomain d = c.domain();
    if (c.sigma_index < 0 || c.sigma_index >= static_cast<int>(d.sigma().size()))
      throw ConfigError("problem.sigma_index: no interface point with this index for the given dirichlet_arcs");
  }
  c.echo = root.dump(2);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::convergence: return "convergence";
    case StudyKind::regularization: return "regularization";
    case StudyKind::inequalities: return "inequalities";
    case StudyKind::cutoff_lemma: return "cutoff_lemma";
    case StudyKind::condition_sweep: return "condition_sweep";
    case StudyKind::interpolation: return "interpolation";
  }
  return "unknown";
}

std::string format_number(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string num(double x) { return format_number(x); }
std::string num(int x) { return std::to_string(x); }

ManufacturedProblem make_problem(const ExperimentConfig& c) {
  const LevelSetDomain d = c.domain();
  ManufacturedProblem p = [&] {
    switch (c.problem) {
      case ProblemKind::singular: return manufactured_singular(d, c.sigma_index);
      case ProblemKind::custom: return manufactured_quadratic(d, c.coefficients);
      case ProblemKind::smooth: break;
    }
    return manufactured_smooth(d);
  }();
  p.validate();
  return p;
}

std::string convergence_csv(const ExperimentConfig& c, const StudySettings& s) {
  const ErrorReport rep = run_convergence(make_problem(c), c.levels, s);
  CsvWriter csv({"level", "h", "ndof", "energy_err", "sh_norm", "l2_err", "eoc_energy"});
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    const LevelResult& r = rep.levels[i];
    csv.row({num(r.n), num(r.h), num(r.ndof), num(r.errors.energy), num(r.errors.sh_norm), num(r.errors.l2),
             i == 0 ? std::string() : num(rep.eoc_energy[i - 1])});
  }
  return csv.str();
}

std::string regularization_csv(const ExperimentConfig& c, const StudySettings& s) {
  const ManufacturedProblem p = make_problem(c);
  RegularizationReport rep;
  if (c.mode == "refinement") {
    if (c.epsilon_rule.kind != EpsilonRule::Kind::c_h2)
      throw ConfigError("params.epsilon_rule: the refinement regularization study needs kind 'c_h2'");
    rep = regularization_refinement(p, c.levels, c.epsilon_rule.c, s);
  } else {
    rep = regularization_study(p, c.study_n, c.eps_values, s);
  }
  CsvWriter csv({"n", "h", "epsilon", "gap", "norm_eps", "norm_standard"});
  for (const auto& r : rep.rows)
    csv.row({num(r.n), num(r.h), num(r.epsilon), num(r.gap), num(r.norm_eps), num(r.norm_standard)});
  return csv.str();
}

std::string inequalities_csv(const ExperimentConfig& c, const StudySettings& s) {
  const LevelSetDomain domain = c.domain();
  struct Job {
    int n;
    int shift_index;
    Point shift;
  };
  std::vector<Job> jobs;
  for (int n : c.levels) {
    const auto shifts = shift_sweep(c.box, n, c.shift_sweep_count);
    for (int k = 0; k < c.shift_sweep_count; ++k) jobs.push_back({n, k, shifts[k]});
  }
  std::vector<InequalityReport> reports(jobs.size());
  std::vector<double> hs(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), s.threads, [&](int j) {
    const auto d = discretize(domain, c.box, jobs[j].n, jobs[j].shift, s.quadrature);
    hs[j] = d->h();
    reports[j] = verify_inequalities(*d, level_params(s, domain, d->h()), c.trials, c.seed);
  });
  CsvWriter csv({"n", "shift_index", "h", "sampled_a", "exact_a", "sampled_b", "exact_b", "sampled_c", "exact_c"});
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& r = reports[j];
    csv.row({num(jobs[j].n), num(jobs[j].shift_index), num(hs[j]), num(r.sampled_a), num(r.exact_a),
             num(r.sampled_b), num(r.exact_b), num(r.sampled_c), num(r.exact_c)});
  }
  return csv.str();
}

std::string cutoff_csv(const ExperimentConfig& c) {
  const LevelSetDomain domain = c.domain();
  if (domain.sigma().empty()) throw ConfigError("geometry.dirichlet_arcs: the cutoff study needs a mixed partition");
  const double delta = c.cutoff_delta > 0.0 ? c.cutoff_delta : 0.1 * c.radius;
  const CutoffReport rep = verify_cutoff_lemma(domain, delta, c.ratios, c.sigma_index);
  CsvWriter csv({"ratio", "delta", "epsilon", "integral", "log_term", "normalized", "model_integral"});
  for (const auto& r : rep.rows)
    csv.row({num(r.ratio), num(r.delta), num(r.epsilon), num(r.integral), num(r.log_term), num(r.normalized),
             num(r.model_integral)});
  return csv.str();
}

std::string condition_csv(const ExperimentConfig& c, const StudySettings& s) {
  const ConditionReport rep = condition_sweep(c.domain(), c.study_n, c.shift_sweep_count, s);
  CsvWriter csv({"index", "shift_x", "shift_y", "ndof", "coercivity", "kappa", "kappa_unstabilized"});
  for (const auto& r : rep.rows)
    csv.row({num(r.index), num(r.shift.x()), num(r.shift.y()), num(r.ndof), num(r.coercivity), num(r.kappa),
             num(r.kappa_unstabilized)});
  return csv.str();
}

std::string interpolation_csv(const ExperimentConfig& c, const StudySettings& s) {
  const InterpolationReport rep = interpolation_study(make_problem(c), c.levels, s);
  CsvWriter csv({"level", "h", "energy_err", "sh_norm", "h1_err"});
  for (const auto& r : rep.rows) csv.row({num(r.n), num(r.h), num(r.energy), num(r.sh_norm), num(r.h1)});
  return csv.str();
}

} // namespace

std::string run_study_csv(const ExperimentConfig& config, int threads, std::ostream* log) {
  const StudySettings s = config.settings(threads);
  if (log) *log << "running " << study_name(config.study) << " study\n";
  switch (config.study) {
    case StudyKind::convergence: return convergence_csv(config, s);
    case StudyKind::regularization: return regularization_csv(config, s);
    case StudyKind::inequalities: return inequalities_csv(config, s);
    case StudyKind::cutoff_lemma: return cutoff_csv(config);
    case StudyKind::condition_sweep: return condition_csv(config, s);
    case StudyKind::interpolation: return interpolation_csv(config, s);
  }
  throw ConfigError("study.kind: not implemented");
}

RunArtifacts run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  RunArtifacts art;
  art.csv = run_study_csv(config, options.threads, options.quiet ? nullptr : log);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::filesystem::path dir = options.out_dir.empty() ? std::filesystem::path(config.output_path) : options.out_dir;
  std::filesystem::create_directories(dir);
  art.csv_path = dir / (study_name(config.study) + ".csv");
  art.manifest_path = dir / "manifest.txt";
  {
    std::ofstream out(art.csv_path, std::ios::binary);
    if (!out) throw Error("cannot write " + art.csv_path.string());
    out << art.csv;
  }
  std::ofstream man(art.manifest_path, std::ios::binary);
  if (!man) throw Error("cannot write " + art.manifest_path.string());
  man << "study: " << study_name(config.study) << '\n';
  man << "csv: " << art.csv_path.filename().string() << '\n';
  man << "cutfem: 1.0.0\n";
  man << "eigen: " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
#if defined(__clang__)
  man << "compiler: clang " << __clang_major__ << '.' << __clang_minor__ << '\n';
#elif defined(__GNUC__)
  man << "compiler: gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << '\n';
#endif
  man << "threads: " << options.threads << '\n';
  man << "wall_seconds: " << format_number(seconds) << '\n';
  man << "config:\n" << config.echo << '\n';
  if (log && !options.quiet) *log << "wrote " << art.csv_path.string() << " in " << seconds << " s\n";
  return art;
}

} // namespace cutfem
