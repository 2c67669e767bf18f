#include <gtest/gtest.h>

#include "cutfem/assembly.hpp"
#include "cutfem/study.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace cutfem {
namespace {

const Box square{Point(-1.0, -1.0), Point(1.0, 1.0)};
const Box unit_box{Point(0.0, 0.0), Point(1.0, 1.0)};

LevelSetDomain mixed_domain() { return LevelSetDomain(Point::Zero(), 0.7, {{0.0, pi}}); }

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

double max_abs(const SparseMatrix& m) {
  double s = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) s = std::max(s, std::abs(it.value()));
  return s;
}

TEST(Assembly, StiffnessAnnihilatesConstants) {
  const auto d = discretize(mixed_domain(), square, 8, Point(0.01, 0.02));
  const SparseMatrix a = assemble_a(*d);
  EXPECT_LE((a * Eigen::VectorXd::Ones(d->ndof())).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_LE(max_abs(SparseMatrix(a - SparseMatrix(a.transpose()))), 1e-15);
}

TEST(Assembly, FittedTwoTriangleStiffness) {
  const auto d = discretize(LevelSetDomain::dirichlet_disk(Point(0.5, 0.5), 1.0), unit_box, 1);
  ASSERT_EQ(d->ndof(), 4);
  Eigen::Matrix4d expect;
  expect << 1.0, -0.5, -0.5, 0.0,
           -0.5, 1.0, 0.0, -0.5,
           -0.5, 0.0, 1.0, -0.5,
            0.0, -0.5, -0.5, 1.0;
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_a(*d));
  EXPECT_LE((a - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, NitscheMatrixExamples) {
  const LevelSetDomain dom = mixed_domain();
  const auto d = discretize(dom, square, 12, Point(0.011, 0.003));
  const NitscheParams p = default_params(dom, d->h());
  const SparseMatrix A = assemble_A_h(*d, p);
  EXPECT_LE(max_abs(SparseMatrix(A - SparseMatrix(A.transpose()))), 1e-13 * max_abs(A));
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(d->ndof());
  EXPECT_NEAR(one.dot(A * one), p.beta / d->h() * pi * 0.7, 1e-9);

  const LevelSetDomain neumann(Point::Zero(), 0.7, {});
  const auto dn = discretize(neumann, square, 12, Point(0.011, 0.003));
  EXPECT_LE(max_abs(SparseMatrix(assemble_A_h(*dn, p) - assemble_a(*dn))), 1e-15);
}

TEST(Assembly, RegularizedMatchesStandardAtZeroEpsilon) {
  const LevelSetDomain dom = mixed_domain();
  const auto d = discretize(dom, square, 12, Point(0.011, 0.003));
  NitscheParams p = default_params(dom, d->h());
  EXPECT_LE(max_abs(SparseMatrix(assemble_A_h_eps(*d, p) - assemble_A_h(*d, p))), 1e-14);
  p = default_params(dom, d->h(), 0.05 * d->h());
  const SparseMatrix Ae = assemble_A_h_eps(*d, p);
  EXPECT_GT(max_abs(SparseMatrix(Ae - SparseMatrix(Ae.transpose()))), 1e-8);
}

TEST(Assembly, GhostPenaltyProperties) {
  const auto d = discretize(mixed_domain(), square, 10, Point(0.004, 0.017));
  const SparseMatrix S = assemble_s_h(*d, 0.1);
  const FeFunction affine = nodal_interpolate([](const Point& x) { return 2.0 - x.x() + 3.0 * x.y(); }, d);
  const Eigen::VectorXd r = random_vector(d->ndof(), 3);
  EXPECT_LE(std::abs(affine.coefficients.dot(S * affine.coefficients)), 1e-12 * r.dot(S * r));
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(S)).eigenvalues();
  EXPECT_GE(eig.minCoeff(), -1e-12 * eig.maxCoeff());
  EXPECT_LE(max_abs(SparseMatrix(assemble_s_h(*d, 0.2) - 2.0 * S)), 1e-15);
}

TEST(Assembly, LoadExamples) {
  const LevelSetDomain dom = mixed_domain();
  const auto d = discretize(dom, square, 12, Point(0.011, 0.003));
  const NitscheParams p = default_params(dom, d->h());
  auto zero = [](const Point&) { return 0.0; };
  auto one = [](const Point&) { return 1.0; };
  EXPECT_EQ(assemble_L_h(*d, p, {zero, zero, zero}).norm(), 0.0);
  EXPECT_NEAR(assemble_L_h(*d, p, {one, zero, zero}).sum(), pi * 0.49, 1e-9);
  EXPECT_NEAR(assemble_L_h(*d, p, {zero, one, zero}).sum(), p.beta / d->h() * pi * 0.7, 1e-8);
  EXPECT_NEAR(assemble_L_h(*d, p, {zero, zero, one}).sum(), pi * 0.7, 1e-9);
}

TEST(Assembly, EnergyNormExamples) {
  const LevelSetDomain dom = mixed_domain();
  const auto d = discretize(dom, square, 12, Point(0.011, 0.003));
  const NitscheParams p = default_params(dom, d->h());
  EXPECT_EQ(energy_norm(FeFunction::zero(d), p, NormVariant::with_stab), 0.0);
  const FeFunction one(d, Eigen::VectorXd::Ones(d->ndof()));
  EXPECT_NEAR(energy_norm(one, p, NormVariant::no_stab), std::sqrt(pi * 0.7 / d->h()), 1e-10);
}

TEST(Assembly, EnergyGramMatchesDirectIntegration) {
  const LevelSetDomain dom = mixed_domain();
  const auto d = discretize(dom, square, 10, Point(0.011, 0.003));
  const NitscheParams p = default_params(dom, d->h());
  const FeFunction v(d, random_vector(d->ndof(), 17));
  double grad = 0.0, trace = 0.0, jumps = 0.0;
  for (std::size_t k = 0; k < d->topology.active.size(); ++k) {
    const int t = d->topology.active[k];
    const Vector2 g = gradient(v, t);
    grad += d->rules.volume[k].measure() * g.squaredNorm();
    trace += d->rules.boundary[k].dirichlet.integrate([&](const Point& x) { return std::pow(evaluate(v, t, x), 2); });
  }
  for (int f : d->topology.boundary_faces) jumps += d->mesh.face_length(f) * std::pow(jump_normal_gradient(v, f), 2);
  const double expect = grad + trace / d->h() + p.sigma * d->h() * jumps;
  const double got = energy_norm(v, p, NormVariant::with_stab);
  EXPECT_NEAR(got * got / expect, 1.0, 1e-12);
}

TEST(Assembly, ConsistencyResidual) {
  const LevelSetDomain dom = mixed_domain();
  const ManufacturedProblem prob = manufactured_smooth(dom);
  for (int n : {8, 16}) {
    const auto d = discretize(dom, square, n, Point(0.011, 0.003));
    const NitscheParams p = default_params(dom, d->h());
    const Eigen::VectorXd lhs = apply_A_h_exact(*d, p, prob.u, prob.grad_u);
    const Eigen::VectorXd rhs = assemble_L_h(*d, p, prob.data());
    const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    EXPECT_LE((lhs - rhs).lpNorm<Eigen::Infinity>() / scale, 1e-8) << "n=" << n;
  }
}

TEST(Assembly, RegularizedResidualIdentity) {
  const LevelSetDomain dom = mixed_domain();
  const ManufacturedProblem prob = manufactured_smooth(dom);
  const int n = 16;
  const double h = 2.0 * std::sqrt(2.0) / n;
  const double eps = 0.2 * h;
  const QuadratureOptions q = with_cutoff_breaks({}, dom, {eps});
  const auto d = discretize(dom, square, n, Point(0.011, 0.003), q);
  const NitscheParams p = default_params(dom, d->h(), eps);
  const SystemMatrices m = assemble_system(*d, p, prob.data());
  EXPECT_FALSE(m.symmetric);
  const Eigen::VectorXd uh = solve_regularized(m).solution;
  const Eigen::VectorXd lhs = apply_A_h_eps_exact(*d, p, prob.u, prob.grad_u) - m.A * uh;
  const Eigen::VectorXd rhs = m.S * uh - assemble_chi_neumann_load(*d, p, prob.g_N());
  // Twenty random test functions.
  const double scale = std::max(1.0, m.b.norm());
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd v = random_vector(d->ndof(), 100 + k);
    EXPECT_LE(std::abs(v.dot(lhs - rhs)), 1e-8 * scale * v.norm());
  }
}

TEST(Assembly, RegularizedResidualIdentityWithStandardStabilizer) {
  // Stabilizer evaluated at the standard solution and moved to the load.
  const LevelSetDomain dom = mixed_domain();
  const ManufacturedProblem prob = manufactured_smooth(dom);
  const int n = 16;
  const double h = 2.0 * std::sqrt(2.0) / n;
  const double eps = 0.2 * h;
  const auto d = discretize(dom, square, n, Point(0.011, 0.003), with_cutoff_breaks({}, dom, {eps}));
  const NitscheParams p0 = default_params(dom, d->h());
  const Eigen::VectorXd uh = solve_standard(assemble_system(*d, p0, prob.data())).solution;
  const NitscheParams p = default_params(dom, d->h(), eps);
  const SparseMatrix Ae = assemble_A_h_eps(*d, p);
  const SparseMatrix S = assemble_s_h(*d, p.sigma);
  const Eigen::VectorXd b = assemble_L_h(*d, p, prob.data());
  const Eigen::VectorXd ue = solve_regularized(Ae, b - S * uh).solution;
  const Eigen::VectorXd lhs = apply_A_h_eps_exact(*d, p, prob.u, prob.grad_u) - Ae * ue;
  const Eigen::VectorXd rhs = S * uh - assemble_chi_neumann_load(*d, p, prob.g_N());
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd v = random_vector(d->ndof(), 200 + k);
    EXPECT_LE(std::abs(v.dot(lhs - rhs)), 1e-8 * std::max(1.0, b.norm()) * v.norm());
  }
}

TEST(Assembly, ParameterValidation) {
  const LevelSetDomain dom = mixed_domain();
  NitscheParams p = default_params(dom, 0.1);
  p.beta = -1.0;
  try {
    p.validate(dom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  p = default_params(dom, 0.1, 0.5);
  EXPECT_THROW(p.validate(dom), Error);
}

} // namespace
} // namespace cutfem
