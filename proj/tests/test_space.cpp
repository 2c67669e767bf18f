#include <gtest/gtest.h>

#include "cutfem/assembly.hpp"
#include "cutfem/space.hpp"

#include <cmath>
#include <random>

namespace cutfem {
namespace {

const Box square{Point(-1.0, -1.0), Point(1.0, 1.0)};
const Box unit_box{Point(0.0, 0.0), Point(1.0, 1.0)};

std::shared_ptr<const Discretization> mixed_disk(int n, Point shift = Point(0.013, 0.007)) {
  return discretize(LevelSetDomain(Point::Zero(), 0.7, {{0.0, pi}}), square, n, shift);
}

TEST(Space, DofMapInvariants) {
  const auto d = mixed_disk(8);
  std::vector<bool> touched(d->mesh.vertices.size(), false);
  for (int t : d->topology.active)
    for (int v : d->mesh.triangles[t]) touched[v] = true;
  int count = 0;
  for (std::size_t v = 0; v < touched.size(); ++v) {
    EXPECT_EQ(touched[v], d->dofs.vertex_dof[v] >= 0);
    if (touched[v]) {
      EXPECT_EQ(d->dofs.dof_vertex[d->dofs.vertex_dof[v]], static_cast<int>(v));
      ++count;
    }
  }
  EXPECT_EQ(count, d->ndof());
  for (std::size_t k = 0; k < d->topology.active.size(); ++k)
    for (int i = 0; i < 3; ++i)
      EXPECT_EQ(d->dofs.cell_dofs[k][i], d->dofs.vertex_dof[d->mesh.triangles[d->topology.active[k]][i]]);
}

TEST(Space, AffineReproduction) {
  const auto d = mixed_disk(8);
  const FeFunction one = nodal_interpolate([](const Point&) { return 1.0; }, d);
  const FeFunction x = nodal_interpolate([](const Point& p) { return p.x(); }, d);
  for (int t : d->topology.active) {
    const Triangle tri = d->mesh.triangle(t);
    const Point c = (tri[0] + tri[1] + tri[2]) / 3.0;
    EXPECT_NEAR(evaluate(one, t, c), 1.0, 1e-14);
    EXPECT_NEAR(evaluate(x, t, c), c.x(), 1e-14);
    EXPECT_LE((gradient(x, t) - Vector2(1.0, 0.0)).norm(), 1e-12);
  }
}

TEST(Space, GradientMatchesFiniteDifferences) {
  const auto d = mixed_disk(8);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::VectorXd c(d->ndof());
  for (int i = 0; i < d->ndof(); ++i) c[i] = g(rng);
  const FeFunction f(d, c);
  const double step = 1e-6;
  for (int t : d->topology.active) {
    const Triangle tri = d->mesh.triangle(t);
    const Point x = (tri[0] + tri[1] + tri[2]) / 3.0;
    const Vector2 fd((evaluate(f, t, x + Vector2(step, 0)) - evaluate(f, t, x - Vector2(step, 0))) / (2 * step),
                     (evaluate(f, t, x + Vector2(0, step)) - evaluate(f, t, x - Vector2(0, step))) / (2 * step));
    EXPECT_LE((fd - gradient(f, t)).norm(), 1e-7 * (1.0 + fd.norm()));
  }
}

TEST(Space, InactiveTriangleThrows) {
  const auto d = mixed_disk(8);
  int inactive = -1;
  for (int t = 0; t < static_cast<int>(d->mesh.triangles.size()); ++t)
    if (!d->topology.is_active(t)) inactive = t;
  ASSERT_GE(inactive, 0);
  const FeFunction z = FeFunction::zero(d);
  EXPECT_THROW(evaluate(z, inactive, Point::Zero()), Error);
  EXPECT_THROW(gradient(z, inactive), Error);
  EXPECT_THROW(FeFunction(d, Eigen::VectorXd::Zero(3)), Error);
}

TEST(Space, JumpOfAffineVanishes) {
  const auto d = mixed_disk(10);
  const FeFunction f = nodal_interpolate([](const Point& p) { return 0.3 - 2.0 * p.x() + 0.7 * p.y(); }, d);
  for (int face : d->topology.boundary_faces) EXPECT_NEAR(jump_normal_gradient(f, face), 0.0, 1e-12);
}

TEST(Space, JumpOfHatByHand) {
  // Two triangles of the unit square, both cut by a disk covering the diagonal.
  const auto d = discretize(LevelSetDomain::dirichlet_disk(Point(0.5, 0.5), 0.6), unit_box, 1);
  ASSERT_EQ(d->ndof(), 4);
  ASSERT_EQ(d->topology.boundary_faces.size(), 1u);
  const int face = d->topology.boundary_faces[0];
  // Hat at (1,0) lives on the lower triangle only: φ = x − y there, normal (−1,1)/√2.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c[d->dofs.vertex_dof[1]] = 1.0;
  const FeFunction hat(d, c);
  EXPECT_NEAR(jump_normal_gradient(hat, face), -std::sqrt(2.0), 1e-14);
  const FeFunction twice(d, 2.0 * c);
  EXPECT_NEAR(jump_normal_gradient(twice, face), -2.0 * std::sqrt(2.0), 1e-14);

  int boundary_face = -1;
  for (int f = 0; f < static_cast<int>(d->mesh.faces.size()); ++f)
    if (!d->mesh.faces[f].interior()) boundary_face = f;
  EXPECT_THROW(jump_normal_gradient(hat, boundary_face), Error);
}

TEST(Space, ClementReproducesAffines) {
  const auto d = mixed_disk(8);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    auto f = [=](const Point& p) { return a + b * p.x() + c * p.y(); };
    const FeFunction pi_f = clement_interpolate(f, d);
    for (int dof = 0; dof < d->ndof(); ++dof)
      EXPECT_NEAR(pi_f.coefficients[dof], f(d->mesh.vertices[d->dofs.dof_vertex[dof]]), 1e-12);
  }
}

TEST(Space, ClementOfAffineHasZeroStabilization) {
  const auto d = mixed_disk(12);
  const FeFunction f = clement_interpolate([](const Point& p) { return 1.0 + p.x() - 3.0 * p.y(); }, d);
  const SparseMatrix S = assemble_s_h(*d, 0.1);
  const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(d->ndof(), -1.0, 2.0).array().sin();
  EXPECT_LE(std::abs(f.coefficients.dot(S * f.coefficients)), 1e-12 * r.dot(S * r));
}

TEST(Space, ClementH1RateOnSmoothFunction) {
  auto u = [](const Point& p) { return std::sin(2.0 * p.x()) * std::cos(p.y()); };
  auto grad = [](const Point& p) {
    return Vector2(2.0 * std::cos(2.0 * p.x()) * std::cos(p.y()), -std::sin(2.0 * p.x()) * std::sin(p.y()));
  };
  std::vector<double> err, hs;
  for (int n : {8, 16, 32, 64}) {
    const auto d = mixed_disk(n);
    const FeFunction pi_u = clement_interpolate(u, d);
    double e = 0.0;
    for (std::size_t k = 0; k < d->topology.active.size(); ++k) {
      const int t = d->topology.active[k];
      const Vector2 gh = gradient(pi_u, t);
      e += d->rules.volume[k].integrate([&](const Point& x) { return (grad(x) - gh).squaredNorm(); });
    }
    err.push_back(std::sqrt(e));
    hs.push_back(d->h());
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double rate = std::log(err[k - 1] / err[k]) / std::log(hs[k - 1] / hs[k]);
    EXPECT_GT(rate, 0.85);
    EXPECT_LT(rate, 1.3);
  }
}

} // namespace
} // namespace cutfem
