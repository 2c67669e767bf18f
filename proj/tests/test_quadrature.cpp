#include <gtest/gtest.h>

#include "cutfem/gauss.hpp"
#include "cutfem/quadrature.hpp"

#include <cmath>
#include <random>

namespace cutfem {
namespace {

const Box square{Point(-1.0, -1.0), Point(1.0, 1.0)};

struct Totals {
  double area = 0.0;
  double dirichlet = 0.0;
  double neumann = 0.0;
};

Totals totals(const BackgroundMesh& mesh, const CutTopology& topo, const RuleSet& rules) {
  Totals s;
  for (std::size_t k = 0; k < topo.active.size(); ++k) {
    s.area += rules.volume[k].measure();
    s.dirichlet += rules.boundary[k].dirichlet.measure();
    s.neumann += rules.boundary[k].neumann.measure();
  }
  (void)mesh;
  return s;
}

TEST(Gauss, LegendreExactness) {
  for (int m = 1; m <= 8; ++m) {
    const GaussRule1d& g = gauss_legendre(m);
    for (int p = 0; p <= 2 * m - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << "m=" << m << " p=" << p;
    }
  }
}

TEST(Gauss, AdaptiveLogIntegral) {
  const AdaptiveResult r = integrate_adaptive([](double t) { return 1.0 / (t + 1e-3); }, 0.0, 1.0, 1e-14);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::log(1.0 + 1e3), 1e-11);
}

TEST(Quadrature, TriangleRuleExactness) {
  const Triangle t{Point(0.1, 0.2), Point(1.3, -0.1), Point(0.4, 0.9)};
  const double area = signed_area(t);
  const QuadRule rule = triangle_rule(t, 3);
  EXPECT_NEAR(rule.measure(), area, 1e-15);
  // Degree 4: compare with the 10-point rule, which is exact well beyond.
  auto f = [](const Point& x) { return std::pow(x.x(), 3) * x.y() - 2 * x.x() * x.x() + x.y() - 1.0; };
  EXPECT_NEAR(rule.integrate(f), triangle_rule(t, 10).integrate(f), 1e-14);
  const QuadRule ref = triangle_rule({Point(0, 0), Point(1, 0), Point(0, 1)}, 2);
  EXPECT_NEAR(ref.measure(), 0.5, 1e-15);
}

TEST(Quadrature, ClipCases) {
  const Point c = Point::Zero();
  const DiskClip inside = clip_triangle_disk({Point(0, 0), Point(0.1, 0), Point(0, 0.1)}, c, 1.0);
  EXPECT_TRUE(inside.full_triangle);
  const DiskClip far = clip_triangle_disk({Point(3, 3), Point(4, 3), Point(3, 4)}, c, 1.0);
  EXPECT_TRUE(far.empty);
  const DiskClip disk = clip_triangle_disk({Point(-5, -5), Point(5, -5), Point(0, 5)}, c, 1.0);
  EXPECT_TRUE(disk.full_disk);
  EXPECT_NEAR(disk.area(1.0), pi, 1e-14);
  // Half disk: triangle above the x-axis covering the upper half.
  const DiskClip half = clip_triangle_disk({Point(-3, 0), Point(3, 0), Point(0, 5)}, c, 1.0);
  EXPECT_NEAR(half.area(1.0), 0.5 * pi, 1e-13);
}

TEST(Quadrature, DiskAreaAndPerimeter) {
  const LevelSetDomain d(Point(0.013, -0.021), 1.0, {{0.0, pi}});
  const Box box{Point(-1.5, -1.5), Point(1.5, 1.5)};
  for (int n : {7, 16, 32}) {
    const BackgroundMesh mesh = build_background(box, n);
    const CutTopology topo = classify(mesh, d);
    QuadratureOptions opt;
    opt.tol = 1e-10;
    const Totals s = totals(mesh, topo, build_rules(mesh, topo, d, opt));
    EXPECT_NEAR(s.area / pi, 1.0, 1e-8) << "n=" << n;
    EXPECT_NEAR((s.dirichlet + s.neumann) / two_pi, 1.0, 1e-8);
    EXPECT_NEAR(s.dirichlet / pi, 1.0, 1e-10);
  }
}

TEST(Quadrature, SecondMomentAndNormals) {
  const LevelSetDomain d = LevelSetDomain::dirichlet_disk(Point::Zero(), 1.0);
  const Box box{Point(-1.5, -1.5), Point(1.5, 1.5)};
  const BackgroundMesh mesh = build_background(box, 16);
  const CutTopology topo = classify(mesh, d);
  const RuleSet rules = build_rules(mesh, topo, d, {});
  double moment = 0.0;
  Vector2 normal_sum = Vector2::Zero();
  for (std::size_t k = 0; k < topo.active.size(); ++k) {
    moment += rules.volume[k].integrate([](const Point& x) { return x.squaredNorm(); });
    const QuadRule& b = rules.boundary[k].dirichlet;
    for (std::size_t q = 0; q < b.size(); ++q) {
      EXPECT_NEAR(b.normals[q].norm(), 1.0, 1e-14);
      EXPECT_GT(b.normals[q].dot(b.points[q]), 0.0);
      EXPECT_EQ(classify_boundary(d, b.points[q]), BoundaryPart::dirichlet);
      normal_sum += b.weights[q] * b.normals[q];
    }
    EXPECT_TRUE(rules.boundary[k].neumann.empty());
  }
  EXPECT_NEAR(moment, 0.5 * pi, 1e-7);
  EXPECT_LE(normal_sum.norm(), 1e-12);
}

TEST(Quadrature, DivergenceIdentity) {
  // v = (x² y, sin x + y): div v = 2xy + 1.
  const LevelSetDomain d(Point(0.1, 0.05), 0.7, {{1.0, 3.0}});
  const BackgroundMesh mesh = build_background(square, 16, Point(0.011, 0.007));
  const CutTopology topo = classify(mesh, d);
  const RuleSet rules = build_rules(mesh, topo, d, {});
  auto v = [](const Point& x) { return Vector2(x.x() * x.x() * x.y(), std::sin(x.x()) + x.y()); };
  double volume = 0.0, flux = 0.0;
  for (std::size_t k = 0; k < topo.active.size(); ++k) {
    volume += rules.volume[k].integrate([](const Point& x) { return 2 * x.x() * x.y() + 1.0; });
    for (const QuadRule* b : {&rules.boundary[k].dirichlet, &rules.boundary[k].neumann})
      for (std::size_t q = 0; q < b->size(); ++q)
        flux += b->weights[q] * v(b->points[q]).dot(b->normals[q]);
  }
  EXPECT_NEAR(volume, flux, 1e-9);
}

TEST(Quadrature, NeumannPointsClassifyNeumann) {
  const LevelSetDomain d(Point::Zero(), 0.7, {{0.3, 2.2}, {3.5, 4.0}});
  const BackgroundMesh mesh = build_background(square, 12, Point(0.02, 0.01));
  const CutTopology topo = classify(mesh, d);
  const RuleSet rules = build_rules(mesh, topo, d, {});
  for (std::size_t k = 0; k < topo.active.size(); ++k) {
    for (const Point& x : rules.boundary[k].dirichlet.points) EXPECT_EQ(classify_boundary(d, x), BoundaryPart::dirichlet);
    for (const Point& x : rules.boundary[k].neumann.points) EXPECT_EQ(classify_boundary(d, x), BoundaryPart::neumann);
  }
}

TEST(Quadrature, ToleranceRefinement) {
  const LevelSetDomain d = LevelSetDomain::dirichlet_disk(Point(0.02, -0.03), 0.7);
  const BackgroundMesh mesh = build_background(square, 8);
  const CutTopology topo = classify(mesh, d);
  std::vector<double> errors;
  for (double tol : {1e-3, 1e-4, 1e-5, 1e-6}) {
    QuadratureOptions opt;
    opt.tol = tol;
    opt.segment_points = 1;
    double total = 0.0;
    for (int t : topo.cut_triangles()) {
      const Triangle tri = mesh.triangle(t);
      const double err = std::abs(cut_volume_rule(tri, d, opt).measure() - exact_intersection_area(tri, d));
      EXPECT_LE(err, tol * std::abs(signed_area(tri)));
      total += err;
    }
    errors.push_back(total);
  }
  EXPECT_LE(errors.back(), errors.front() / 5.0);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  const LevelSetDomain d = LevelSetDomain::dirichlet_disk(Point::Zero(), 0.7);
  const BackgroundMesh mesh = build_background(square, 4);
  const CutTopology topo = classify(mesh, d);
  QuadratureOptions opt;
  opt.tol = 1e-15;
  opt.segment_points = 1;
  opt.max_segment_points = 1;
  opt.volume_points = 1;
  try {
    for (int t : topo.cut_triangles()) cut_volume_rule(mesh.triangle(t), d, opt);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("measure error"), std::string::npos);
  }
}

TEST(Quadrature, FaceRule) {
  const QuadRule r = face_rule(Point(0, 0), Point(3, 4));
  EXPECT_NEAR(r.measure(), 5.0, 1e-14);
  EXPECT_NEAR(r.integrate([](const Point& x) { return x.x() * x.x() * x.x(); }), 5.0 * 27.0 / 4.0, 1e-12);
}

} // namespace
} // namespace cutfem
