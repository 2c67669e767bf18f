#ifndef CUTFEM_QUADRATURE_HPP
#define CUTFEM_QUADRATURE_HPP

#include "cutfem/geometry.hpp"
#include "cutfem/mesh.hpp"
#include "cutfem/types.hpp"

#include <vector>

namespace cutfem {

enum class RegionTag { cut_volume, cut_boundary_dirichlet, cut_boundary_neumann, face };

struct QuadRule {
  RegionTag tag = RegionTag::cut_volume;
  std::vector<Point> points;
  std::vector<double> weights;
  /// Outward unit normals, boundary rules only.
  std::vector<Vector2> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double measure() const;
  void append(const QuadRule& other);

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

struct QuadratureOptions {
  /// Relative tolerance on the measure of every cut volume.
  double tol = 1e-10;
  /// Gauss points per direction for the collapsed triangle rule (exact to degree 2m-2).
  int volume_points = 5;
  /// Starting angular point count in circular segments; raised until `tol` is met.
  int segment_points = 5;
  int max_segment_points = 64;
  /// Gauss points per boundary arc piece.
  int arc_points = 6;
  /// Levels of quadrisection toward interface points inside cut triangles.
  int grading_levels = 14;
  /// Geometric grading of boundary arc pieces that end at an interface point.
  int arc_grading_levels = 12;
  double arc_grading_ratio = 0.15;
  /// Additional angles at which boundary arcs are split.
  std::vector<double> arc_breaks;
};

struct BoundaryRules {
  QuadRule dirichlet{RegionTag::cut_boundary_dirichlet, {}, {}, {}};
  QuadRule neumann{RegionTag::cut_boundary_neumann, {}, {}, {}};
};

/// Collapsed tensor Gauss rule on a full triangle.
QuadRule triangle_rule(const Triangle& t, int points_per_direction);

/// Exact decomposition of T ∩ disk into a convex polygon plus circular segments.
struct DiskClip {
  struct Arc {
    double start = 0.0; ///< angle of the first endpoint
    double span = 0.0;  ///< counter-clockwise angular length
  };
  bool empty = false;
  bool full_triangle = false;
  bool full_disk = false;
  std::vector<Point> polygon;
  std::vector<Arc> arcs;

  double area(double radius) const;
};

DiskClip clip_triangle_disk(const Triangle& t, const Point& center, double radius);

/// |T ∩ Ω| from the closed-form clip.
double exact_intersection_area(const Triangle& t, const LevelSetDomain& domain);

/// Rule for T ∩ Ω. Throws if the segment point budget is exhausted before the measure
/// matches the closed form to tol·|T|.
QuadRule cut_volume_rule(const Triangle& t, const LevelSetDomain& domain, const QuadratureOptions& options);

/// Rules for T ∩ ∂Ω split into purely Dirichlet and purely Neumann arc pieces.
BoundaryRules cut_boundary_rule(const Triangle& t, const LevelSetDomain& domain,
                                const QuadratureOptions& options);

/// Two-point Gauss rule on the straight face [a, b].
QuadRule face_rule(const Point& a, const Point& b);

/// Rules for every active triangle, indexed by position in topology.active.
struct RuleSet {
  std::vector<QuadRule> volume;
  std::vector<BoundaryRules> boundary;
  QuadratureOptions options;
};

RuleSet build_rules(const BackgroundMesh& mesh, const CutTopology& topology, const LevelSetDomain& domain,
                    const QuadratureOptions& options);

} // namespace cutfem

#endif // CUTFEM_QUADRATURE_HPP
