#ifndef CUTFEM_MESH_HPP
#define CUTFEM_MESH_HPP

#include "cutfem/geometry.hpp"
#include "cutfem/types.hpp"

#include <functional>
#include <vector>

namespace cutfem {

struct Box {
  Point lower = Point(-1.0, -1.0);
  Point upper = Point(1.0, 1.0);
};

/// A mesh edge. `triangles[0]` is the lower-index neighbour (side 1 of the normal jump);
/// `triangles[1]` is -1 on the box boundary.
struct Face {
  std::array<int, 2> vertices{};
  std::array<int, 2> triangles{-1, -1};
  bool interior() const { return triangles[1] >= 0; }
};

/// Structured background triangulation: each grid square split into two triangles along
/// its lower-left to upper-right diagonal. Triangles are counter-clockwise.
struct BackgroundMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Face> faces;
  /// Face index of the edge opposite local vertex k.
  std::vector<std::array<int, 3>> triangle_faces;
  std::vector<std::vector<int>> vertex_triangles;
  double h = 0.0;
  int n = 0;

  Triangle triangle(int t) const {
    const auto& v = triangles[t];
    return {vertices[v[0]], vertices[v[1]], vertices[v[2]]};
  }
  /// Unit normal of face f pointing out of triangles[0].
  Vector2 face_normal(int f) const;
  double face_length(int f) const {
    return (vertices[faces[f].vertices[1]] - vertices[faces[f].vertices[0]]).norm();
  }
};

BackgroundMesh build_background(const Box& box, int n, const Point& shift = Point::Zero());

/// Smallest interior angle over all triangles and max/min diameter ratio.
struct MeshQuality {
  double min_angle = 0.0;
  double diameter_ratio = 0.0;
};
MeshQuality mesh_quality(const BackgroundMesh& mesh);

enum class CellKind { inside, cut, outside };

struct CutTopology {
  std::vector<CellKind> classification;
  std::vector<int> active;       ///< triangles meeting Ω, ascending
  std::vector<int> active_index; ///< triangle -> position in `active`, -1 if inactive
  std::vector<int> boundary_faces;

  bool is_active(int t) const { return active_index[t] >= 0; }
  bool is_cut(int t) const { return classification[t] == CellKind::cut; }
  std::vector<int> cut_triangles() const;
};

/// Classifies every triangle against the domain. `tol` is relative to h; an intersection
/// that is tangential within tol·h away from any vertex is reported as an error.
CutTopology classify(const BackgroundMesh& mesh, const LevelSetDomain& domain, double tol = 1e-12);

/// All interior faces with two active neighbours, at least one of them cut.
std::vector<int> boundary_face_set(const BackgroundMesh& mesh, const CutTopology& topology);

/// A region ω of the plane, tested against triangles.
struct Region {
  std::function<bool(const Triangle&)> intersects;
};

/// ω given by a point predicate, sampled on a barycentric lattice refined `levels` times.
Region predicate_region(std::function<bool(const Point&)> inside, int levels = 6);
/// ω = ∅
Region empty_region();
/// ω = Ω
Region domain_region(const LevelSetDomain& domain, double tol = 1e-12);
/// ω = U_ε(Σ): boundary arcs of length ε on the Neumann side of each interface point.
Region sigma_collar_region(const LevelSetDomain& domain, double epsilon);

/// T_h(ω): the active triangles meeting ω.
std::vector<int> submesh(const BackgroundMesh& mesh, const CutTopology& topology, const Region& region);

/// Distance from x to the closed triangle.
double point_triangle_distance(const Point& x, const Triangle& t);
bool triangle_contains(const Triangle& t, const Point& x, double tol = 1e-12);

} // namespace cutfem

#endif // CUTFEM_MESH_HPP
