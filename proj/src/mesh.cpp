#include "cutfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace cutfem {

Vector2 BackgroundMesh::face_normal(int f) const {
  const Vector2 d = vertices[faces[f].vertices[1]] - vertices[faces[f].vertices[0]];
  return Vector2(d.y(), -d.x()) / d.norm();
}

BackgroundMesh build_background(const Box& box, int n, const Point& shift) {
  if (n < 1) throw Error("build_background: need at least one subdivision per side");
  const Vector2 extent = box.upper - box.lower;
  if (!(extent.x() > 0.0 && extent.y() > 0.0)) throw Error("build_background: degenerate box");
  BackgroundMesh mesh;
  mesh.n = n;
  const Vector2 cell = extent / n;
  mesh.h = cell.norm();
  const Point origin = box.lower + shift;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(origin + Vector2(i * cell.x(), j * cell.y()));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  std::map<std::pair<int, int>, int> edge_index;
  mesh.triangle_faces.resize(mesh.triangles.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& v = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = v[(k + 1) % 3];
      const int b = v[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        Face face;
        face.vertices = {a, b};
        face.triangles = {t, -1};
        edge_index.emplace(key, static_cast<int>(mesh.faces.size()));
        mesh.triangle_faces[t][k] = static_cast<int>(mesh.faces.size());
        mesh.faces.push_back(face);
      } else {
        mesh.faces[it->second].triangles[1] = t;
        mesh.triangle_faces[t][k] = it->second;
      }
    }
  }
  mesh.vertex_triangles.resize(mesh.vertices.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
    for (int v : mesh.triangles[t]) mesh.vertex_triangles[v].push_back(t);
  return mesh;
}

MeshQuality mesh_quality(const BackgroundMesh& mesh) {
  MeshQuality q;
  q.min_angle = pi;
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const Triangle tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) {
      const Vector2 a = tri[(k + 1) % 3] - tri[k];
      const Vector2 b = tri[(k + 2) % 3] - tri[k];
      q.min_angle = std::min(q.min_angle, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
    }
    const double d = diameter(tri);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  q.diameter_ratio = dmax / dmin;
  return q;
}

bool triangle_contains(const Triangle& t, const Point& x, double tol) {
  const double area = signed_area(t);
  const double scale = tol * std::abs(area);
  for (int k = 0; k < 3; ++k) {
    const Triangle sub = {x, t[(k + 1) % 3], t[(k + 2) % 3]};
    if (signed_area(sub) * (area > 0 ? 1.0 : -1.0) < -scale) return false;
  }
  return true;
}

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Vector2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * d)).norm();
}

} // namespace

double point_triangle_distance(const Point& x, const Triangle& t) {
  if (triangle_contains(t, x, 0.0)) return 0.0;
  return std::min({point_segment_distance(x, t[0], t[1]), point_segment_distance(x, t[1], t[2]),
                   point_segment_distance(x, t[2], t[0])});
}

std::vector<int> CutTopology::cut_triangles() const {
  std::vector<int> cut;
  for (int t : active)
    if (classification[t] == CellKind::cut) cut.push_back(t);
  return cut;
}

CutTopology classify(const BackgroundMesh& mesh, const LevelSetDomain& domain, double tol) {
  CutTopology topo;
  const int nt = static_cast<int>(mesh.triangles.size());
  topo.classification.resize(nt);
  topo.active_index.assign(nt, -1);
  const double band = tol * mesh.h;
  for (int t = 0; t < nt; ++t) {
    const Triangle tri = mesh.triangle(t);
    double phi_max = -std::numeric_limits<double>::infinity();
    double vertex_gap = std::numeric_limits<double>::infinity();
    for (const auto& p : tri) {
      const double phi = signed_distance(domain, p);
      phi_max = std::max(phi_max, phi);
      vertex_gap = std::min(vertex_gap, std::abs(phi));
    }
    const double phi_min = point_triangle_distance(domain.center(), tri) - domain.radius();
    CellKind kind;
    if (phi_max <= 0.0) {
      kind = CellKind::inside;
    } else if (phi_min < -band) {
      kind = CellKind::cut;
    } else if (phi_min > band || vertex_gap <= band) {
      // Touching at a vertex leaves a set of zero measure.
      kind = CellKind::outside;
    } else {
      std::ostringstream msg;
      msg << "classify: ambiguous tangential intersection with triangle " << t << " (gap " << phi_min << ")";
      throw Error(msg.str());
    }
    topo.classification[t] = kind;
    if (kind != CellKind::outside) {
      topo.active_index[t] = static_cast<int>(topo.active.size());
      topo.active.push_back(t);
    }
  }
  topo.boundary_faces = boundary_face_set(mesh, topo);
  return topo;
}

std::vector<int> boundary_face_set(const BackgroundMesh& mesh, const CutTopology& topology) {
  std::vector<int> faces;
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    const Face& face = mesh.faces[f];
    if (!face.interior()) continue;
    const int t0 = face.triangles[0];
    const int t1 = face.triangles[1];
    if (!topology.is_active(t0) || !topology.is_active(t1)) continue;
    if (topology.is_cut(t0) || topology.is_cut(t1)) faces.push_back(f);
  }
  return faces;
}

Region predicate_region(std::function<bool(const Point&)> inside, int levels) {
  return Region{[inside = std::move(inside), levels](const Triangle& t) {
    const int m = 1 << levels;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m - i; ++j) {
        const double a = static_cast<double>(i) / m;
        const double b = static_cast<double>(j) / m;
        const Point x = (1.0 - a - b) * t[0] + a * t[1] + b * t[2];
        if (inside(x)) return true;
      }
    }
    return false;
  }};
}

Region empty_region() {
  return Region{[](const Triangle&) { return false; }};
}

Region domain_region(const LevelSetDomain& domain, double tol) {
  return Region{[domain, tol](const Triangle& t) {
    return point_triangle_distance(domain.center(), t) - domain.radius() < -tol * diameter(t);
  }};
}

Region sigma_collar_region(const LevelSetDomain& domain, double epsilon) {
  return Region{[domain, epsilon](const Triangle& t) {
    constexpr int samples = 64;
    for (const SigmaPoint& z : domain.sigma()) {
      const double span = epsilon / domain.radius();
      const double dir = -static_cast<double>(z.dirichlet_side);
      for (int k = 0; k <= samples; ++k) {
        const double angle = z.angle + dir * span * k / samples;
        if (triangle_contains(t, domain.boundary_point(angle))) return true;
      }
    }
    return false;
  }};
}

std::vector<int> submesh(const BackgroundMesh& mesh, const CutTopology& topology, const Region& region) {
  std::vector<int> result;
  for (int t : topology.active)
    if (region.intersects(mesh.triangle(t))) result.push_back(t);
  return result;
}

} // namespace cutfem
