#include "cutfem/quadrature.hpp"

#include "cutfem/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cutfem {

double QuadRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadRule::append(const QuadRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  normals.insert(normals.end(), other.normals.begin(), other.normals.end());
}

QuadRule triangle_rule(const Triangle& t, int points_per_direction) {
  const GaussRule1d& g = gauss_legendre(points_per_direction);
  QuadRule rule;
  const double jac = 2.0 * std::abs(signed_area(t));
  const Vector2 e1 = t[1] - t[0];
  const Vector2 e2 = t[2] - t[0];
  rule.points.reserve(g.nodes.size() * g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double xi = g.nodes[i];
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double eta = g.nodes[j] * (1.0 - xi);
      rule.points.emplace_back(t[0] + xi * e1 + eta * e2);
      rule.weights.push_back(jac * g.weights[i] * g.weights[j] * (1.0 - xi));
    }
  }
  return rule;
}

double DiskClip::area(double radius) const {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % polygon.size()];
    a += 0.5 * (p.x() * q.y() - p.y() * q.x());
  }
  for (const Arc& arc : arcs) a += 0.5 * radius * radius * (arc.span - std::sin(arc.span));
  return a;
}

namespace {

struct BoundaryVertex {
  Point x;
  bool on_circle;
};

Point snap(const Point& x, const Point& c, double radius) {
  const Vector2 d = x - c;
  return c + radius * d / d.norm();
}

// Inscribed square plus four quarter segments.
DiskClip whole_disk(const Point& c, double radius) {
  DiskClip clip;
  clip.full_disk = true;
  for (int k = 0; k < 4; ++k) {
    const double a = 0.5 * pi * k;
    clip.polygon.emplace_back(c + radius * Vector2(std::cos(a), std::sin(a)));
    clip.arcs.push_back({a, 0.5 * pi});
  }
  return clip;
}

} // namespace

DiskClip clip_triangle_disk(const Triangle& t, const Point& c, double radius) {
  DiskClip clip;
  const double r2 = radius * radius;
  const double on_tol = 1e-13 * radius;
  std::vector<BoundaryVertex> ring;
  for (int k = 0; k < 3; ++k) {
    const Point& a = t[k];
    const Point& b = t[(k + 1) % 3];
    const double phi_a = (a - c).norm() - radius;
    ring.push_back({a, std::abs(phi_a) <= on_tol});
    const Vector2 d = b - a;
    const Vector2 ac = a - c;
    const double qa = d.squaredNorm();
    const double qb = 2.0 * d.dot(ac);
    const double qc = ac.squaredNorm() - r2;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
    double t1 = q / qa;
    double t2 = (q != 0.0) ? qc / q : t1;
    if (t1 > t2) std::swap(t1, t2);
    constexpr double eta = 1e-12;
    for (double s : {t1, t2}) {
      if (s > eta && s < 1.0 - eta) ring.push_back({snap(a + s * d, c, radius), true});
    }
  }
  const std::size_t n = ring.size();
  std::vector<char> inside(n);
  bool any_in = false;
  bool any_out = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point mid = 0.5 * (ring[i].x + ring[(i + 1) % n].x);
    inside[i] = (mid - c).squaredNorm() < r2;
    any_in = any_in || inside[i];
    any_out = any_out || !inside[i];
  }
  if (!any_out) {
    clip.full_triangle = true;
    clip.polygon.assign(t.begin(), t.end());
    return clip;
  }
  if (!any_in) {
    if (triangle_contains(t, c, 0.0) && point_triangle_distance(c, t) == 0.0) {
      // The centre is inside T and no edge enters the disk: the disk lies in T.
      bool edges_clear = true;
      for (int k = 0; k < 3; ++k) {
        const Point& a = t[k];
        const Point& b = t[(k + 1) % 3];
        const Vector2 d = b - a;
        const double s = std::clamp((c - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        if ((a + s * d - c).norm() < radius) edges_clear = false;
      }
      if (edges_clear) return whole_disk(c, radius);
    }
    clip.empty = true;
    return clip;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside[i] && !inside[(i + n - 1) % n]) {
      start = i;
      break;
    }
  }
  auto push_unique = [&](const Point& p) {
    if (clip.polygon.empty() || (clip.polygon.back() - p).norm() > 1e-15 * radius) clip.polygon.push_back(p);
  };
  auto add_arc = [&](const Point& from, const Point& to) {
    const double a0 = wrap_angle(std::atan2(from.y() - c.y(), from.x() - c.x()));
    const double a1 = wrap_angle(std::atan2(to.y() - c.y(), to.x() - c.x()));
    const double span = wrap_angle(a1 - a0);
    if (span > 1e-14 && span < two_pi - 1e-14) clip.arcs.push_back({a0, span});
  };
  Point exit_point = ring[start].x;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    const std::size_t prev = (i + n - 1) % n;
    if (inside[i]) {
      if (!inside[prev] && k > 0) add_arc(exit_point, ring[i].x);
      push_unique(ring[i].x);
      push_unique(ring[(i + 1) % n].x);
    } else if (inside[prev]) {
      exit_point = ring[i].x;
    }
  }
  // Close the last outside run back to the starting entry point.
  add_arc(exit_point, ring[start].x);
  if (clip.polygon.size() > 1 && (clip.polygon.front() - clip.polygon.back()).norm() <= 1e-15 * radius)
    clip.polygon.pop_back();
  return clip;
}

double exact_intersection_area(const Triangle& t, const LevelSetDomain& domain) {
  const DiskClip clip = clip_triangle_disk(t, domain.center(), domain.radius());
  if (clip.empty) return 0.0;
  return clip.area(domain.radius());
}

namespace {

void append_triangle(QuadRule& rule, const Triangle& t, int m) {
  if (std::abs(signed_area(t)) == 0.0) return;
  rule.append(triangle_rule(t, m));
}

// Region between the chord and the arc from `start` spanning `span` (< π/2).
void append_segment(QuadRule& rule, const Point& c, double radius, double start, double span, int m_theta,
                    int m_r) {
  const GaussRule1d& gt = gauss_legendre(m_theta);
  const GaussRule1d& gr = gauss_legendre(m_r);
  const double half = 0.5 * span;
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    const double theta = start + span * gt.nodes[i];
    const double rc = radius * std::cos(half) / std::cos(theta - start - half);
    const Vector2 e(std::cos(theta), std::sin(theta));
    for (std::size_t j = 0; j < gr.nodes.size(); ++j) {
      const double r = rc + (radius - rc) * gr.nodes[j];
      rule.points.emplace_back(c + r * e);
      rule.weights.push_back(span * gt.weights[i] * (radius - rc) * gr.weights[j] * r);
    }
  }
}

void append_arc_region(QuadRule& rule, const Point& c, double radius, double start, double span, int m_theta,
                       int m_r, int m_tri) {
  if (span <= 0.5 * pi) {
    append_segment(rule, c, radius, start, span, m_theta, m_r);
    return;
  }
  const double mid = start + 0.5 * span;
  const Point p = c + radius * Vector2(std::cos(start), std::sin(start));
  const Point q = c + radius * Vector2(std::cos(start + span), std::sin(start + span));
  const Point pm = c + radius * Vector2(std::cos(mid), std::sin(mid));
  append_triangle(rule, {p, pm, q}, m_tri);
  append_arc_region(rule, c, radius, start, 0.5 * span, m_theta, m_r, m_tri);
  append_arc_region(rule, c, radius, mid, 0.5 * span, m_theta, m_r, m_tri);
}

// Rule on a single (sub)triangle without grading; returns the closed-form area alongside.
double append_clipped(QuadRule& rule, const Triangle& t, const LevelSetDomain& domain, const QuadratureOptions& opt,
                      int m_theta) {
  const Point& c = domain.center();
  const double radius = domain.radius();
  bool all_in = true;
  for (const auto& p : t) all_in = all_in && (p - c).norm() <= radius;
  if (all_in) {
    append_triangle(rule, t, opt.volume_points);
    return std::abs(signed_area(t));
  }
  const DiskClip clip = clip_triangle_disk(t, c, radius);
  if (clip.empty) return 0.0;
  if (clip.full_triangle) {
    append_triangle(rule, t, opt.volume_points);
    return std::abs(signed_area(t));
  }
  for (std::size_t i = 1; i + 1 < clip.polygon.size(); ++i)
    append_triangle(rule, {clip.polygon[0], clip.polygon[i], clip.polygon[i + 1]}, opt.volume_points);
  for (const auto& arc : clip.arcs)
    append_arc_region(rule, c, radius, arc.start, arc.span, m_theta, opt.volume_points, opt.volume_points);
  return clip.area(radius);
}

bool contains_sigma(const Triangle& t, const LevelSetDomain& domain) {
  for (const auto& z : domain.sigma())
    if (triangle_contains(t, z.position, 1e-10)) return true;
  return false;
}

double append_graded(QuadRule& rule, const Triangle& t, const LevelSetDomain& domain, const QuadratureOptions& opt,
                     int m_theta, int depth) {
  if (depth <= 0 || !contains_sigma(t, domain)) return append_clipped(rule, t, domain, opt, m_theta);
  const Point m01 = 0.5 * (t[0] + t[1]);
  const Point m12 = 0.5 * (t[1] + t[2]);
  const Point m20 = 0.5 * (t[2] + t[0]);
  double area = 0.0;
  area += append_graded(rule, {t[0], m01, m20}, domain, opt, m_theta, depth - 1);
  area += append_graded(rule, {m01, t[1], m12}, domain, opt, m_theta, depth - 1);
  area += append_graded(rule, {m20, m12, t[2]}, domain, opt, m_theta, depth - 1);
  area += append_graded(rule, {m01, m12, m20}, domain, opt, m_theta, depth - 1);
  return area;
}

} // namespace

QuadRule cut_volume_rule(const Triangle& t, const LevelSetDomain& domain, const QuadratureOptions& options) {
  const double area_t = std::abs(signed_area(t));
  double achieved = 0.0;
  for (int m_theta = std::max(1, options.segment_points); m_theta <= options.max_segment_points;
       m_theta = std::min(2 * m_theta, options.max_segment_points + (m_theta == options.max_segment_points))) {
    QuadRule rule;
    rule.tag = RegionTag::cut_volume;
    const double exact = append_graded(rule, t, domain, options, m_theta, options.grading_levels);
    achieved = std::abs(rule.measure() - exact);
    if (achieved <= options.tol * area_t) return rule;
    if (m_theta == options.max_segment_points) break;
  }
  std::ostringstream msg;
  msg << "cut_volume_rule: measure error " << achieved << " exceeds tolerance " << options.tol * area_t;
  throw Error(msg.str());
}

namespace {

void append_arc_piece(QuadRule& rule, const Point& c, double radius, double a0, double a1, int m) {
  const GaussRule1d& g = gauss_legendre(m);
  const double span = a1 - a0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double theta = a0 + span * g.nodes[i];
    const Vector2 e(std::cos(theta), std::sin(theta));
    rule.points.emplace_back(c + radius * e);
    rule.weights.push_back(radius * span * g.weights[i]);
    rule.normals.emplace_back(e);
  }
}

bool is_sigma_angle(const LevelSetDomain& domain, double angle) {
  for (const auto& z : domain.sigma()) {
    double d = wrap_angle(angle - z.angle);
    if (d > pi) d -= two_pi;
    if (std::abs(d) < 1e-12) return true;
  }
  return false;
}

// Splits [a0, a1] geometrically toward the ends flagged as interface points.
void append_graded_piece(QuadRule& rule, const LevelSetDomain& domain, double a0, double a1, bool grade_start,
                         bool grade_end, const QuadratureOptions& opt) {
  const Point& c = domain.center();
  const double radius = domain.radius();
  if (grade_start && grade_end) {
    const double mid = 0.5 * (a0 + a1);
    append_graded_piece(rule, domain, a0, mid, true, false, opt);
    append_graded_piece(rule, domain, mid, a1, false, true, opt);
    return;
  }
  if (!grade_start && !grade_end) {
    append_arc_piece(rule, c, radius, a0, a1, opt.arc_points);
    return;
  }
  const double len = a1 - a0;
  double inner = len;
  std::vector<double> cuts;
  for (int k = 0; k < opt.arc_grading_levels; ++k) {
    inner *= opt.arc_grading_ratio;
    cuts.push_back(inner);
  }
  // cuts: distances from the singular end, decreasing.
  double outer = len;
  for (double d : cuts) {
    if (grade_start) append_arc_piece(rule, c, radius, a0 + d, a0 + outer, opt.arc_points);
    else append_arc_piece(rule, c, radius, a1 - outer, a1 - d, opt.arc_points);
    outer = d;
  }
  if (grade_start) append_arc_piece(rule, c, radius, a0, a0 + outer, opt.arc_points);
  else append_arc_piece(rule, c, radius, a1 - outer, a1, opt.arc_points);
}

} // namespace

BoundaryRules cut_boundary_rule(const Triangle& t, const LevelSetDomain& domain, const QuadratureOptions& options) {
  BoundaryRules rules;
  const DiskClip clip = clip_triangle_disk(t, domain.center(), domain.radius());
  if (clip.empty || clip.full_triangle) return rules;
  std::vector<DiskClip::Arc> arcs = clip.arcs;
  if (clip.full_disk) arcs = {{0.0, two_pi}};
  std::vector<double> breaks;
  for (const auto& z : domain.sigma()) breaks.push_back(z.angle);
  breaks.insert(breaks.end(), options.arc_breaks.begin(), options.arc_breaks.end());
  for (const auto& arc : arcs) {
    std::vector<double> offsets = {0.0, arc.span};
    for (double b : breaks) {
      const double o = wrap_angle(b - arc.start);
      if (o > 1e-14 && o < arc.span - 1e-14) offsets.push_back(o);
    }
    std::sort(offsets.begin(), offsets.end());
    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
      const double a0 = arc.start + offsets[k];
      const double a1 = arc.start + offsets[k + 1];
      if (a1 - a0 <= 1e-15) continue;
      const bool dirichlet = domain.dirichlet_at_angle(0.5 * (a0 + a1));
      QuadRule& target = dirichlet ? rules.dirichlet : rules.neumann;
      append_graded_piece(target, domain, a0, a1, is_sigma_angle(domain, a0), is_sigma_angle(domain, a1), options);
    }
  }
  return rules;
}

QuadRule face_rule(const Point& a, const Point& b) {
  QuadRule rule;
  rule.tag = RegionTag::face;
  const GaussRule1d& g = gauss_legendre(2);
  const double len = (b - a).norm();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    rule.points.emplace_back(a + g.nodes[i] * (b - a));
    rule.weights.push_back(len * g.weights[i]);
  }
  return rule;
}

RuleSet build_rules(const BackgroundMesh& mesh, const CutTopology& topology, const LevelSetDomain& domain,
                    const QuadratureOptions& options) {
  RuleSet set;
  set.options = options;
  set.volume.resize(topology.active.size());
  set.boundary.resize(topology.active.size());
  for (std::size_t k = 0; k < topology.active.size(); ++k) {
    const int t = topology.active[k];
    const Triangle tri = mesh.triangle(t);
    if (topology.classification[t] == CellKind::inside) {
      set.volume[k] = triangle_rule(tri, options.volume_points);
    } else {
      set.volume[k] = cut_volume_rule(tri, domain, options);
      set.boundary[k] = cut_boundary_rule(tri, domain, options);
    }
  }
  return set;
}

} // namespace cutfem
