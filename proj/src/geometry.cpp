#include "cutfem/geometry.hpp"

#include "cutfem/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cutfem {

LevelSetDomain::LevelSetDomain(Point center, double radius, std::vector<AngularInterval> dirichlet_arcs)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw Error("LevelSetDomain: radius must be positive");
  std::vector<AngularInterval> arcs;
  for (const auto& arc : dirichlet_arcs) {
    const double length = arc.end - arc.begin;
    if (!(length > 0.0)) throw Error("LevelSetDomain: dirichlet arc with non-positive length");
    if (length >= two_pi) {
      full_dirichlet_ = true;
      break;
    }
    arcs.push_back({wrap_angle(arc.begin), wrap_angle(arc.begin) + length});
  }
  if (full_dirichlet_) {
    arcs_ = {{0.0, two_pi}};
    return;
  }
  std::sort(arcs.begin(), arcs.end(), [](auto& p, auto& q) { return p.begin < q.begin; });
  // Merge overlapping or touching arcs, including across the 2π seam.
  std::vector<AngularInterval> merged;
  for (const auto& arc : arcs) {
    if (!merged.empty() && arc.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, arc.end);
    } else {
      merged.push_back(arc);
    }
  }
  if (merged.size() > 1 && merged.back().end - two_pi >= merged.front().begin) {
    merged.back().end = std::max(merged.back().end, merged.front().end + two_pi);
    merged.erase(merged.begin());
  }
  if (merged.size() == 1 && merged.front().end - merged.front().begin >= two_pi) {
    full_dirichlet_ = true;
    arcs_ = {{0.0, two_pi}};
    return;
  }
  arcs_ = merged;
  for (const auto& arc : arcs_) {
    const double a = wrap_angle(arc.begin);
    const double b = wrap_angle(arc.end);
    sigma_.push_back({a, boundary_point(a), +1});
    sigma_.push_back({b, boundary_point(b), -1});
  }
}

LevelSetDomain LevelSetDomain::dirichlet_disk(Point center, double radius) {
  return LevelSetDomain(std::move(center), radius, {{0.0, two_pi}});
}

double LevelSetDomain::angle_of(const Point& x) const {
  const Vector2 d = x - center_;
  return wrap_angle(std::atan2(d.y(), d.x()));
}

Point LevelSetDomain::boundary_point(double angle) const {
  return center_ + radius_ * Vector2(std::cos(angle), std::sin(angle));
}

Vector2 LevelSetDomain::normal(const Point& x) const {
  const Vector2 d = x - center_;
  const double r = d.norm();
  if (r == 0.0) throw Error("normal: undefined at the disk center");
  return d / r;
}

bool LevelSetDomain::dirichlet_at_angle(double angle) const {
  if (full_dirichlet_) return true;
  const double t = wrap_angle(angle);
  for (const auto& arc : arcs_) {
    const double offset = wrap_angle(t - arc.begin);
    if (offset < arc.end - arc.begin) return true;
  }
  return false;
}

double LevelSetDomain::dirichlet_length() const {
  double total = 0.0;
  for (const auto& arc : arcs_) total += arc.end - arc.begin;
  return total * radius_;
}

double LevelSetDomain::sigma_angular_distance(double angle, int* nearest, double* offset) const {
  double best = std::numeric_limits<double>::infinity();
  int best_index = -1;
  double best_offset = 0.0;
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    double d = wrap_angle(angle - sigma_[i].angle);
    if (d > pi) d -= two_pi;
    if (std::abs(d) < best) {
      best = std::abs(d);
      best_index = static_cast<int>(i);
      best_offset = d;
    }
  }
  if (nearest) *nearest = best_index;
  if (offset) *offset = best_offset;
  return best;
}

void TubularParams::validate(const LevelSetDomain& domain) const {
  if (!(epsilon >= 0.0)) throw Error("tubular: epsilon must be non-negative");
  if (!(delta > 0.0)) throw Error("tubular: delta must be positive");
  if (epsilon > epsilon0) throw Error("tubular: epsilon exceeds epsilon0");
  if (delta > delta0) throw Error("tubular: delta exceeds delta0");
  if (delta0 >= domain.radius()) throw Error("tubular: delta0 must be below the radius");
}

TubularParams default_tubular(const LevelSetDomain& domain, double h) {
  TubularParams p;
  p.delta0 = 0.5 * domain.radius();
  p.delta = std::min(h, p.delta0);
  p.epsilon0 = h;
  p.epsilon = 0.1 * h * h;
  return p;
}

double signed_distance(const LevelSetDomain& domain, const Point& x) {
  return (x - domain.center()).norm() - domain.radius();
}

Point closest_point(const LevelSetDomain& domain, const Point& x) {
  const Vector2 d = x - domain.center();
  const double r = d.norm();
  if (r == 0.0) throw Error("closest_point: projection undefined at the disk center");
  return domain.center() + domain.radius() * d / r;
}

BoundaryPart classify_boundary(const LevelSetDomain& domain, const Point& b, double tol) {
  const double phi = signed_distance(domain, b);
  if (std::abs(phi) > tol * domain.radius()) {
    std::ostringstream msg;
    msg << "classify_boundary: point (" << b.x() << ", " << b.y() << ") is off the boundary by " << phi;
    throw Error(msg.str());
  }
  return domain.dirichlet_at_angle(domain.angle_of(b)) ? BoundaryPart::dirichlet : BoundaryPart::neumann;
}

RegionFlags membership(const LevelSetDomain& domain, const TubularParams& params, const Point& x) {
  RegionFlags flags;
  const double r = (x - domain.center()).norm();
  const double rho = domain.radius() - r;
  if (rho < 0.0 || r == 0.0) return flags;
  const double angle = domain.angle_of(x);
  if (rho < params.delta && domain.dirichlet_at_angle(angle)) flags.dirichlet_collar = true;
  if (rho <= params.delta && !domain.dirichlet_at_angle(angle) && !domain.sigma().empty()) {
    const double arc = r * domain.sigma_angular_distance(angle);
    if (arc < rho + params.epsilon) flags.sigma_collar = true;
  }
  flags.tubular = flags.dirichlet_collar || flags.sigma_collar;
  return flags;
}

double smoothstep_down(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double smoothstep_down_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (s - 1.0);
}

namespace {

// Local polar description of x shared by χ and its gradient.
struct CollarCoordinates {
  bool inside = false;
  double r = 0.0;
  double rho = 0.0;
  double angle = 0.0;
  bool dirichlet = true;
  double arc = 0.0;        // arc length to Σ along the level curve
  double dtheta = 0.0;     // angular distance to Σ
  double side = 0.0;       // d(dtheta)/d(angle)
};

CollarCoordinates collar_coordinates(const LevelSetDomain& domain, const Point& x) {
  CollarCoordinates c;
  c.r = (x - domain.center()).norm();
  const double phi = c.r - domain.radius();
  // Boundary quadrature points may sit a rounding error outside the disk.
  if (phi > 1e-12 * domain.radius() || c.r == 0.0) return c;
  c.inside = true;
  c.rho = std::max(0.0, -phi);
  c.angle = domain.angle_of(x);
  c.dirichlet = domain.dirichlet_at_angle(c.angle);
  if (!c.dirichlet && !domain.sigma().empty()) {
    double offset = 0.0;
    c.dtheta = domain.sigma_angular_distance(c.angle, nullptr, &offset);
    c.side = offset >= 0.0 ? 1.0 : -1.0;
    c.arc = c.r * c.dtheta;
  }
  return c;
}

} // namespace

double chi(const LevelSetDomain& domain, const TubularParams& params, const Point& x) {
  const CollarCoordinates c = collar_coordinates(domain, x);
  if (!c.inside || c.rho >= params.delta) return 0.0;
  const double w = smoothstep_down(c.rho / params.delta);
  if (c.dirichlet) return w;
  if (domain.sigma().empty()) return 0.0;
  const double gamma = c.rho + params.epsilon;
  if (gamma <= 0.0) return 0.0;
  return w * smoothstep_down(c.arc / gamma);
}

ChiGradientParts chi_gradient_parts(const LevelSetDomain& domain, const TubularParams& params,
                                    const Point& x) {
  ChiGradientParts parts;
  const CollarCoordinates c = collar_coordinates(domain, x);
  if (!c.inside || c.rho >= params.delta) return parts;
  const Vector2 e_r = (x - domain.center()) / c.r;
  const Vector2 e_theta(-e_r.y(), e_r.x());
  const double s = c.rho / params.delta;
  const double w = smoothstep_down(s);
  const double dw = smoothstep_down_derivative(s) / params.delta; // d w / d rho
  // ∇ρ = -e_r
  if (c.dirichlet) {
    parts.gradient = -dw * e_r;
  } else {
    if (domain.sigma().empty()) return parts;
    const double gamma = c.rho + params.epsilon;
    if (gamma <= 0.0) return parts;
    const double q = c.arc / gamma;
    const double m = smoothstep_down(q);
    const double dm = smoothstep_down_derivative(q);
    // a = r Δθ: ∇a = Δθ e_r + side e_θ; γ = ρ + ε: ∇γ = -e_r.
    const Vector2 grad_q = (c.dtheta * e_r + c.side * e_theta) / gamma + (c.arc / (gamma * gamma)) * e_r;
    parts.gradient = -dw * m * e_r + w * dm * grad_q;
    const Vector2 conormal = -c.side * e_theta;
    parts.conormal = parts.gradient.dot(conormal);
  }
  parts.normal = parts.gradient.dot(e_r);
  return parts;
}

double nu_profile_integral(const LevelSetDomain& domain, const TubularParams& params, int sigma_index,
                           double rel_tol) {
  if (sigma_index < 0 || sigma_index >= static_cast<int>(domain.sigma().size()))
    throw Error("nu_profile_integral: no interface point with index " + std::to_string(sigma_index));
  const SigmaPoint& z = domain.sigma()[sigma_index];
  const double neumann_dir = -static_cast<double>(z.dirichlet_side);
  const double radius = domain.radius();
  bool inner_failed = false;
  double inner_worst = 0.0;

  auto inner = [&](double t) {
    const double gamma = t + params.epsilon;
    const double r = radius - t;
    auto integrand = [&](double a) {
      const double angle = z.angle + neumann_dir * a / r;
      const Point x = domain.center() + r * Vector2(std::cos(angle), std::sin(angle));
      const double g = chi_gradient_parts(domain, params, x).conormal;
      return g * g;
    };
    const AdaptiveResult res = integrate_adaptive(integrand, 0.0, gamma, 0.1 * rel_tol, 0.0, 30);
    if (!res.converged) {
      inner_failed = true;
      inner_worst = std::max(inner_worst, res.error);
    }
    return res.value;
  };
  const AdaptiveResult outer = integrate_adaptive(inner, 0.0, params.delta, rel_tol, 0.0, 60);
  if (!outer.converged || inner_failed) {
    std::ostringstream msg;
    msg << "nu_profile_integral: quadrature did not converge, estimate " << outer.value << " with error "
        << std::max(outer.error, inner_worst);
    throw Error(msg.str());
  }
  return outer.value;
}

} // namespace cutfem
