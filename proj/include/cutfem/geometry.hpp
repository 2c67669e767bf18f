#ifndef CUTFEM_GEOMETRY_HPP
#define CUTFEM_GEOMETRY_HPP

#include "cutfem/types.hpp"

#include <vector>

namespace cutfem {

/// Half-open angular interval [begin, end), measured counter-clockwise in radians.
struct AngularInterval {
  double begin = 0.0;
  double end = 0.0;
};

enum class BoundaryPart { dirichlet, neumann };

/// A point of the interface between the Dirichlet and Neumann parts of the boundary.
struct SigmaPoint {
  double angle = 0.0;
  Point position = Point::Zero();
  /// +1 when the Dirichlet part lies counter-clockwise of the point, -1 otherwise.
  int dirichlet_side = 1;
};

/// Analytic disk with a Dirichlet/Neumann partition of its boundary.
///
/// The level set is the signed distance |x - c| - R. Dirichlet arcs are normalized,
/// merged when they overlap or touch, and their endpoints form the interface set.
class LevelSetDomain {
public:
  LevelSetDomain(Point center, double radius, std::vector<AngularInterval> dirichlet_arcs);

  /// Whole boundary Dirichlet.
  static LevelSetDomain dirichlet_disk(Point center, double radius);

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<AngularInterval>& dirichlet_arcs() const { return arcs_; }
  const std::vector<SigmaPoint>& sigma() const { return sigma_; }

  bool pure_dirichlet() const { return full_dirichlet_; }
  bool pure_neumann() const { return arcs_.empty(); }

  double angle_of(const Point& x) const;
  Point boundary_point(double angle) const;
  /// Outward unit normal of the level curve through x (x != center).
  Vector2 normal(const Point& x) const;

  bool dirichlet_at_angle(double angle) const;
  double dirichlet_length() const;

  /// Smallest angular distance from `angle` to the interface set; returns the index of the
  /// nearest interface point through `nearest` and the signed offset through `offset`.
  double sigma_angular_distance(double angle, int* nearest = nullptr, double* offset = nullptr) const;

private:
  Point center_;
  double radius_;
  std::vector<AngularInterval> arcs_;
  std::vector<SigmaPoint> sigma_;
  bool full_dirichlet_ = false;
};

/// Collar widths of the tubular neighbourhoods, γ(t) = t + ε.
struct TubularParams {
  double delta = 0.1;
  double epsilon = 1e-3;
  double delta0 = 0.35;
  double epsilon0 = 0.1;

  void validate(const LevelSetDomain& domain) const;
};

/// δ = h, ε = 0.1 h², δ0 = R/2, ε0 = h.
TubularParams default_tubular(const LevelSetDomain& domain, double h);

struct RegionFlags {
  bool dirichlet_collar = false; ///< U_δ(∂Ω_D)
  bool sigma_collar = false;     ///< U_{δ,ε}
  bool tubular = false;          ///< U_δ, the union
};

double signed_distance(const LevelSetDomain& domain, const Point& x);
Point closest_point(const LevelSetDomain& domain, const Point& x);
BoundaryPart classify_boundary(const LevelSetDomain& domain, const Point& b, double tol = 1e-10);
RegionFlags membership(const LevelSetDomain& domain, const TubularParams& params, const Point& x);

/// C¹ smoothstep 1 - 3s² + 2s³ on [0,1], 1 below, 0 above.
double smoothstep_down(double s);
double smoothstep_down_derivative(double s);

double chi(const LevelSetDomain& domain, const TubularParams& params, const Point& x);

struct ChiGradientParts {
  Vector2 gradient = Vector2::Zero();
  double normal = 0.0;           ///< along the outward normal of the level curve
  double conormal = 0.0;         ///< along the boundary tangent pointing from Neumann into Dirichlet
  double sigma_tangential = 0.0; ///< identically zero in two dimensions
};

ChiGradientParts chi_gradient_parts(const LevelSetDomain& domain, const TubularParams& params,
                                    const Point& x);
inline Vector2 chi_gradient(const LevelSetDomain& domain, const TubularParams& params,
                            const Point& x) {
  return chi_gradient_parts(domain, params, x).gradient;
}

/// ∫ |∇_ν χ|² over the collar U_{δ,ε}(z) of the interface point with index `sigma_index`,
/// integrated in (depth, arc length) coordinates to relative tolerance `rel_tol`.
double nu_profile_integral(const LevelSetDomain& domain, const TubularParams& params,
                           int sigma_index, double rel_tol = 1e-6);

} // namespace cutfem

#endif // CUTFEM_GEOMETRY_HPP
