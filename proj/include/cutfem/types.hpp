#ifndef CUTFEM_TYPES_HPP
#define CUTFEM_TYPES_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cutfem {

using Point = Eigen::Vector2d;
using Vector2 = Eigen::Vector2d;
using Triangle = std::array<Point, 3>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Raised for every violated precondition and numerical failure in the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Angle wrapped into [0, 2π).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t -= two_pi;
  return t;
}

inline double cross(const Vector2& a, const Vector2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double signed_area(const Triangle& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

inline double diameter(const Triangle& t) {
  return std::max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
}

} // namespace cutfem

#endif // CUTFEM_TYPES_HPP
