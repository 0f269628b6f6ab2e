#ifndef MYOHAND_GEOMETRY_HPP
#define MYOHAND_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "myohand/dual.hpp"
#include "myohand/errors.hpp"

namespace myohand {

// Lengths are millimeters everywhere. Angles crossing a public interface are
// degrees; everything below that boundary works in radians.

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

template <typename T>
struct Vec2 {
  T x{}, y{};

  bool operator==(const Vec2&) const = default;
  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const T& s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(const Vec2& a, const T& s) { return {s * a.x, s * a.y}; }
};

template <typename T>
struct Vec3 {
  T x{}, y{}, z{};

  bool operator==(const Vec3&) const = default;
  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(const T& s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3 operator*(const Vec3& a, const T& s) { return {s * a.x, s * a.y, s * a.z}; }
};

using Point2 = Vec2<double>;
using Point3 = Vec3<double>;

template <typename T> T dot(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.x + a.y * b.y; }
template <typename T> T cross(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.y - a.y * b.x; }
template <typename T> T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <typename T> Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T> T norm(const Vec2<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }
template <typename T> T norm(const Vec3<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }
template <typename T> Vec2<T> normalized(const Vec2<T>& a) { return (T(1.0) / norm(a)) * a; }
template <typename T> Vec3<T> normalized(const Vec3<T>& a) { return (T(1.0) / norm(a)) * a; }
template <typename T> T distance(const Vec2<T>& a, const Vec2<T>& b) { return norm(a - b); }
template <typename T> T distance(const Vec3<T>& a, const Vec3<T>& b) { return norm(a - b); }

/// Counter-clockwise perpendicular.
template <typename T> Vec2<T> perp(const Vec2<T>& a) { return {-a.y, a.x}; }

template <typename T> Vec2<T> unit_at(const T& angle_rad) {
  using std::cos;
  using std::sin;
  return {cos(angle_rad), sin(angle_rad)};
}

inline Point2 value_of(const Vec2<Dual>& p) { return {p.x.v, p.y.v}; }
inline Point3 value_of(const Vec3<Dual>& p) { return {p.x.v, p.y.v, p.z.v}; }
inline Point2 value_of(const Point2& p) { return p; }
inline Point3 value_of(const Point3& p) { return p; }

template <typename T>
Vec3<T> lift(const Vec3<double>& p) {
  return {T(p.x), T(p.y), T(p.z)};
}

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Row-major 3x3 matrix.
template <typename T>
struct Mat3 {
  std::array<std::array<T, 3>, 3> m{};

  static Mat3 identity() {
    Mat3 r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = T(1.0);
    return r;
  }

  Vec3<T> operator*(const Vec3<T>& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s(0.0);
        for (int k = 0; k < 3; ++k) s = s + m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }
};

/// Rodrigues rotation about a unit axis through the origin.
template <typename T>
Mat3<T> axis_angle(const Vec3<T>& unit_axis, const T& angle_rad) {
  using std::cos;
  using std::sin;
  const T c = cos(angle_rad);
  const T s = sin(angle_rad);
  const T t = T(1.0) - c;
  const T& x = unit_axis.x;
  const T& y = unit_axis.y;
  const T& z = unit_axis.z;
  Mat3<T> r;
  r.m = {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
          {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
          {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
  return r;
}

/// Directed line in space. `direction` is kept unit length.
template <typename T>
struct SpatialLineT {
  Vec3<T> direction{T(0.0), T(0.0), T(1.0)};
  Vec3<T> anchor{};
};
using SpatialLine = SpatialLineT<double>;

inline SpatialLine make_line(const Point3& anchor, const Point3& direction) {
  return {normalized(direction), anchor};
}

/// Rotation + translation, applied as p -> R p + t.
template <typename T>
struct RigidTransform3T {
  Mat3<T> rotation = Mat3<T>::identity();
  Vec3<T> translation{};

  static RigidTransform3T identity() { return {}; }

  /// Rotation by `angle_rad` about the given line (right-hand rule about its direction).
  static RigidTransform3T about_line(const SpatialLineT<T>& line, const T& angle_rad) {
    RigidTransform3T out;
    out.rotation = axis_angle(line.direction, angle_rad);
    out.translation = line.anchor - out.rotation * line.anchor;
    return out;
  }

  Vec3<T> apply(const Vec3<T>& p) const { return rotation * p + translation; }
  Vec3<T> apply_vector(const Vec3<T>& v) const { return rotation * v; }

  RigidTransform3T operator*(const RigidTransform3T& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }

  RigidTransform3T inverse() const {
    RigidTransform3T out;
    out.rotation = rotation.transposed();
    out.translation = -(out.rotation * translation);
    return out;
  }

  /// Row-major 4x4 homogeneous matrix.
  std::array<double, 16> matrix4() const {
    std::array<double, 16> a{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[4 * i + j] = value_of(rotation.m[i][j]);
    }
    a[3] = value_of(translation.x);
    a[7] = value_of(translation.y);
    a[11] = value_of(translation.z);
    a[15] = 1.0;
    return a;
  }
};
using RigidTransform3 = RigidTransform3T<double>;

/// Rotate `p` by `angle_deg` about `axis` (right-hand rule about the axis direction).
inline Point3 rotate_about_line(const Point3& p, const SpatialLine& axis, double angle_deg) {
  return RigidTransform3::about_line(axis, deg2rad(angle_deg)).apply(p);
}

/// Perpendicular distance from a point to a line.
template <typename T>
T distance_to_line(const Vec3<T>& p, const SpatialLineT<T>& line) {
  const Vec3<T> v = p - line.anchor;
  return norm(cross(v, line.direction));
}

enum class Winding { CounterClockwise = 1, Clockwise = -1 };

constexpr double sign_of(Winding w) { return w == Winding::CounterClockwise ? 1.0 : -1.0; }

/// Taut segment between two "signed circles" in a plane: each end is a circle
/// (center, signed radius = winding * radius; zero for a point). Travelling
/// from the first to the second, a CCW-wound circle keeps its center on the
/// left. Returns {departure point on first, arrival point on second}.
///
/// Requires |s2 - s1| < |c2 - c1|; otherwise the circles overlap in a way
/// that admits no such tangent and the caller reports the route as degenerate.
template <typename T>
std::pair<Vec2<T>, Vec2<T>> signed_tangent(const Vec2<T>& c1, const T& s1, const Vec2<T>& c2,
                                           const T& s2) {
  using std::sqrt;
  const Vec2<T> d = c2 - c1;
  const T dist = norm(d);
  const T cos_phi = (s2 - s1) / dist;
  const T sin_phi = sqrt(T(1.0) - cos_phi * cos_phi);
  const Vec2<T> dh = (T(1.0) / dist) * d;
  const Vec2<T> left = cos_phi * dh + sin_phi * perp(dh);
  return {c1 - s1 * left, c2 - s2 * left};
}

/// Tangency point on a circle for a cable arriving from `external` and winding
/// around the circle with the given orientation.
/// Throws PointInsideCircle when `external` is on or inside the circle.
inline Point2 tangent_points(const Point2& external, const Point2& circle_center, double radius,
                             Winding side) {
  const double d = distance(external, circle_center);
  if (!(d > radius)) {
    fail(ErrorCode::PointInsideCircle, "external point at distance " + std::to_string(d) +
                                           " is not outside radius " + std::to_string(radius));
  }
  return signed_tangent(external, 0.0, circle_center, sign_of(side) * radius).second;
}

/// Intersection with the palm plane z = 0.
inline Point3 line_plane_intersection(const SpatialLine& line) {
  if (std::abs(line.direction.z) < 1e-9) {
    fail(ErrorCode::ParallelAxis, "line is parallel to the plane z=0");
  }
  const double t = -line.anchor.z / line.direction.z;
  return line.anchor + t * line.direction;
}

/// Canonical form: anchor on z = 0, direction with positive z.
inline SpatialLine canonical(const SpatialLine& line) {
  SpatialLine out;
  out.direction = normalized(line.direction);
  if (out.direction.z < 0.0) out.direction = -out.direction;
  out.anchor = line_plane_intersection({out.direction, line.anchor});
  return out;
}

inline bool same_line(const SpatialLine& a, const SpatialLine& b, double tol = 1e-9) {
  const SpatialLine ca = canonical(a);
  const SpatialLine cb = canonical(b);
  return distance(ca.direction, cb.direction) < tol && distance(ca.anchor, cb.anchor) < tol;
}

}  // namespace myohand

#endif  // MYOHAND_GEOMETRY_HPP
