#include <gtest/gtest.h>

#include <array>
#include <random>

#include "myohand/axis_placement.hpp"
#include "myohand/geometry.hpp"
#include "support.hpp"

using namespace myohand;
using testing_support::uniform;

namespace {

// Unit quaternion (w, x, y, z); rotations composed independently of Mat3.
struct Quat {
  double w, x, y, z;
  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Quat conj() const { return {w, -x, -y, -z}; }
  static Quat axis_angle(Point3 u, double a) {
    u = normalized(u);
    const double s = std::sin(a / 2);
    return {std::cos(a / 2), s * u.x, s * u.y, s * u.z};
  }
  Point3 rotate(const Point3& p) const {
    const Quat r = *this * Quat{0, p.x, p.y, p.z} * conj();
    return {r.x, r.y, r.z};
  }
};

// Pose as (rotation, translation) with the rotation held as a quaternion.
struct QPose {
  Quat q{1, 0, 0, 0};
  Point3 t{};
  static QPose about_line(const SpatialLine& l, double a) {
    QPose p;
    p.q = Quat::axis_angle(l.direction, a);
    p.t = l.anchor - p.q.rotate(l.anchor);
    return p;
  }
  QPose operator*(const QPose& o) const { return {q * o.q, q.rotate(o.t) + t}; }
  Point3 apply(const Point3& p) const { return q.rotate(p) + t; }
};

Point3 random_unit(std::mt19937_64& rng) {
  for (;;) {
    Point3 v{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double n = norm(v);
    if (n > 0.1 && n <= 1.0) return (1.0 / n) * v;
  }
}

// Tangency oracle: angle phi on the circle where (Q - C).(Q - P) = 0, found by
// scan + bisection; the winding picks which of the two roots applies.
Point2 tangent_oracle(const Point2& p, const Point2& c, double r, Winding w) {
  auto q_at = [&](double phi) { return c + r * Point2{std::cos(phi), std::sin(phi)}; };
  auto f = [&](double phi) {
    const Point2 q = q_at(phi);
    return dot(q - c, q - p);
  };
  const int n = 3600;
  for (int i = 0; i < n; ++i) {
    double a = 2 * kPi * i / n, b = 2 * kPi * (i + 1) / n;
    if ((f(a) < 0) == (f(b) < 0)) continue;
    for (int k = 0; k < 200; ++k) {
      const double m = 0.5 * (a + b);
      if ((f(m) < 0) == (f(a) < 0)) {
        a = m;
      } else {
        b = m;
      }
    }
    const Point2 q = q_at(0.5 * (a + b));
    // travelling P -> Q, a CCW wrap keeps the center on the left
    const double side = cross(q - p, c - q);
    if ((side > 0) == (w == Winding::CounterClockwise)) return q;
  }
  ADD_FAILURE() << "oracle found no tangent";
  return {};
}

}  // namespace

TEST(Geometry, TangentPointMatchesRootFindingOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Point2 c{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const double r = uniform(rng, 0.5, 10);
    const double ang = uniform(rng, 0, 2 * kPi);
    const double d = r * uniform(rng, 1.05, 6);
    const Point2 p = c + d * Point2{std::cos(ang), std::sin(ang)};
    for (Winding w : {Winding::CounterClockwise, Winding::Clockwise}) {
      const Point2 got = tangent_points(p, c, r, w);
      const Point2 want = tangent_oracle(p, c, r, w);
      EXPECT_NEAR(got.x, want.x, 1e-8);
      EXPECT_NEAR(got.y, want.y, 1e-8);
    }
  }
}

TEST(Geometry, TangentFromInsideThrows) {
  try {
    tangent_points({1, 0}, {0, 0}, 2.0, Winding::Clockwise);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointInsideCircle);
  }
  EXPECT_THROW(tangent_points({2, 0}, {0, 0}, 2.0, Winding::Clockwise), MechanismError);
}

TEST(Geometry, CircleToCircleTangentIsPerpendicularToBothRadii) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point2 c1{uniform(rng, -10, 10), uniform(rng, -10, 10)};
    const Point2 c2 = c1 + uniform(rng, 15, 40) * Point2{std::cos(i * 0.3), std::sin(i * 0.3)};
    const double s1 = uniform(rng, -6, 6), s2 = uniform(rng, -6, 6);
    const auto [a, b] = signed_tangent(c1, s1, c2, s2);
    EXPECT_NEAR(distance(a, c1), std::abs(s1), 1e-9);
    EXPECT_NEAR(distance(b, c2), std::abs(s2), 1e-9);
    EXPECT_NEAR(dot(a - c1, b - a), 0.0, 1e-8);
    EXPECT_NEAR(dot(b - c2, b - a), 0.0, 1e-8);
    // positive signed radius: center to the left of travel
    if (std::abs(s1) > 1e-3) EXPECT_EQ(cross(b - a, c1 - a) > 0, s1 > 0);
    if (std::abs(s2) > 1e-3) EXPECT_EQ(cross(b - a, c2 - b) > 0, s2 > 0);
  }
}

TEST(Geometry, AboutLineAgreesWithQuaternionComposition) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const SpatialLine l1{random_unit(rng), {uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50)}};
    const SpatialLine l2{random_unit(rng), {uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50)}};
    const double a1 = uniform(rng, -kPi, kPi), a2 = uniform(rng, -kPi, kPi);
    const RigidTransform3 t = RigidTransform3::about_line(l1, a1) * RigidTransform3::about_line(l2, a2);
    const QPose q = QPose::about_line(l1, a1) * QPose::about_line(l2, a2);
    const Point3 p{uniform(rng, -80, 80), uniform(rng, -80, 80), uniform(rng, -80, 80)};
    const Point3 got = t.apply(p), want = q.apply(p);
    EXPECT_NEAR(got.x, want.x, 1e-9);
    EXPECT_NEAR(got.y, want.y, 1e-9);
    EXPECT_NEAR(got.z, want.z, 1e-9);
  }
}

TEST(Geometry, RigidTransformProperties) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const SpatialLine l{random_unit(rng), {uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50)}};
    const double a = uniform(rng, -kPi, kPi);
    const auto t = RigidTransform3::about_line(l, a);
    const Point3 p{uniform(rng, -80, 80), uniform(rng, -80, 80), uniform(rng, -80, 80)};
    const Point3 q{uniform(rng, -80, 80), uniform(rng, -80, 80), uniform(rng, -80, 80)};
    // distances preserved, points on the axis fixed, inverse undoes
    EXPECT_NEAR(distance(t.apply(p), t.apply(q)), distance(p, q), 1e-9);
    const Point3 on = l.anchor + 7.0 * l.direction;
    EXPECT_NEAR(distance(t.apply(on), on), 0.0, 1e-9);
    EXPECT_NEAR(distance(t.inverse().apply(t.apply(p)), p), 0.0, 1e-9);
    // distance to the axis preserved
    EXPECT_NEAR(distance_to_line(t.apply(p), l), distance_to_line(p, l), 1e-9);
  }
}

TEST(Geometry, Matrix4IsRowMajorHomogeneous) {
  const auto t = RigidTransform3::about_line({{0, 0, 1}, {10, 0, 0}}, kPi / 2);
  const auto m = t.matrix4();
  const Point3 p{12, 0, 3};
  const Point3 want = t.apply(p);
  for (int r = 0; r < 3; ++r) {
    const double v = m[r * 4 + 0] * p.x + m[r * 4 + 1] * p.y + m[r * 4 + 2] * p.z + m[r * 4 + 3];
    EXPECT_NEAR(v, r == 0 ? want.x : r == 1 ? want.y : want.z, 1e-12);
  }
  EXPECT_EQ(m[12], 0.0);
  EXPECT_EQ(m[15], 1.0);
  EXPECT_NEAR(want.x, 10.0, 1e-12);
  EXPECT_NEAR(want.y, 2.0, 1e-12);
}

TEST(Geometry, PlaneIntersectionAndCanonicalForm) {
  const SpatialLine l{normalized(Point3{1, 2, 2}), {3, 4, 6}};
  const Point3 p = line_plane_intersection(l);
  EXPECT_NEAR(p.z, 0.0, 1e-12);
  EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_NEAR(p.y, -2.0, 1e-12);
  const SpatialLine flipped{-1.0 * l.direction, l.anchor + 5.0 * l.direction};
  EXPECT_TRUE(same_line(l, flipped));
  try {
    line_plane_intersection({{1, 0, 0}, {0, 0, 1}});
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParallelAxis);
  }
}

TEST(Geometry, AxisChartRoundTrips) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const AxisPlacement a{uniform(rng, -179, 179), uniform(rng, 1, 89.9), uniform(rng, -20, 70), uniform(rng, -40, 40)};
    const AxisPlacement b = from_line(to_line(a));
    EXPECT_NEAR(a.azimuth, b.azimuth, 1e-9);
    EXPECT_NEAR(a.elevation, b.elevation, 1e-9);
    EXPECT_NEAR(a.x0, b.x0, 1e-9);
    EXPECT_NEAR(a.y0, b.y0, 1e-9);
  }
}

TEST(Geometry, ElevationInvariantNamed) {
  try {
    validate(AxisPlacement{0, 0, 0, 0});
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
    EXPECT_NE(std::string(e.what()).find("elevation ∈ (0,90]"), std::string::npos);
  }
  EXPECT_NO_THROW(validate(AxisPlacement{0, 90, 0, 0}));
}

TEST(Geometry, DualDerivativesMatchFiniteDifferences) {
  auto f = [](auto x) {
    using std::atan2, std::cos, std::sin, std::sqrt, std::acos;
    return atan2(sin(x) * x, cos(x) + 2.0) + sqrt(x * x + 1.0) * acos(x / 4.0);
  };
  for (double x : {-1.3, -0.2, 0.4, 1.7, 3.1}) {
    const Dual d = f(Dual::variable(x));
    const double h = 1e-6;
    EXPECT_NEAR(d.v, f(x), 1e-14);
    EXPECT_NEAR(d.d, (f(x + h) - f(x - h)) / (2 * h), 1e-7);
  }
}
