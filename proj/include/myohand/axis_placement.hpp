#ifndef MYOHAND_AXIS_PLACEMENT_HPP
#define MYOHAND_AXIS_PLACEMENT_HPP

#include <cmath>
#include <string>

#include "myohand/errors.hpp"
#include "myohand/geometry.hpp"

namespace myohand {

/// Four-parameter chart of the thumb retropulsion axis: direction by azimuth
/// and elevation above the palm plane, position by the palm-plane intercept.
struct AxisPlacement {
  double azimuth = 0.0;     // deg
  double elevation = 90.0;  // deg, in (0, 90]
  double x0 = 0.0;          // mm
  double y0 = 0.0;          // mm

  bool operator==(const AxisPlacement&) const = default;
};

inline void validate(const AxisPlacement& a) {
  if (!std::isfinite(a.azimuth) || !std::isfinite(a.x0) || !std::isfinite(a.y0)) {
    fail(ErrorCode::InvariantViolation, "axis parameters finite");
  }
  if (!(a.elevation > 0.0 && a.elevation <= 90.0)) {
    fail(ErrorCode::InvariantViolation, "elevation ∈ (0,90]");
  }
}

inline SpatialLine to_line(const AxisPlacement& a) {
  const double az = deg2rad(a.azimuth);
  const double el = deg2rad(a.elevation);
  return {{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)}, {a.x0, a.y0, 0.0}};
}

inline AxisPlacement from_line(const SpatialLine& line) {
  const SpatialLine c = canonical(line);
  AxisPlacement a;
  a.elevation = rad2deg(std::asin(std::min(1.0, c.direction.z)));
  a.azimuth = rad2deg(std::atan2(c.direction.y, c.direction.x));
  a.x0 = c.anchor.x;
  a.y0 = c.anchor.y;
  return a;
}

}  // namespace myohand

#endif  // MYOHAND_AXIS_PLACEMENT_HPP
