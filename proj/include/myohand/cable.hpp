#ifndef MYOHAND_CABLE_HPP
#define MYOHAND_CABLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "myohand/axis_placement.hpp"
#include "myohand/dual.hpp"
#include "myohand/errors.hpp"
#include "myohand/fourbar.hpp"
#include "myohand/geometry.hpp"

namespace myohand {

// Cable transmission between the upper fingers and the thumb.
//
// Route elements are given in planar body coordinates: the body frame
// coincides with the mechanism frame when the body's joint angles are zero.
// Circular elements lie in the body's flexion plane (normal = flexion axis).
// A taut route is the sequence of tangent segments between consecutive
// elements plus the arcs wrapped on pulleys and engaged wrap surfaces.
// Segments touching an out-of-plane point use the point's projection onto
// the circle plane to place the tangency.

enum class BodyId { Chassis, Fingers, Thumb };

struct Anchor {
  Point2 point;
  BodyId body = BodyId::Chassis;
};

/// Captive pulley: always wrapped, arc in [0, 2pi).
struct Pulley {
  Point2 center;
  double radius = 0.0;
  BodyId body = BodyId::Chassis;
  Winding winding = Winding::CounterClockwise;
};

/// One-sided circular surface occupying [start, start + extent] (measured in
/// the winding direction from the body's +x axis). Engaged only while the taut
/// path wraps it by a positive angle no greater than pi with both contacts
/// inside the sector.
struct WrapSurface {
  Point2 center;
  double radius = 0.0;
  double start_deg = 0.0;
  double extent_deg = 360.0;
  BodyId body = BodyId::Chassis;
  Winding winding = Winding::CounterClockwise;
};

using RouteElement = std::variant<Anchor, Pulley, WrapSurface>;

enum class CableRole { Flexor, Extensor };

struct CableRoute {
  std::vector<RouteElement> elements;
  CableRole role = CableRole::Flexor;
  double rest_length = 0.0;  // mm
  double stiffness = 400.0;  // N/mm, admissibility bound only
};

inline BodyId body_of(const RouteElement& e) {
  return std::visit([](const auto& x) { return x.body; }, e);
}

inline void validate(const CableRoute& r) {
  if (r.elements.size() < 2) fail(ErrorCode::InvariantViolation, "route needs at least 2 elements");
  if (!std::holds_alternative<Anchor>(r.elements.front()) ||
      !std::holds_alternative<Anchor>(r.elements.back())) {
    fail(ErrorCode::InvariantViolation, "route must start and end with an anchor");
  }
  for (const auto& e : r.elements) {
    if (const auto* p = std::get_if<Pulley>(&e); p && !(p->radius > 0.0)) {
      fail(ErrorCode::InvariantViolation, "pulley radius > 0");
    }
    if (const auto* w = std::get_if<WrapSurface>(&e)) {
      if (!(w->radius > 0.0)) fail(ErrorCode::InvariantViolation, "wrap radius > 0");
      if (!(w->extent_deg >= 0.0)) fail(ErrorCode::InvariantViolation, "wrap extent >= 0");
    }
  }
  if (!(r.stiffness > 0.0)) fail(ErrorCode::InvariantViolation, "stiffness > 0");
}

// ---------------------------------------------------------------------------
// Body poses

enum class JointId { FingerFlexion, ThumbFlexion };

template <typename T>
struct BodyPosesT {
  RigidTransform3T<T> chassis;
  RigidTransform3T<T> fingers;
  RigidTransform3T<T> thumb;

  const RigidTransform3T<T>& of(BodyId b) const {
    switch (b) {
      case BodyId::Fingers: return fingers;
      case BodyId::Thumb: return thumb;
      default: return chassis;
    }
  }
};
using BodyPoses = BodyPosesT<double>;

/// Pivot layout shared by the four-bar and the cable mechanism.
struct MechanismFrame {
  Point3 finger_pivot{};
  Point3 thumb_pivot{};
  SpatialLine retro_axis = to_line(AxisPlacement{});

  static MechanismFrame from(const TridigitalGeometry& g, const AxisPlacement& axis) {
    return {embed(myohand::finger_pivot(g)), embed(myohand::thumb_pivot(g)), to_line(axis)};
  }
};

/// Chassis fixed; fingers rotate about the finger pivot; the thumb flexes
/// about its pivot and the flexion joint rides on the retropulsion joint.
template <typename T>
BodyPosesT<T> body_poses(const MechanismFrame& f, const T& theta_f_rad, const T& theta_t_rad,
                         const T& retro_rad) {
  const Vec3<T> axis_y = lift<T>(kFlexionAxis);
  BodyPosesT<T> p;
  p.fingers = RigidTransform3T<T>::about_line({axis_y, lift<T>(f.finger_pivot)}, theta_f_rad);
  const auto flex = RigidTransform3T<T>::about_line({axis_y, lift<T>(f.thumb_pivot)}, theta_t_rad);
  const auto retro = RigidTransform3T<T>::about_line(
      {lift<T>(f.retro_axis.direction), lift<T>(f.retro_axis.anchor)}, retro_rad);
  p.thumb = retro * flex;
  return p;
}

inline BodyPoses body_poses_deg(const MechanismFrame& f, double theta_f, double theta_t, double retro) {
  return body_poses<double>(f, deg2rad(theta_f), deg2rad(theta_t), deg2rad(retro));
}

// ---------------------------------------------------------------------------
// Taut route geometry

namespace detail {

template <typename T>
struct WorldElement {
  enum class Kind { Point, Pulley, Wrap } kind = Kind::Point;
  Vec3<T> center{};  // the point itself for anchors
  Vec3<T> normal{};
  Vec3<T> e1{};  // in-plane reference (body +x)
  Vec3<T> e2{};
  double radius = 0.0;
  double wsign = 1.0;
  double start = 0.0;   // rad, wraps only
  double extent = 0.0;  // rad, wraps only
  std::size_t source = 0;

  bool circular() const { return kind != Kind::Point; }
  T signed_radius() const { return T(wsign * radius); }

  Vec2<T> to_plane(const Vec3<T>& p) const {
    const Vec3<T> v = p - center;
    return {dot(v, e1), dot(v, e2)};
  }
  Vec3<T> from_plane(const Vec2<T>& q) const { return center + q.x * e1 + q.y * e2; }
};

template <typename T>
WorldElement<T> to_world(const RouteElement& e, const BodyPosesT<T>& poses, std::size_t index) {
  WorldElement<T> w;
  w.source = index;
  const auto& pose = poses.of(body_of(e));
  w.normal = pose.apply_vector(lift<T>(kFlexionAxis));
  w.e1 = pose.apply_vector(Vec3<T>{T(1.0), T(0.0), T(0.0)});
  w.e2 = cross(w.normal, w.e1);
  if (const auto* a = std::get_if<Anchor>(&e)) {
    w.kind = WorldElement<T>::Kind::Point;
    w.center = pose.apply(lift<T>(embed(a->point)));
  } else if (const auto* p = std::get_if<Pulley>(&e)) {
    w.kind = WorldElement<T>::Kind::Pulley;
    w.center = pose.apply(lift<T>(embed(p->center)));
    w.radius = p->radius;
    w.wsign = sign_of(p->winding);
  } else {
    const auto& s = std::get<WrapSurface>(e);
    w.kind = WorldElement<T>::Kind::Wrap;
    w.center = pose.apply(lift<T>(embed(s.center)));
    w.radius = s.radius;
    w.wsign = sign_of(s.winding);
    w.start = deg2rad(s.start_deg);
    w.extent = deg2rad(s.extent_deg);
  }
  return w;
}

template <typename T>
struct Contact {
  Vec3<T> depart{};  // where the cable leaves element i
  Vec3<T> arrive{};  // where it reaches element i+1
};

constexpr double kCoplanarTol = 1e-9;
constexpr double kEngageTol = 1e-9;  // mm of arc; hysteresis band around tangency

template <typename T>
Contact<T> tangent_between(const WorldElement<T>& a, const WorldElement<T>& b) {
  using K = typename WorldElement<T>::Kind;
  if (a.kind == K::Point && b.kind == K::Point) return {a.center, b.center};
  if (a.kind == K::Point) {
    const Vec2<T> p = b.to_plane(a.center);
    if (!(value_of(norm(p)) > b.radius)) {
      fail(ErrorCode::RouteDegenerate, "anchor inside circular element " + std::to_string(b.source));
    }
    const auto tp = signed_tangent(p, T(0.0), Vec2<T>{}, b.signed_radius());
    return {a.center, b.from_plane(tp.second)};
  }
  if (b.kind == K::Point) {
    const Vec2<T> p = a.to_plane(b.center);
    if (!(value_of(norm(p)) > a.radius)) {
      fail(ErrorCode::RouteDegenerate, "anchor inside circular element " + std::to_string(a.source));
    }
    const auto tp = signed_tangent(Vec2<T>{}, a.signed_radius(), p, T(0.0));
    return {a.from_plane(tp.first), b.center};
  }
  // Circle to circle: both must share a plane.
  const double align = value_of(dot(a.normal, b.normal));
  const double off = std::abs(value_of(dot(b.center - a.center, a.normal)));
  if (std::abs(std::abs(align) - 1.0) > kCoplanarTol || off > 1e-7) {
    fail(ErrorCode::RouteDegenerate, "consecutive circular elements " + std::to_string(a.source) + "," +
                                         std::to_string(b.source) + " are not coplanar");
  }
  const T sb = align > 0.0 ? b.signed_radius() : -b.signed_radius();
  const Vec2<T> cb = a.to_plane(b.center);
  if (!(value_of(norm(cb)) > std::abs(value_of(sb - a.signed_radius())))) {
    fail(ErrorCode::RouteDegenerate, "overlapping circular elements " + std::to_string(a.source) + "," +
                                         std::to_string(b.source));
  }
  const auto tp = signed_tangent(Vec2<T>{}, a.signed_radius(), cb, sb);
  return {a.from_plane(tp.first), a.from_plane(tp.second)};
}

/// Angle from `from` to `to` around the element, positive in its winding direction, in (-pi, pi].
template <typename T>
T winding_angle(const WorldElement<T>& w, const Vec3<T>& from, const Vec3<T>& to) {
  using std::atan2;
  const Vec2<T> u = w.to_plane(from);
  const Vec2<T> v = w.to_plane(to);
  return T(w.wsign) * atan2(cross(u, v), dot(u, v));
}

/// Body-frame angle of a contact point measured from the sector start in the winding direction, [0, 2pi).
template <typename T>
double sector_offset(const WorldElement<T>& w, const Vec3<T>& p) {
  const Point2 q = value_of(w.to_plane(p));
  double a = w.wsign * std::atan2(q.y, q.x) - w.start;
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

template <typename T>
struct PathResult {
  T length{};
  std::optional<std::size_t> failed_wrap;  // index into `elements` of a wrap that must disengage
};

template <typename T>
PathResult<T> taut_path(const std::vector<WorldElement<T>>& el) {
  using K = typename WorldElement<T>::Kind;
  std::vector<Contact<T>> seg;
  seg.reserve(el.size());
  T total(0.0);
  for (std::size_t i = 0; i + 1 < el.size(); ++i) {
    seg.push_back(tangent_between(el[i], el[i + 1]));
    total = total + distance(seg.back().depart, seg.back().arrive);
  }
  PathResult<T> out;
  for (std::size_t i = 1; i + 1 < el.size(); ++i) {
    const auto& w = el[i];
    if (!w.circular()) continue;
    const Vec3<T>& in = seg[i - 1].arrive;
    const Vec3<T>& outp = seg[i].depart;
    T ang = winding_angle(w, in, outp);
    if (w.kind == K::Pulley) {
      if (value_of(ang) < 0.0) ang = ang + T(2.0 * kPi);
    } else {
      const double arc = value_of(ang) * w.radius;
      bool engaged = arc > -kEngageTol;
      if (engaged && w.extent < 2.0 * kPi) {
        const double tol = kEngageTol / w.radius;
        const double s0 = sector_offset(w, in);
        const double s0w = s0 > 2.0 * kPi - tol ? s0 - 2.0 * kPi : s0;
        engaged = s0w <= w.extent + tol && s0w + value_of(ang) <= w.extent + tol;
      }
      if (!engaged && !out.failed_wrap) out.failed_wrap = i;
    }
    total = total + T(w.radius) * ang;
  }
  out.length = total;
  return out;
}

}  // namespace detail

/// Taut length of a route at the given body poses, mm.
template <typename T>
T cable_length_t(const CableRoute& route, const BodyPosesT<T>& poses) {
  validate(route);
  std::vector<detail::WorldElement<T>> el;
  el.reserve(route.elements.size());
  for (std::size_t i = 0; i < route.elements.size(); ++i) {
    el.push_back(detail::to_world(route.elements[i], poses, i));
  }
  // Wraps start engaged; drop the first one that fails its engagement test
  // and recompute until the set is stable.
  for (std::size_t guard = 0; guard <= route.elements.size(); ++guard) {
    const auto r = detail::taut_path(el);
    if (!r.failed_wrap) return r.length;
    el.erase(el.begin() + static_cast<std::ptrdiff_t>(*r.failed_wrap));
  }
  fail(ErrorCode::RouteDegenerate, "wrap engagement did not settle");
}

inline double cable_length(const CableRoute& route, const BodyPoses& poses) {
  return cable_length_t<double>(route, poses);
}

/// Signed dL/dtheta (mm/rad) for one joint at a mechanism configuration.
inline double length_rate(const CableRoute& route, const MechanismFrame& frame, double theta_f_deg,
                          double theta_t_deg, double retro_deg, JointId joint) {
  const bool df = joint == JointId::FingerFlexion;
  const Dual tf(deg2rad(theta_f_deg), df ? 1.0 : 0.0);
  const Dual tt(deg2rad(theta_t_deg), df ? 0.0 : 1.0);
  const auto poses = body_poses<Dual>(frame, tf, tt, Dual(deg2rad(retro_deg)));
  return cable_length_t<Dual>(route, poses).d;
}

/// |dL/dtheta_joint|, mm/rad.
inline double moment_arm(const CableRoute& route, const MechanismFrame& frame, double theta_f_deg,
                         double theta_t_deg, double retro_deg, JointId joint) {
  return std::abs(length_rate(route, frame, theta_f_deg, theta_t_deg, retro_deg, joint));
}

// ---------------------------------------------------------------------------
// Cable design and coupled mechanism

struct CableDesign {
  std::string name;
  int iteration = 3;
  CableRoute flexor;
  std::optional<CableRoute> extensor;
  double theta_open_deg = 0.0;    // finger angle at full opening, both grips
  double max_stroke_deg = 90.0;   // search window for the closed (contact) angle
  double thumb_min_deg = -90.0;   // thumb flexion range searched by the coupling
  double thumb_max_deg = 180.0;
  std::optional<double> dist_axis_max;  // mm, flexor thumb-side attachment to retropulsion axis
  double tension_limit = 800.0;   // N
  std::string note;

  // Populated from the project at load time.
  TridigitalGeometry geometry;
  AxisPlacement axis;

  MechanismFrame frame() const { return MechanismFrame::from(geometry, axis); }
};

struct CableOptions {
  double eps_arm = 0.5;      // mm/rad
  double tol_contact = 0.5;  // mm
  double scan_step = 0.5;    // deg, bracketing scan for the coupled thumb angle
};

/// Thumb angle making `route` taut at theta_f (deg). Brackets sign changes of
/// L - L0 over the design's thumb range, then bisects.
inline double taut_thumb_angle(const CableDesign& d, const CableRoute& route, double theta_f_deg, GripMode mode,
                               const CableOptions& opt = {}) {
  const MechanismFrame frame = d.frame();
  const double retro = retro_angle_for(mode);
  auto f = [&](double tt) -> std::optional<double> {
    try {
      return cable_length(route, body_poses_deg(frame, theta_f_deg, tt, retro)) - route.rest_length;
    } catch (const MechanismError&) {
      return std::nullopt;
    }
  };
  std::vector<double> roots;
  double prev_t = d.thumb_min_deg;
  auto prev = f(prev_t);
  const int n = static_cast<int>(std::ceil((d.thumb_max_deg - d.thumb_min_deg) / opt.scan_step));
  for (int i = 1; i <= n; ++i) {
    const double t = std::min(d.thumb_max_deg, d.thumb_min_deg + i * opt.scan_step);
    const auto cur = f(t);
    if (prev && cur) {
      if (*prev == 0.0) {
        roots.push_back(prev_t);
      } else if ((*prev < 0.0) != (*cur < 0.0)) {
        double a = prev_t, b = t;
        double fa = *prev;
        for (int k = 0; k < 200 && b - a > 1e-13; ++k) {
          const double m = 0.5 * (a + b);
          const auto fm = f(m);
          if (!fm) break;
          if ((*fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = *fm;
          } else {
            b = m;
          }
        }
        // Keep whichever bracket end sits closer to taut.
        const auto fb = f(b);
        roots.push_back(fb && std::abs(*fb) < std::abs(fa) ? b : a);
      }
    }
    prev = cur;
    prev_t = t;
  }
  if (roots.empty()) {
    fail(ErrorCode::SlackCable, "no thumb angle makes the cable taut at theta_f=" + std::to_string(theta_f_deg));
  }
  if (roots.size() > 1) {
    std::string list;
    for (double r : roots) list += " " + std::to_string(r);
    fail(ErrorCode::AmbiguousRoot, "several taut thumb angles at theta_f=" + std::to_string(theta_f_deg) + ":" + list);
  }
  return roots.front();
}

inline double coupled_thumb_angle(const CableDesign& d, double theta_f_deg, GripMode mode,
                                  const CableOptions& opt = {}) {
  return taut_thumb_angle(d, d.flexor, theta_f_deg, mode, opt);
}

/// Opening between M and T in the design's 3-D pose.
template <typename T>
T opening_t(const CableDesign& d, const T& theta_f_rad, const T& theta_t_rad, double retro_deg) {
  const auto poses = body_poses<T>(d.frame(), theta_f_rad, theta_t_rad, T(deg2rad(retro_deg)));
  const Vec3<T> m = poses.fingers.apply(lift<T>(Point3{d.geometry.l_f, 0.0, 0.0}));
  const Vec3<T> t = poses.thumb.apply(lift<T>(Point3{d.geometry.d_ab + d.geometry.l_th, 0.0, 0.0}));
  return distance(m, t);
}

/// Everything the sweeps report at one finger angle.
struct CableState {
  double theta_f = 0.0;
  double theta_t = 0.0;
  double opening = 0.0;     // mm
  double rate_f = 0.0;      // signed dL/dtheta_f, mm/rad
  double rate_t = 0.0;      // signed dL/dtheta_t, mm/rad
  double coupling = 0.0;    // dtheta_t/dtheta_f
  double aperture_rate = 0.0;  // total d d(MT)/d theta_f, mm/rad
  double partial_f = 0.0;   // d d(MT)/d theta_f at fixed thumb
  double partial_t = 0.0;   // d d(MT)/d theta_t at fixed fingers
};

inline CableState cable_state(const CableDesign& d, double theta_f_deg, GripMode mode, const CableOptions& opt = {}) {
  CableState s;
  s.theta_f = theta_f_deg;
  s.theta_t = coupled_thumb_angle(d, theta_f_deg, mode, opt);
  const MechanismFrame frame = d.frame();
  const double retro = retro_angle_for(mode);
  s.rate_f = length_rate(d.flexor, frame, s.theta_f, s.theta_t, retro, JointId::FingerFlexion);
  s.rate_t = length_rate(d.flexor, frame, s.theta_f, s.theta_t, retro, JointId::ThumbFlexion);
  s.coupling = s.rate_t != 0.0 ? -s.rate_f / s.rate_t : std::numeric_limits<double>::infinity();
  const double tf = deg2rad(s.theta_f);
  const double tt = deg2rad(s.theta_t);
  s.opening = opening_t<double>(d, tf, tt, retro);
  s.partial_f = opening_t<Dual>(d, Dual(tf, 1.0), Dual(tt, 0.0), retro).d;
  s.partial_t = opening_t<Dual>(d, Dual(tf, 0.0), Dual(tt, 1.0), retro).d;
  s.aperture_rate = s.partial_f + s.partial_t * s.coupling;
  return s;
}

/// Grip force by virtual work through the cable-coupled mechanism, N.
inline double cable_grip_force(const CableDesign& d, double theta_f_deg, GripMode mode, const DriveParameters& drive,
                               const CableOptions& opt = {}) {
  const CableState s = cable_state(d, theta_f_deg, mode, opt);
  if (std::abs(s.rate_f) < opt.eps_arm || std::abs(s.rate_t) < opt.eps_arm) {
    fail(ErrorCode::SingularConfiguration, "cable moment arm below threshold at theta_f=" + std::to_string(theta_f_deg));
  }
  if (!(std::abs(s.aperture_rate) >= opt.eps_arm)) {
    fail(ErrorCode::SingularConfiguration, "aperture rate below threshold at theta_f=" + std::to_string(theta_f_deg));
  }
  return drive.tau_in / std::abs(s.aperture_rate);
}

/// Grip force and cable tension from separate equilibrium of the fingers and
/// the thumb. The force must agree with the virtual-work value.
struct BodyEquilibrium {
  double force = 0.0;    // N
  double tension = 0.0;  // N
};

inline BodyEquilibrium body_equilibrium(const CableState& s, const DriveParameters& drive) {
  // Virtual power per body, closing = decreasing theta_f, object reaction F
  // pushing M and T apart, cable tension T doing work -T dL:
  //   fingers: -tau + F * partial_f - T * rate_f = 0
  //   thumb:          F * partial_t - T * rate_t = 0
  const double det = -s.partial_f * s.rate_t + s.rate_f * s.partial_t;
  BodyEquilibrium e;
  e.force = -drive.tau_in * s.rate_t / det;
  e.tension = -drive.tau_in * s.partial_t / det;
  return e;
}

/// Worst-case flexor tension with the whole input torque reacted by the
/// cable: tau_in / finger moment arm.
inline double cable_tension(const CableDesign& d, double theta_f_deg, GripMode mode, const DriveParameters& drive,
                            const CableOptions& opt = {}) {
  const double tt = coupled_thumb_angle(d, theta_f_deg, mode, opt);
  const double arm = moment_arm(d.flexor, d.frame(), theta_f_deg, tt, retro_angle_for(mode), JointId::FingerFlexion);
  if (arm < opt.eps_arm) {
    fail(ErrorCode::SingularConfiguration,
         "finger moment arm " + std::to_string(arm) + " mm/rad: tension unbounded at theta_f=" +
             std::to_string(theta_f_deg));
  }
  return drive.tau_in / arm;
}

struct AntagonistResidual {
  double residual_deg = 0.0;  // |theta_t(flexor) - theta_t(extensor)|
  double stretch_mm = 0.0;    // residual arc on the extensor's thumb arm
  double bound_mm = 0.0;      // tension_limit / stiffness
  bool admissible = false;
};

inline AntagonistResidual antagonist_residual(const CableDesign& d, double theta_f_deg, GripMode mode,
                                              const CableOptions& opt = {}) {
  if (!d.extensor) fail(ErrorCode::InvariantViolation, "extensor undefined");
  const double tf = taut_thumb_angle(d, d.flexor, theta_f_deg, mode, opt);
  const double te = taut_thumb_angle(d, *d.extensor, theta_f_deg, mode, opt);
  const double arm =
      moment_arm(*d.extensor, d.frame(), theta_f_deg, tf, retro_angle_for(mode), JointId::ThumbFlexion);
  AntagonistResidual r;
  r.residual_deg = std::abs(tf - te);
  r.stretch_mm = deg2rad(r.residual_deg) * arm;
  r.bound_mm = d.tension_limit / d.extensor->stiffness;
  r.admissible = r.stretch_mm <= r.bound_mm;
  return r;
}

/// Closed end of the stroke for a grip: finger angle of minimal d(MT) within
/// max_stroke_deg of the open angle, on the cable coupling.
inline double closed_angle(const CableDesign& d, GripMode mode, const CableOptions& opt = {}) {
  auto open_at = [&](double th) -> std::optional<double> {
    try {
      return cable_state(d, th, mode, opt).opening;
    } catch (const MechanismError&) {
      return std::nullopt;
    }
  };
  constexpr double dir = -1.0;  // closing decreases theta_f
  double best_t = d.theta_open_deg;
  double best = open_at(best_t).value_or(std::numeric_limits<double>::infinity());
  constexpr double kScan = 0.5;
  for (double e = kScan; e <= d.max_stroke_deg + 1e-9; e += kScan) {
    const double th = d.theta_open_deg + dir * e;
    const auto v = open_at(th);
    if (!v) break;
    if (*v < best) {
      best = *v;
      best_t = th;
    }
  }
  auto f = [&](double th) { return open_at(th).value_or(std::numeric_limits<double>::infinity()); };
  const double lo = std::max(best_t - kScan, d.theta_open_deg - d.max_stroke_deg);
  const double hi = std::min(best_t + kScan, d.theta_open_deg);
  const double th = detail::golden_min(f, lo, hi, 1e-9);
  return f(th) <= best ? th : best_t;
}

inline Stroke cable_stroke(const CableDesign& d, GripMode mode, const CableOptions& opt = {}) {
  const double closed = closed_angle(d, mode, opt);
  return {std::min(closed, d.theta_open_deg), std::max(closed, d.theta_open_deg)};
}

struct CableSample {
  double theta_f = 0.0;  // deg
  double theta_t = 0.0;  // deg
  double opening = 0.0;  // mm
  double force = 0.0;    // N, meaningful only when !singular
  double tension = 0.0;  // N, meaningful only when has_tension
  double arm_fingers = 0.0;  // mm/rad
  double arm_thumb = 0.0;    // mm/rad
  GripMode grip_mode = GripMode::Opposed;
  bool singular = false;
  bool has_tension = false;
  std::string reason;  // empty, "contact", "singular" or the coupling error code
};

/// Samples the grip from its closed end to the common open angle.
inline std::vector<CableSample> cable_sweep(const CableDesign& d, GripMode mode, const DriveParameters& drive,
                                            double step_deg, const CableOptions& opt = {}) {
  const Stroke stroke = cable_stroke(d, mode, opt);
  std::vector<CableSample> out;
  for (double th : stroke_samples(stroke, step_deg)) {
    CableSample s;
    s.theta_f = th;
    s.grip_mode = mode;
    try {
      const CableState st = cable_state(d, th, mode, opt);
      s.theta_t = st.theta_t;
      s.opening = st.opening;
      s.arm_fingers = std::abs(st.rate_f);
      s.arm_thumb = std::abs(st.rate_t);
      if (s.arm_fingers >= opt.eps_arm) {
        s.tension = drive.tau_in / s.arm_fingers;
        s.has_tension = true;
      }
      if (st.opening <= opt.tol_contact) {
        s.singular = true;
        s.reason = "contact";
      } else if (s.arm_fingers < opt.eps_arm || s.arm_thumb < opt.eps_arm || std::abs(st.aperture_rate) < opt.eps_arm) {
        s.singular = true;
        s.reason = "singular";
      } else {
        s.force = drive.tau_in / std::abs(st.aperture_rate);
      }
    } catch (const MechanismError& e) {
      s.singular = true;
      s.reason = std::string(to_string(e.code()));
    }
    out.push_back(s);
  }
  return out;
}

/// Max over the opposed stroke of |L(opposed) - L(lateral)| at equal joint angles, mm.
inline double retropulsion_invariance(const CableDesign& d, const CableOptions& opt = {}) {
  const MechanismFrame frame = d.frame();
  Stroke stroke;
  try {
    stroke = cable_stroke(d, GripMode::Opposed, opt);
  } catch (const MechanismError&) {
    stroke = {d.theta_open_deg - d.max_stroke_deg, d.theta_open_deg};
  }
  double worst = 0.0;
  const auto samples = stroke.extent() > 0.0 ? stroke_samples(stroke, 1.0) : std::vector<double>{stroke.theta_min};
  for (double th : samples) {
    double tt;
    try {
      tt = coupled_thumb_angle(d, th, GripMode::Opposed, opt);
    } catch (const MechanismError&) {
      continue;
    }
    const double lo = cable_length(d.flexor, body_poses_deg(frame, th, tt, 0.0));
    const double ll = cable_length(d.flexor, body_poses_deg(frame, th, tt, 90.0));
    worst = std::max(worst, std::abs(lo - ll));
  }
  return worst;
}

/// Where the flexor hands over to the thumb: the chassis element right before
/// the first thumb-body element, or that thumb element itself when the cable
/// reaches the thumb from another moving body. World coordinates, zero pose.
inline Point3 thumb_side_attachment(const CableRoute& route) {
  validate(route);
  auto point_of = [](const RouteElement& e) {
    return std::visit(
        [](const auto& x) {
          using X = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<X, Anchor>) {
            return embed(x.point);
          } else {
            return embed(x.center);
          }
        },
        e);
  };
  for (std::size_t i = 0; i < route.elements.size(); ++i) {
    if (body_of(route.elements[i]) != BodyId::Thumb) continue;
    if (i > 0 && body_of(route.elements[i - 1]) == BodyId::Chassis) return point_of(route.elements[i - 1]);
    return point_of(route.elements[i]);
  }
  fail(ErrorCode::InvariantViolation, "route never reaches the thumb");
}

/// Distance from the flexor's thumb-side attachment to the retropulsion axis, mm.
inline double thumb_attachment_axis_distance(const CableDesign& d) {
  return distance_to_line(thumb_side_attachment(d.flexor), to_line(d.axis));
}

inline void validate(const CableDesign& d) {
  validate(d.flexor);
  if (d.flexor.role != CableRole::Flexor) fail(ErrorCode::InvariantViolation, "flexor role");
  if (d.extensor) {
    validate(*d.extensor);
    if (d.extensor->role != CableRole::Extensor) fail(ErrorCode::InvariantViolation, "extensor role");
  }
  if (d.iteration < 1 || d.iteration > 3) fail(ErrorCode::InvariantViolation, "iteration in {1,2,3}");
  if (!(d.max_stroke_deg > 0.0)) fail(ErrorCode::InvariantViolation, "max_stroke_deg > 0");
  if (!(d.thumb_min_deg < d.thumb_max_deg)) fail(ErrorCode::InvariantViolation, "thumb_min_deg < thumb_max_deg");
  if (!(d.tension_limit > 0.0)) fail(ErrorCode::InvariantViolation, "tension_limit > 0");
  if (d.dist_axis_max) {
    if (!(*d.dist_axis_max >= 0.0)) fail(ErrorCode::InvariantViolation, "dist_axis_max >= 0");
    if (thumb_attachment_axis_distance(d) > *d.dist_axis_max) {
      fail(ErrorCode::InvariantViolation, "thumb-side attachment within dist_axis_max of the retropulsion axis");
    }
  }
}

}  // namespace myohand

#endif  // MYOHAND_CABLE_HPP
