#ifndef MYOHAND_FOURBAR_HPP
#define MYOHAND_FOURBAR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "myohand/dual.hpp"
#include "myohand/errors.hpp"
#include "myohand/geometry.hpp"

namespace myohand {

// Planar tridigital four-bar.
//
// Frame: finger pivot A at the origin, thumb pivot B at (d_ab, 0). The finger
// contact ray points at theta_f from +x, the thumb contact ray at theta_t.
// Rod attachments sit on rays offset by alpha (finger) and beta (thumb):
//   M = A + l_f u(theta_f)             P = A + l_1 u(theta_f + alpha)
//   T = B + l_th u(theta_t)            Q = B + l_2 u(theta_t + beta)
// and the rod imposes |P - Q| = l_r.
//
// The 3-D embedding used by the thumb and cable modules maps planar (x, y) to
// (x, 0, y): the palm plane z = 0 contains the pivot line, and planar
// counter-clockwise rotation is rotation about -y.

/// The two circle-intersection solutions of the closure.
enum class Branch { Plus, Minus };

enum class GripMode { Opposed, Lateral };

constexpr double retro_angle_for(GripMode mode) { return mode == GripMode::Opposed ? 0.0 : 90.0; }

struct TridigitalGeometry {
  double l_f = 0.0;
  double l_th = 0.0;
  double l_1 = 0.0;
  double l_2 = 0.0;
  double l_r = 0.0;
  double d_ab = 0.0;
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  Branch branch = Branch::Plus;

  bool operator==(const TridigitalGeometry&) const = default;
};

struct MechanismState {
  double theta_f = 0.0;  // deg
  double theta_t = 0.0;  // deg
  GripMode grip_mode = GripMode::Opposed;
  double retro_angle = 0.0;  // deg, fixed by grip_mode

  static MechanismState make(double theta_f, double theta_t, GripMode mode) {
    return {theta_f, theta_t, mode, retro_angle_for(mode)};
  }
};

struct DriveParameters {
  double tau_in = 6000.0;   // N.mm on the upper fingers
  double omega_in = 150.0;  // deg/s

  bool operator==(const DriveParameters&) const = default;
};

struct FourbarOptions {
  double eps_arm = 0.5;      // mm/rad, below which the aperture rate is singular
  double tol_contact = 0.5;  // mm, "closed" detection
};

/// Stroke bounds in degrees of theta_f.
struct Stroke {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double extent() const { return theta_max - theta_min; }

  bool operator==(const Stroke&) const = default;
};

inline Point3 embed(const Point2& p) { return {p.x, 0.0, p.y}; }
template <typename T>
Vec3<T> embed(const Vec2<T>& p) {
  return {p.x, T(0.0), p.y};
}

inline constexpr Point3 kFlexionAxis{0.0, -1.0, 0.0};

inline void validate(const TridigitalGeometry& g) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvariantViolation, std::string(what) + " > 0");
  };
  positive(g.l_f, "l_f");
  positive(g.l_th, "l_th");
  positive(g.l_1, "l_1");
  positive(g.l_2, "l_2");
  positive(g.l_r, "l_r");
  positive(g.d_ab, "d_AB");
  if (!std::isfinite(g.alpha_deg) || !std::isfinite(g.beta_deg)) {
    fail(ErrorCode::InvariantViolation, "alpha, beta finite");
  }
}

inline Point2 finger_pivot(const TridigitalGeometry&) { return {0.0, 0.0}; }
inline Point2 thumb_pivot(const TridigitalGeometry& g) { return {g.d_ab, 0.0}; }

template <typename T>
Vec2<T> finger_contact(const TridigitalGeometry& g, const T& theta_f_rad) {
  return T(g.l_f) * unit_at(theta_f_rad);
}

template <typename T>
Vec2<T> thumb_contact(const TridigitalGeometry& g, const T& theta_t_rad) {
  return Vec2<T>{T(g.d_ab), T(0.0)} + T(g.l_th) * unit_at(theta_t_rad);
}

/// Closure solve in radians, generic over the scalar so derivatives come out
/// of the same expression. Returns nullopt when the rod cannot be assembled.
template <typename T>
std::optional<T> solve_closure(const TridigitalGeometry& g, const T& theta_f_rad, Branch branch) {
  using std::acos;
  using std::atan2;
  const Vec2<T> p = T(g.l_1) * unit_at(theta_f_rad + T(deg2rad(g.alpha_deg)));
  const Vec2<T> b{T(g.d_ab), T(0.0)};
  const Vec2<T> bp = p - b;
  const T dist = norm(bp);
  const double dv = value_of(dist);
  if (dv > g.l_2 + g.l_r || dv < std::abs(g.l_2 - g.l_r) || dv == 0.0) return std::nullopt;
  const T base = atan2(bp.y, bp.x);
  T c = (T(g.l_2 * g.l_2 - g.l_r * g.l_r) + dist * dist) / (T(2.0 * g.l_2) * dist);
  if (value_of(c) > 1.0) c = T(1.0);
  if (value_of(c) < -1.0) c = T(-1.0);
  const T gamma = acos(c);
  const T phi = branch == Branch::Plus ? base + gamma : base - gamma;
  return phi - T(deg2rad(g.beta_deg));
}

inline double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

/// | |PQ| - l_r | at a state, mm.
inline double closure_residual(const TridigitalGeometry& g, double theta_f_deg, double theta_t_deg) {
  const Point2 p = g.l_1 * unit_at(deg2rad(theta_f_deg + g.alpha_deg));
  const Point2 q = thumb_pivot(g) + g.l_2 * unit_at(deg2rad(theta_t_deg + g.beta_deg));
  return std::abs(distance(p, q) - g.l_r);
}

/// Thumb angle (deg, in (-180, 180]) closing the loop at theta_f.
inline double solve_fourbar(const TridigitalGeometry& g, double theta_f_deg, Branch branch) {
  const auto phi = solve_closure(g, deg2rad(theta_f_deg), branch);
  if (!phi) {
    fail(ErrorCode::UnreachableClosure,
         "rod cannot close the loop at theta_f=" + std::to_string(theta_f_deg) + " deg");
  }
  return wrap_deg(rad2deg(*phi));
}

inline double solve_fourbar(const TridigitalGeometry& g, double theta_f_deg) {
  return solve_fourbar(g, theta_f_deg, g.branch);
}

/// Thumb contact point in 3-D; lateral grip rotates it about the retropulsion axis.
template <typename T>
Vec3<T> thumb_contact_3d(const TridigitalGeometry& g, const T& theta_t_rad, double retro_deg,
                         const std::optional<SpatialLine>& retro_axis) {
  Vec3<T> t = embed(thumb_contact(g, theta_t_rad));
  if (retro_deg != 0.0) {
    if (!retro_axis) fail(ErrorCode::InvariantViolation, "lateral grip requires a retropulsion axis");
    SpatialLineT<T> axis{lift<T>(retro_axis->direction), lift<T>(retro_axis->anchor)};
    t = RigidTransform3T<T>::about_line(axis, T(deg2rad(retro_deg))).apply(t);
  }
  return t;
}

/// |M - T| in mm. Opposed grip uses the planar model; lateral grip needs the
/// retropulsion axis to place T.
inline double opening_distance(const TridigitalGeometry& g, const MechanismState& s,
                               const std::optional<SpatialLine>& retro_axis = std::nullopt) {
  const Point3 m = embed(finger_contact(g, deg2rad(s.theta_f)));
  const Point3 t = thumb_contact_3d(g, deg2rad(s.theta_t), s.retro_angle, retro_axis);
  return distance(m, t);
}

/// Opening and its total derivative along the rod closure, d(MT) in mm and
/// d d(MT)/d theta_f in mm/rad.
struct ApertureRate {
  double theta_t_deg = 0.0;
  double opening = 0.0;
  double rate = 0.0;
};

inline ApertureRate aperture_rate(const TridigitalGeometry& g, double theta_f_deg, GripMode mode,
                                  const std::optional<SpatialLine>& retro_axis = std::nullopt) {
  const Dual tf = Dual::variable(deg2rad(theta_f_deg));
  const auto tt = solve_closure(g, tf, g.branch);
  if (!tt) {
    fail(ErrorCode::UnreachableClosure,
         "rod cannot close the loop at theta_f=" + std::to_string(theta_f_deg) + " deg");
  }
  const Vec3<Dual> m = embed(finger_contact(g, tf));
  const Vec3<Dual> t = thumb_contact_3d(g, *tt, retro_angle_for(mode), retro_axis);
  const Dual d = distance(m, t);
  return {wrap_deg(rad2deg(tt->v)), d.v, d.d};
}

/// Grip force at M by virtual work: tau_in * dtheta_f = F * d(d(MT)).
inline double grip_force(const TridigitalGeometry& g, const MechanismState& s, const DriveParameters& drive,
                         const FourbarOptions& opt = {},
                         const std::optional<SpatialLine>& retro_axis = std::nullopt) {
  const ApertureRate ar = aperture_rate(g, s.theta_f, s.grip_mode, retro_axis);
  if (!(std::abs(ar.rate) >= opt.eps_arm)) {
    fail(ErrorCode::SingularConfiguration, "aperture rate " + std::to_string(ar.rate) +
                                               " mm/rad below threshold at theta_f=" +
                                               std::to_string(s.theta_f));
  }
  return drive.tau_in / std::abs(ar.rate);
}

struct ForceSample {
  double theta_f = 0.0;  // deg
  double theta_t = 0.0;  // deg
  double opening = 0.0;  // mm
  double force = 0.0;    // N, meaningful only when !singular
  double rate = 0.0;     // mm/rad
  bool singular = false;
  std::string reason;  // empty, "singular", "contact" or "unreachable"
};

struct ForceCurve {
  std::vector<ForceSample> samples;
  double step = 0.0;
};

/// Evenly spaced angles from lo to hi inclusive; the last interval may be short.
inline std::vector<double> stroke_samples(const Stroke& stroke, double step) {
  if (!(stroke.theta_min < stroke.theta_max)) {
    fail(ErrorCode::EmptyStroke, "theta_min must be below theta_max");
  }
  if (!(step > 0.0)) fail(ErrorCode::InvariantViolation, "step > 0");
  std::vector<double> out;
  const double n = std::floor(stroke.extent() / step + 1e-9);
  for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(stroke.theta_min + i * step);
  if (stroke.theta_max - out.back() > 1e-9 * std::max(1.0, step)) {
    out.push_back(stroke.theta_max);
  } else {
    out.back() = stroke.theta_max;
  }
  return out;
}

inline ForceCurve force_curve(const TridigitalGeometry& g, const DriveParameters& drive, const Stroke& stroke,
                              double step, const FourbarOptions& opt = {}) {
  ForceCurve curve;
  curve.step = step;
  for (double th : stroke_samples(stroke, step)) {
    ForceSample s;
    s.theta_f = th;
    try {
      const ApertureRate ar = aperture_rate(g, th, GripMode::Opposed);
      s.theta_t = ar.theta_t_deg;
      s.opening = ar.opening;
      s.rate = ar.rate;
      if (ar.opening <= opt.tol_contact) {
        s.singular = true;
        s.reason = "contact";
      } else if (std::abs(ar.rate) < opt.eps_arm) {
        s.singular = true;
        s.reason = "singular";
      } else {
        s.force = drive.tau_in / std::abs(ar.rate);
      }
    } catch (const MechanismError&) {
      s.singular = true;
      s.reason = "unreachable";
    }
    curve.samples.push_back(s);
  }
  return curve;
}

/// (F_max - F_min) / F_max over the non-singular samples.
inline double force_variation(const ForceCurve& curve) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : curve.samples) {
    if (s.singular) continue;
    lo = std::min(lo, s.force);
    hi = std::max(hi, s.force);
  }
  if (!(hi >= lo)) fail(ErrorCode::AllSingular, "no valid sample in the curve");
  if (hi <= 0.0) return 0.0;
  return (hi - lo) / hi;
}

inline double closing_time(double stroke_extent_deg, double omega_in) {
  if (!(omega_in > 0.0)) fail(ErrorCode::NonPositiveSpeed, "omega_in must be positive");
  return std::abs(stroke_extent_deg) / omega_in;
}

/// Result of fitting the stroke to an opening and a closing-time target.
struct Calibration {
  double theta_closed = 0.0;  // deg, contact configuration
  double theta_open = 0.0;    // deg
  double contact_residual = 0.0;  // mm, d(MT) at theta_closed
  double opening_residual = 0.0;  // mm, d(MT) at theta_open minus target
  double time_residual = 0.0;     // s, closing time minus target

  Stroke stroke() const {
    return {std::min(theta_closed, theta_open), std::max(theta_closed, theta_open)};
  }
  bool operator==(const Calibration&) const = default;
};

namespace detail {

// Golden-section minimizer on [a, b].
template <typename F>
double golden_min(F&& f, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

template <typename F>
double bisect(F&& f, double a, double b, double tol = 1e-13) {
  double fa = f(a);
  for (int i = 0; i < 200 && std::abs(b - a) > tol; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Opposed-grip opening at theta_f on the geometry's branch; nullopt if unassemblable.
inline std::optional<double> try_opening(const TridigitalGeometry& g, double theta_f_deg) {
  const auto tt = solve_closure(g, deg2rad(theta_f_deg), g.branch);
  if (!tt) return std::nullopt;
  return distance(finger_contact(g, deg2rad(theta_f_deg)), thumb_contact(g, *tt));
}

/// Contact configuration: the minimum of d(MT) over the assemblable range.
struct ContactPoint {
  double theta_f = 0.0;
  double opening = 0.0;
};

inline std::optional<ContactPoint> find_contact(const TridigitalGeometry& g) {
  constexpr double kScan = 0.25;
  std::optional<ContactPoint> best;
  for (double th = -180.0; th < 180.0; th += kScan) {
    const auto d = try_opening(g, th);
    if (d && (!best || *d < best->opening)) best = ContactPoint{th, *d};
  }
  if (!best) return std::nullopt;
  auto f = [&](double th) {
    const auto d = try_opening(g, th);
    return d ? *d : std::numeric_limits<double>::infinity();
  };
  const double th = detail::golden_min(f, best->theta_f - kScan, best->theta_f + kScan);
  const double d = f(th);
  if (d < best->opening) best = ContactPoint{th, d};
  return best;
}

/// Branch whose contact configuration has the smallest d(MT).
inline Branch contact_branch(TridigitalGeometry g) {
  g.branch = Branch::Plus;
  const auto plus = find_contact(g);
  g.branch = Branch::Minus;
  const auto minus = find_contact(g);
  if (!minus) return Branch::Plus;
  if (!plus) return Branch::Minus;
  return minus->opening < plus->opening ? Branch::Minus : Branch::Plus;
}

inline bool is_feasible(const TridigitalGeometry& g) {
  for (double th = -180.0; th < 180.0; th += 0.5) {
    if (try_opening(g, th)) return true;
  }
  return false;
}

/// Fit stroke bounds to "contact at the closed end, target_opening at the open
/// end, extent = omega_in * target_time". When both cannot hold, the open end
/// minimizes the sum of squared relative residuals of opening and time.
inline Calibration calibrate_stroke(const TridigitalGeometry& g, double target_opening, double target_time,
                                    double omega_in, const FourbarOptions& opt = {}) {
  if (!(omega_in > 0.0)) fail(ErrorCode::NonPositiveSpeed, "omega_in must be positive");
  if (!(target_opening > 0.0) || !(target_time > 0.0)) {
    fail(ErrorCode::InvariantViolation, "targets must be positive");
  }
  const auto contact = find_contact(g);
  if (!contact) fail(ErrorCode::CalibrationInfeasible, "geometry cannot be assembled");
  if (contact->opening > opt.tol_contact) {
    fail(ErrorCode::CalibrationInfeasible,
         "closest approach " + std::to_string(contact->opening) + " mm exceeds contact tolerance");
  }
  const double extent_time = omega_in * target_time;

  // Walk away from contact on each side while the opening keeps growing.
  struct Side {
    double dir;
    double reach = 0.0;         // largest monotonic extent, deg
    double max_open = 0.0;      // opening at that extent
    std::optional<double> hit{};  // extent reaching the target
  };
  Side sides[2] = {{+1.0}, {-1.0}};
  constexpr double kWalk = 0.05;
  for (auto& s : sides) {
    double prev = contact->opening;
    for (double e = kWalk; e < 360.0; e += kWalk) {
      const auto d = try_opening(g, contact->theta_f + s.dir * e);
      if (!d || *d < prev) break;
      s.reach = e;
      s.max_open = *d;
      if (*d >= target_opening && !s.hit) {
        s.hit = detail::bisect(
            [&](double x) { return *try_opening(g, contact->theta_f + s.dir * x) - target_opening; },
            e - kWalk, e);
      }
      prev = *d;
    }
  }
  const Side* side = nullptr;
  for (const auto& s : sides) {
    if (s.hit && (!side || *s.hit < *side->hit)) side = &s;
  }
  if (!side) {
    const double best = std::max(sides[0].max_open, sides[1].max_open);
    fail(ErrorCode::CalibrationInfeasible, "target opening " + std::to_string(target_opening) +
                                               " mm unreachable; best " + std::to_string(best) + " mm");
  }

  auto open_at = [&](double e) { return *try_opening(g, contact->theta_f + side->dir * e); };
  auto cost = [&](double e) {
    const double ro = (open_at(e) - target_opening) / target_opening;
    const double rt = (e / omega_in - target_time) / target_time;
    return ro * ro + rt * rt;
  };
  const double lo = std::min(*side->hit, extent_time);
  const double hi = std::min(std::max(*side->hit, extent_time), side->reach);
  const double extent = hi > lo ? detail::golden_min(cost, lo, hi) : lo;

  Calibration c;
  c.theta_closed = contact->theta_f;
  c.theta_open = contact->theta_f + side->dir * extent;
  c.contact_residual = contact->opening;
  c.opening_residual = open_at(extent) - target_opening;
  c.time_residual = extent / omega_in - target_time;
  return c;
}

}  // namespace myohand

#endif  // MYOHAND_FOURBAR_HPP
