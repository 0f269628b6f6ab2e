#ifndef MYOHAND_THUMB_AXIS_HPP
#define MYOHAND_THUMB_AXIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "myohand/axis_placement.hpp"
#include "myohand/cable.hpp"
#include "myohand/errors.hpp"
#include "myohand/fourbar.hpp"
#include "myohand/geometry.hpp"

namespace myohand {

/// Thumb pose: flexion about the thumb pivot, then retropulsion about the axis.
inline RigidTransform3 thumb_pose(const AxisPlacement& axis, const TridigitalGeometry& g, double retro_deg,
                                  double flexion_deg) {
  const auto flex = RigidTransform3::about_line({kFlexionAxis, embed(thumb_pivot(g))}, deg2rad(flexion_deg));
  const auto retro = RigidTransform3::about_line(to_line(axis), deg2rad(retro_deg));
  return retro * flex;
}

inline RigidTransform3 finger_pose(const TridigitalGeometry& g, double flexion_deg) {
  return RigidTransform3::about_line({kFlexionAxis, embed(finger_pivot(g))}, deg2rad(flexion_deg));
}

// Body-frame key points (zero pose coincides with the mechanism frame).
inline Point3 thumb_tip_body(const TridigitalGeometry& g) { return {g.d_ab + g.l_th, 0.0, 0.0}; }
inline Point3 finger_tip_body(const TridigitalGeometry& g) { return {g.l_f, 0.0, 0.0}; }

/// Flexion angles at the open and closed extremes, deg.
struct FlexionRange {
  double theta_t_open = 0.0;
  double theta_t_closed = 0.0;
  double theta_f_open = 0.0;
  double theta_f_closed = 0.0;
};

struct ExtremePose {
  std::string name;
  double retro = 0.0;
  double theta_f = 0.0;
  double theta_t = 0.0;
  RigidTransform3 thumb;
  RigidTransform3 fingers;
  Point3 thumb_base;  // thumb flexion pivot
  Point3 t;           // thumb contact point
  Point3 m;           // finger contact point
  double opening = 0.0;
};

struct ExtremePoseSet {
  std::array<ExtremePose, 4> poses;  // opposed-open, opposed-closed, lateral-open, lateral-closed

  const ExtremePose& opposed_open() const { return poses[0]; }
  const ExtremePose& opposed_closed() const { return poses[1]; }
  const ExtremePose& lateral_open() const { return poses[2]; }
  const ExtremePose& lateral_closed() const { return poses[3]; }
};

inline ExtremePose make_extreme_pose(const std::string& name, const AxisPlacement& axis, const TridigitalGeometry& g,
                                     double retro, double theta_f, double theta_t) {
  ExtremePose p;
  p.name = name;
  p.retro = retro;
  p.theta_f = theta_f;
  p.theta_t = theta_t;
  p.thumb = thumb_pose(axis, g, retro, theta_t);
  p.fingers = finger_pose(g, theta_f);
  p.thumb_base = p.thumb.apply(embed(thumb_pivot(g)));
  p.t = p.thumb.apply(thumb_tip_body(g));
  p.m = p.fingers.apply(finger_tip_body(g));
  p.opening = distance(p.m, p.t);
  return p;
}

inline ExtremePoseSet extreme_positions(const AxisPlacement& axis, const TridigitalGeometry& g,
                                        const FlexionRange& range, double retro_deg = 90.0) {
  validate(axis);
  ExtremePoseSet s;
  s.poses[0] = make_extreme_pose("opposed-open", axis, g, 0.0, range.theta_f_open, range.theta_t_open);
  s.poses[1] = make_extreme_pose("opposed-closed", axis, g, 0.0, range.theta_f_closed, range.theta_t_closed);
  s.poses[2] = make_extreme_pose("lateral-open", axis, g, retro_deg, range.theta_f_open, range.theta_t_open);
  s.poses[3] = make_extreme_pose("lateral-closed", axis, g, retro_deg, range.theta_f_closed, range.theta_t_closed);
  return s;
}

// ---------------------------------------------------------------------------
// Design criteria

struct Box {
  Point3 min{};
  Point3 max{};

  bool operator==(const Box&) const = default;
};

/// Signed distance to the box surface, negative inside.
inline double signed_distance(const Box& b, const Point3& p) {
  const double dx = std::max(b.min.x - p.x, p.x - b.max.x);
  const double dy = std::max(b.min.y - p.y, p.y - b.max.y);
  const double dz = std::max(b.min.z - p.z, p.z - b.max.z);
  const double inside = std::min(0.0, std::max({dx, dy, dz}));
  const double ox = std::max(dx, 0.0), oy = std::max(dy, 0.0), oz = std::max(dz, 0.0);
  return std::sqrt(ox * ox + oy * oy + oz * oz) + inside;
}

struct DesignTargets {
  double opening_opposed_min = 100.0;  // mm
  double opening_lateral_min = 35.0;   // mm
  double contact_tol = 5.0;            // mm
  Box envelope{{-15.0, -30.0, -35.0}, {65.0, 30.0, 10.0}};
  double weight_hard = 1.0;
  double weight_anthropomorphism = 0.01;
  double retro_deg = 90.0;

  bool operator==(const DesignTargets&) const = default;
};

inline void validate(const DesignTargets& t) {
  if (!(t.contact_tol > 0.0)) fail(ErrorCode::InvariantViolation, "contact_tol > 0");
  if (!(t.opening_opposed_min >= 0.0) || !(t.opening_lateral_min >= 0.0)) {
    fail(ErrorCode::InvariantViolation, "opening targets >= 0");
  }
  const Box& b = t.envelope;
  if (!(b.min.x < b.max.x && b.min.y < b.max.y && b.min.z < b.max.z)) {
    fail(ErrorCode::InvariantViolation, "envelope non-degenerate");
  }
  if (!(t.weight_hard > 0.0) || !(t.weight_anthropomorphism >= 0.0)) {
    fail(ErrorCode::InvariantViolation, "weights: hard > 0, anthropomorphism >= 0");
  }
  if (t.retro_deg != 90.0) fail(ErrorCode::InvariantViolation, "retro_deg = 90");
}

struct ConstraintReport {
  // Achieved values.
  double opening_opposed = 0.0;   // mm, opposed-open
  double opening_lateral = 0.0;   // mm, lateral-open
  double contact_opposed = 0.0;   // mm, closest approach in opposed grip
  double contact_lateral = 0.0;   // mm, closest approach in lateral grip
  double lateral_closed_theta_f = 0.0;
  double lateral_closed_theta_t = 0.0;
  double envelope_distance = 0.0;  // mm, signed, of the axis pivot region
  std::optional<double> attachment_distance;  // mm, flexor thumb-side attachment to the axis

  // Residuals: pass <=> residual <= 0.
  double r_opening_opposed = 0.0;
  double r_opening_lateral = 0.0;
  double r_contact_opposed = 0.0;
  double r_contact_lateral = 0.0;
  double r_envelope = 0.0;
  double r_attachment = 0.0;  // 0 when the design sets no dist_axis_max
  double anthropomorphism = 0.0;  // mm

  double weight_hard = 1.0;
  double weight_anthropomorphism = 0.01;
  double hard_penalty = 0.0;
  double penalty = 0.0;

  bool pass_opening_opposed() const { return r_opening_opposed <= 0.0; }
  bool pass_opening_lateral() const { return r_opening_lateral <= 0.0; }
  bool pass_contact() const { return r_contact_opposed <= 0.0 && r_contact_lateral <= 0.0; }
  bool pass_envelope() const { return r_envelope <= 0.0; }
  bool pass_attachment() const { return r_attachment <= 0.0; }
  bool feasible() const { return hard_penalty == 0.0; }
};

inline double hinge_sq(double r) { return r > 0.0 ? r * r : 0.0; }

/// Coupled (theta_f, theta_t) table over the opposed stroke, shared by every
/// axis evaluation. The opposed coupling does not depend on the axis.
struct FlexionSchedule {
  std::vector<double> theta_f;
  std::vector<double> theta_t;
  FlexionRange range;

  double thumb_at(double tf) const {
    if (tf <= theta_f.front()) return theta_t.front();
    if (tf >= theta_f.back()) return theta_t.back();
    const auto it = std::upper_bound(theta_f.begin(), theta_f.end(), tf);
    const std::size_t i = static_cast<std::size_t>(it - theta_f.begin());
    const double w = (tf - theta_f[i - 1]) / (theta_f[i] - theta_f[i - 1]);
    return theta_t[i - 1] + w * (theta_t[i] - theta_t[i - 1]);
  }
};

inline FlexionSchedule flexion_schedule(const CableDesign& d, double step_deg = 0.5, const CableOptions& opt = {}) {
  FlexionSchedule s;
  try {
    const Stroke stroke = cable_stroke(d, GripMode::Opposed, opt);
    for (double tf : stroke_samples(stroke, step_deg)) {
      s.theta_f.push_back(tf);
      s.theta_t.push_back(coupled_thumb_angle(d, tf, GripMode::Opposed, opt));
    }
  } catch (const MechanismError& e) {
    fail(ErrorCode::KinematicsInfeasible, std::string("opposed coupling: ") + e.what());
  }
  s.range.theta_f_closed = s.theta_f.front();
  s.range.theta_t_closed = s.theta_t.front();
  s.range.theta_f_open = s.theta_f.back();
  s.range.theta_t_open = s.theta_t.back();
  return s;
}

/// Segment of the axis used for the envelope test: from its palm-plane
/// intercept to the point closest to the thumb pivot.
inline std::pair<Point3, Point3> axis_pivot_region(const AxisPlacement& axis, const TridigitalGeometry& g) {
  const SpatialLine line = to_line(axis);
  const Point3 b = embed(thumb_pivot(g));
  const Point3 foot = line.anchor + dot(b - line.anchor, line.direction) * line.direction;
  return {line.anchor, foot};
}

/// Everything evaluate_axis needs besides the axis itself.
struct AxisProblem {
  TridigitalGeometry geometry;
  DesignTargets targets;
  FlexionSchedule schedule;
  // The cable route must keep reaching the thumb through the axis.
  std::optional<Point3> attachment;
  double dist_axis_max = 0.0;

  static AxisProblem make(const TridigitalGeometry& g, const CableDesign& d, const DesignTargets& t) {
    validate(t);
    CableDesign copy = d;
    copy.geometry = g;
    AxisProblem p{g, t, flexion_schedule(copy), std::nullopt, 0.0};
    if (d.dist_axis_max) {
      p.attachment = thumb_side_attachment(d.flexor);
      p.dist_axis_max = *d.dist_axis_max;
    }
    return p;
  }
};

inline ConstraintReport evaluate_axis(const AxisProblem& p, const AxisPlacement& axis) {
  validate(axis);
  const auto& g = p.geometry;
  const auto& t = p.targets;
  const auto& s = p.schedule;
  if (s.theta_f.size() < 2 || s.theta_f.size() != s.theta_t.size()) {
    fail(ErrorCode::KinematicsInfeasible, "flexion schedule has fewer than two samples");
  }
  const RigidTransform3 retro = RigidTransform3::about_line(to_line(axis), deg2rad(t.retro_deg));

  auto opening = [&](double tf, double tt, bool lateral) {
    const Point3 m = finger_pose(g, tf).apply(finger_tip_body(g));
    Point3 tp = thumb_pose(axis, g, 0.0, tt).apply(thumb_tip_body(g));
    if (lateral) tp = retro.apply(tp);
    return distance(m, tp);
  };
  // Closest approach along the schedule, refined between neighbouring samples.
  auto closest = [&](bool lateral) {
    std::size_t best = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.theta_f.size(); ++i) {
      const double d = opening(s.theta_f[i], s.theta_t[i], lateral);
      if (d < dmin) {
        dmin = d;
        best = i;
      }
    }
    const double lo = s.theta_f[best == 0 ? 0 : best - 1];
    const double hi = s.theta_f[std::min(best + 1, s.theta_f.size() - 1)];
    double tf = s.theta_f[best];
    if (hi > lo) {
      auto f = [&](double x) { return opening(x, s.thumb_at(x), lateral); };
      const double x = detail::golden_min(f, lo, hi, 1e-9);
      if (f(x) < dmin) {
        dmin = f(x);
        tf = x;
      }
    }
    return std::pair{tf, dmin};
  };

  ConstraintReport r;
  r.opening_opposed = opening(s.range.theta_f_open, s.range.theta_t_open, false);
  r.opening_lateral = opening(s.range.theta_f_open, s.range.theta_t_open, true);
  r.contact_opposed = opening(s.range.theta_f_closed, s.range.theta_t_closed, false);
  const auto [tf_lat, d_lat] = closest(true);
  r.contact_lateral = d_lat;
  r.lateral_closed_theta_f = tf_lat;
  r.lateral_closed_theta_t = s.thumb_at(tf_lat);

  const auto [a, b] = axis_pivot_region(axis, g);
  r.envelope_distance = std::max(signed_distance(t.envelope, a), signed_distance(t.envelope, b));

  r.r_opening_opposed = t.opening_opposed_min - r.opening_opposed;
  r.r_opening_lateral = t.opening_lateral_min - r.opening_lateral;
  r.r_contact_opposed = std::abs(r.contact_opposed) - t.contact_tol;
  r.r_contact_lateral = std::abs(r.contact_lateral) - t.contact_tol;
  r.r_envelope = r.envelope_distance;
  if (p.attachment) {
    r.attachment_distance = distance_to_line(*p.attachment, to_line(axis));
    r.r_attachment = *r.attachment_distance - p.dist_axis_max;
  }
  r.anthropomorphism = std::abs(retro.apply(embed(thumb_pivot(g))).z);

  r.weight_hard = t.weight_hard;
  r.weight_anthropomorphism = t.weight_anthropomorphism;
  r.hard_penalty = t.weight_hard * (hinge_sq(r.r_opening_opposed) + hinge_sq(r.r_opening_lateral) +
                                    hinge_sq(r.r_contact_opposed) + hinge_sq(r.r_contact_lateral) +
                                    hinge_sq(r.r_envelope) + hinge_sq(r.r_attachment));
  r.penalty = r.hard_penalty + t.weight_anthropomorphism * r.anthropomorphism;
  return r;
}

inline ConstraintReport evaluate_axis(const AxisPlacement& axis, const TridigitalGeometry& g, const CableDesign& d,
                                      const DesignTargets& t) {
  validate(axis);
  return evaluate_axis(AxisProblem::make(g, d, t), axis);
}

/// Extreme poses for a report: open poses share the open flexion angles;
/// closed poses sit at each grip's own contact configuration.
inline ExtremePoseSet report_poses(const AxisProblem& p, const AxisPlacement& axis, const ConstraintReport& r) {
  const auto& range = p.schedule.range;
  ExtremePoseSet s = extreme_positions(axis, p.geometry, range, p.targets.retro_deg);
  s.poses[3] = make_extreme_pose("lateral-closed", axis, p.geometry, p.targets.retro_deg, r.lateral_closed_theta_f,
                                 r.lateral_closed_theta_t);
  return s;
}

// ---------------------------------------------------------------------------
// Search

struct TraceEntry {
  std::size_t index = 0;
  int start = -1;  // -1 for initial guesses and grid points
  std::string phase;
  AxisPlacement axis;
  bool infeasible_kinematics = false;
  ConstraintReport report;
  double penalty = 0.0;
};

struct OptimizeOptions {
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  std::array<double, 2> x0_range{-20.0, 70.0};
  std::array<double, 2> y0_range{-40.0, 40.0};
  int grid_azimuth = 12;
  int grid_elevation = 5;
  int grid_x0 = 6;
  int grid_y0 = 6;
  int starts = 8;
  double simplex_tol = 1e-7;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct OptimizeResult {
  AxisPlacement axis;
  ConstraintReport report;
  std::vector<TraceEntry> trace;
  bool feasible = false;
  std::string diagnosis;
};

namespace detail {

inline AxisPlacement to_chart(const std::array<double, 4>& x) {
  AxisPlacement a;
  a.azimuth = std::remainder(x[0], 360.0);
  if (a.azimuth == -180.0) a.azimuth = 180.0;
  a.elevation = std::clamp(x[1], 0.5, 90.0);
  a.x0 = x[2];
  a.y0 = x[3];
  return a;
}

inline std::array<double, 4> from_chart(const AxisPlacement& a) { return {a.azimuth, a.elevation, a.x0, a.y0}; }

inline TraceEntry evaluate_entry(const AxisProblem& p, const AxisPlacement& a) {
  TraceEntry e;
  e.axis = a;
  try {
    e.report = evaluate_axis(p, a);
    e.penalty = e.report.penalty;
  } catch (const MechanismError&) {
    e.infeasible_kinematics = true;
    e.penalty = std::numeric_limits<double>::infinity();
    e.report.hard_penalty = e.penalty;
    e.report.penalty = e.penalty;
  }
  return e;
}

inline bool entry_feasible(const TraceEntry& e) { return !e.infeasible_kinematics && e.report.feasible(); }

/// Strict ordering used everywhere a "best" is picked: feasible points first.
inline bool better(const TraceEntry& a, const TraceEntry& b) {
  const auto key = [](const TraceEntry& e) {
    return std::make_tuple(!entry_feasible(e), e.penalty, e.report.anthropomorphism, e.axis.azimuth,
                           e.axis.elevation, e.axis.x0, e.axis.y0);
  };
  return key(a) < key(b);
}

// Uniform in [0, 1) from the raw 64-bit engine output; avoids
// implementation-defined distributions so traces match across toolchains.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// "restore" drives the hard penalty to zero; "refine" then lowers the full
// penalty while rejecting hard violations outright.
enum class SimplexPhase { Restore, Refine };

/// Nelder-Mead on the four chart parameters with a fixed evaluation budget.
inline std::vector<TraceEntry> simplex_search(const AxisProblem& p, const AxisPlacement& start, std::size_t budget,
                                              const std::array<double, 4>& scale, double tol, int start_index,
                                              SimplexPhase phase) {
  std::vector<TraceEntry> trace;
  if (budget == 0) return trace;
  auto eval = [&](const std::array<double, 4>& x) {
    TraceEntry e = evaluate_entry(p, to_chart(x));
    e.start = start_index;
    e.phase = phase == SimplexPhase::Restore ? "restore" : "refine";
    trace.push_back(e);
    if (phase == SimplexPhase::Restore) return e.report.hard_penalty;
    return e.report.hard_penalty > 0.0 ? std::numeric_limits<double>::infinity() : e.penalty;
  };
  struct Vertex {
    std::array<double, 4> x;
    double f;
  };
  std::vector<Vertex> s;
  const auto x0 = from_chart(start);
  s.push_back({x0, eval(x0)});
  for (int i = 0; i < 4 && trace.size() < budget; ++i) {
    auto x = x0;
    x[i] += scale[i];
    s.push_back({x, eval(x)});
  }
  if (s.size() < 5) return trace;

  auto order = [&] {
    std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  while (trace.size() < budget) {
    order();
    double size = 0.0;
    for (int i = 1; i < 5; ++i)
      for (int k = 0; k < 4; ++k) size = std::max(size, std::abs(s[i].x[k] - s[0].x[k]));
    if (size < tol) break;
    if (phase == SimplexPhase::Restore && s[0].f == 0.0) break;
    std::array<double, 4> c{};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) c[k] += s[i].x[k] / 4.0;
    auto along = [&](double t) {
      std::array<double, 4> x;
      for (int k = 0; k < 4; ++k) x[k] = c[k] + t * (s[4].x[k] - c[k]);
      return x;
    };
    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < s[0].f) {
      if (trace.size() >= budget) {
        s[4] = {xr, fr};
        break;
      }
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      s[4] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < s[3].f) {
      s[4] = {xr, fr};
    } else {
      if (trace.size() >= budget) break;
      const bool outside = fr < s[4].f;
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, s[4].f)) {
        s[4] = {xc, fc};
      } else {
        for (int i = 1; i < 5 && trace.size() < budget; ++i) {
          for (int k = 0; k < 4; ++k) s[i].x[k] = s[0].x[k] + 0.5 * (s[i].x[k] - s[0].x[k]);
          s[i].f = eval(s[i].x);
        }
      }
    }
  }
  return trace;
}

}  // namespace detail

/// Multi-start grid + simplex search for an axis placement. Deterministic for
/// a given (seed, budget): each start gets a fixed share of the budget and the
/// per-start traces are concatenated by start index.
inline OptimizeResult optimize_axis(const std::vector<AxisPlacement>& initial, const AxisProblem& p,
                                    const OptimizeOptions& opt) {
  if (opt.budget == 0) fail(ErrorCode::InvariantViolation, "budget > 0");
  OptimizeResult out;
  auto& trace = out.trace;
  auto push = [&](TraceEntry e, const char* phase) {
    e.phase = phase;
    e.index = trace.size();
    trace.push_back(std::move(e));
  };

  for (const auto& a : initial) {
    if (trace.size() >= opt.budget) break;
    push(detail::evaluate_entry(p, a), "initial");
  }

  // Coarse grid, offset inside each cell by a seeded draw.
  std::mt19937_64 rng(opt.seed);
  std::array<double, 4> jitter;
  for (auto& j : jitter) j = detail::unit_draw(rng);
  const double dx0 = (opt.x0_range[1] - opt.x0_range[0]) / opt.grid_x0;
  const double dy0 = (opt.y0_range[1] - opt.y0_range[0]) / opt.grid_y0;
  const double daz = 360.0 / opt.grid_azimuth;
  const double del = 90.0 / opt.grid_elevation;
  for (int i = 0; i < opt.grid_azimuth && trace.size() < opt.budget; ++i)
    for (int j = 0; j < opt.grid_elevation && trace.size() < opt.budget; ++j)
      for (int k = 0; k < opt.grid_x0 && trace.size() < opt.budget; ++k)
        for (int l = 0; l < opt.grid_y0 && trace.size() < opt.budget; ++l) {
          const AxisPlacement a = detail::to_chart({-180.0 + (i + jitter[0]) * daz, (j + jitter[1]) * del,
                                                    opt.x0_range[0] + (k + jitter[2]) * dx0,
                                                    opt.y0_range[0] + (l + jitter[3]) * dy0});
          push(detail::evaluate_entry(p, a), "grid");
        }

  // Simplex from the best distinct starting points.
  std::vector<TraceEntry> ranked = trace;
  std::stable_sort(ranked.begin(), ranked.end(), detail::better);
  std::vector<AxisPlacement> starts;
  for (const auto& e : ranked) {
    if (static_cast<int>(starts.size()) >= opt.starts) break;
    if (!std::isfinite(e.penalty)) break;
    if (std::find(starts.begin(), starts.end(), e.axis) == starts.end()) starts.push_back(e.axis);
  }
  const std::size_t remaining = opt.budget - trace.size();
  if (!starts.empty() && remaining > 0) {
    const std::size_t share = remaining / starts.size();
    const std::array<double, 4> scale{daz / 2.0, del / 2.0, dx0 / 2.0, dy0 / 2.0};
    std::vector<std::vector<TraceEntry>> runs(starts.size());
    unsigned nthreads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(starts.size()));
    auto worker = [&](unsigned w) {
      for (std::size_t i = w; i < starts.size(); i += nthreads) {
        const int id = static_cast<int>(i);
        auto run = detail::simplex_search(p, starts[i], share, scale, opt.simplex_tol, id, detail::SimplexPhase::Restore);
        const auto found = std::find_if(run.begin(), run.end(), detail::entry_feasible);
        if (found != run.end() && run.size() < share) {
          auto more = detail::simplex_search(p, found->axis, share - run.size(), scale, opt.simplex_tol, id,
                                             detail::SimplexPhase::Refine);
          run.insert(run.end(), more.begin(), more.end());
        }
        runs[i] = std::move(run);
      }
    };
    if (nthreads <= 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
      for (auto& t : pool) t.join();
    }
    for (auto& run : runs)
      for (auto& e : run) {
        e.index = trace.size();
        trace.push_back(std::move(e));
      }
  }

  const auto best = std::min_element(trace.begin(), trace.end(), detail::better);
  out.axis = best->axis;
  out.report = best->report;
  out.feasible = detail::entry_feasible(*best);
  if (!out.feasible) {
    const auto& r = best->report;
    out.diagnosis = best->infeasible_kinematics
                        ? "kinematics infeasible at every evaluated placement"
                        : "best hard penalty " + std::to_string(r.hard_penalty) + " (opening_opposed " +
                              std::to_string(r.r_opening_opposed) + ", opening_lateral " +
                              std::to_string(r.r_opening_lateral) + ", contact " +
                              std::to_string(std::max(r.r_contact_opposed, r.r_contact_lateral)) + ", envelope " +
                              std::to_string(r.r_envelope) + ", attachment " +
                              std::to_string(r.r_attachment) + ")";
  }
  return out;
}

}  // namespace myohand

#endif  // MYOHAND_THUMB_AXIS_HPP
