// Regenerates the reference project and cable designs under data/.
//   make_designs <data-dir>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "myohand/io.hpp"

using namespace myohand;

namespace {

Point2 polar(Point2 c, double r, double deg) {
  return {c.x + r * std::cos(deg2rad(deg)), c.y + r * std::sin(deg2rad(deg))};
}

// Flexion angles at which the finger and thumb contact points coincide.
std::pair<double, double> touching_angles(const TridigitalGeometry& g) {
  const double x = (g.d_ab * g.d_ab + g.l_f * g.l_f - g.l_th * g.l_th) / (2.0 * g.d_ab);
  const double y = std::sqrt(g.l_f * g.l_f - x * x);
  return {rad2deg(std::atan2(y, x)), rad2deg(std::atan2(y, x - g.d_ab))};
}

// Eyelet where the retropulsion axis pierces the flexion plane.
Point2 axis_eyelet(const AxisPlacement& a) {
  const SpatialLine line = to_line(a);
  const double t = -line.anchor.y / line.direction.y;
  const Point3 p = line.anchor + t * line.direction;
  return {p.x, p.z};
}

void set_rest_lengths(CableDesign& d, double tf, double tt) {
  const auto poses = body_poses_deg(d.frame(), tf, tt, 0.0);
  d.flexor.rest_length = cable_length(d.flexor, poses);
  if (d.extensor) d.extensor->rest_length = cable_length(*d.extensor, poses);
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";

  Project p;
  p.name = "variplus-tridigital";
  p.geometry = {75.0, 52.0, 14.0, 13.0, 40.0, 43.8, 8.0, 180.0, Branch::Plus};
  p.drive = {6000.0, 150.0};
  p.calibration.result = calibrate_stroke(p.geometry, p.calibration.target_opening, p.calibration.target_time,
                                          p.drive.omega_in, p.fourbar);
  p.axis = {-43.5, 51.0, 18.224, -7.804};
  p.targets.envelope = {{-15.0, -30.0, -35.0}, {65.0, 30.0, 10.0}};

  const auto [tf_c, tt_c] = touching_angles(p.geometry);
  const Point2 a = finger_pivot(p.geometry), b = thumb_pivot(p.geometry);

  auto base = [&](const char* name, int iteration) {
    CableDesign d;
    d.name = name;
    d.iteration = iteration;
    d.geometry = p.geometry;
    d.axis = p.axis;
    d.theta_open_deg = tf_c + 55.0;
    d.max_stroke_deg = 60.0;
    d.thumb_min_deg = 0.0;
    d.thumb_max_deg = 110.0;
    return d;
  };

  // Straight cable between the two phalanges.
  CableDesign it1 = base("straight-cable", 1);
  it1.note = "direct anchor-to-anchor cable; finger moment arm collapses near full opening";
  it1.flexor.elements = {Anchor{polar(a, 15.0, 275.0), BodyId::Fingers}, Anchor{polar(b, 12.0, 60.0), BodyId::Thumb}};
  set_rest_lengths(it1, tf_c, tt_c);

  // Same anchors, redirected over a chassis pulley.
  CableDesign it2 = base("chassis-pulley", 2);
  it2.note = "pulley between the pivots; arms vary along the stroke";
  it2.flexor.elements = {Anchor{polar(a, 15.0, 275.0), BodyId::Fingers},
                         Pulley{{4.0, 10.0}, 5.0, BodyId::Chassis, Winding::CounterClockwise},
                         Anchor{polar(b, 12.0, 60.0), BodyId::Thumb}};
  set_rest_lengths(it2, tf_c, tt_c);

  // Equal-radius drums on both joints, routed through an eyelet on the
  // retropulsion axis so the thumb can swing without changing cable length.
  CableDesign it3 = base("drum-eyelet", 3);
  it3.note = "10 mm drums on both joints, eyelet on the retropulsion axis, antagonist extensor";
  it3.dist_axis_max = 2.0;
  const Point2 e = axis_eyelet(p.axis);
  it3.flexor.elements = {Anchor{polar(a, 10.5, 70.0), BodyId::Fingers},
                         WrapSurface{a, 10.0, 0.0, 360.0, BodyId::Fingers, Winding::CounterClockwise},
                         Anchor{e, BodyId::Chassis},
                         WrapSurface{b, 10.0, 0.0, 360.0, BodyId::Thumb, Winding::Clockwise},
                         Anchor{polar(b, 10.5, 320.0), BodyId::Thumb}};
  CableRoute ext;
  ext.role = CableRole::Extensor;
  ext.elements = {Anchor{polar(a, 10.5, 30.0), BodyId::Fingers},
                  WrapSurface{a, 10.0, 0.0, 360.0, BodyId::Fingers, Winding::Clockwise},
                  Anchor{{e.x, e.y - 1.5}, BodyId::Chassis},
                  WrapSurface{b, 10.0, 0.0, 360.0, BodyId::Thumb, Winding::CounterClockwise},
                  Anchor{polar(b, 10.5, 340.0), BodyId::Thumb}};
  it3.extensor = ext;
  set_rest_lengths(it3, tf_c, tt_c);

  for (const auto* d : {&it1, &it2, &it3}) validate(*d);
  p.cable_design = it3;
  validate(p);

  save_project(p, dir / "variplus.json");
  write_text_file(dir / "cable_iteration1.json", dump(cable_design_file_json(it1)));
  write_text_file(dir / "cable_iteration2.json", dump(cable_design_file_json(it2)));
  write_text_file(dir / "cable_iteration3.json", dump(cable_design_file_json(it3)));
  std::printf("contact configuration theta_f=%.6f theta_t=%.6f\n", tf_c, tt_c);
  std::printf("calibrated stroke [%.6f, %.6f]\n", p.calibration.result.stroke().theta_min,
              p.calibration.result.stroke().theta_max);
  return 0;
}
