#ifndef MYOHAND_SERVICE_HPP
#define MYOHAND_SERVICE_HPP

#include <string>

#include "myohand/io.hpp"

namespace myohand {

struct ServiceResponse {
  int status = 200;
  json body;
};

inline ServiceResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

/// Pure request handlers over one project loaded at startup. Nothing here
/// mutates after construction, so handlers are safe to call concurrently.
class DesignService {
 public:
  DesignService(Project project, std::string project_text)
      : project_(std::move(project)), text_(std::move(project_text)) {
    if (project_.cable_design) {
      problem_ = AxisProblem::make(project_.geometry, *project_.cable_design, project_.targets);
    }
    options_.eps_arm = project_.fourbar.eps_arm;
    options_.tol_contact = project_.fourbar.tol_contact;
  }

  static DesignService from_file(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    Project p = parse_project(text, path.string());
    return DesignService(std::move(p), std::move(text));
  }

  const Project& project() const { return project_; }

  // GET /api/project: the file as loaded, byte for byte.
  const std::string& project_text() const { return text_; }

  ServiceResponse evaluate_axis(const std::string& body) const {
    AxisPlacement axis;
    DesignTargets targets = project_.targets;
    try {
      const json j = parse_json_text(body, "request");
      detail::ObjectReader r(j, "");
      axis.azimuth = r.number("azimuth_deg");
      axis.elevation = r.number("elevation_deg");
      axis.x0 = r.number("x0_mm");
      axis.y0 = r.number("y0_mm");
      if (r.has("targets")) apply_target_overrides(r.object("targets"), targets);
      r.finish();
      validate(axis);
      validate(targets);
    } catch (const MechanismError& e) {
      return error_response(400, std::string(to_string(e.code())), e.what());
    }
    if (!problem_) return error_response(400, "InvariantViolation", "project has a cable_design");

    AxisProblem problem = *problem_;
    problem.targets = targets;
    try {
      const ConstraintReport r = myohand::evaluate_axis(problem, axis);
      json out;
      out["axis"] = to_json(axis);
      out["report"] = to_json(r);
      out["poses"] = to_json(report_poses(problem, axis, r));
      out["openings_mm"] = {{"opposed", r.opening_opposed}, {"lateral", r.opening_lateral}};
      return {200, out};
    } catch (const MechanismError& e) {
      ServiceResponse res = error_response(422, std::string(to_string(e.code())), e.what());
      res.body["axis"] = to_json(axis);
      return res;
    }
  }

  ServiceResponse sweep(const std::string& body) const {
    GripMode mode = GripMode::Opposed;
    double step = 1.0;
    DriveParameters drive = project_.drive;
    try {
      const json j = parse_json_text(body, "request");
      detail::ObjectReader r(j, "");
      mode = parse_grip_mode(r.string("grip"));
      step = r.number("step_deg");
      drive.tau_in = r.number_or("tau_in_Nmm", drive.tau_in);
      drive.omega_in = r.number_or("omega_in_deg_s", drive.omega_in);
      r.finish();
      if (!(step > 0.0)) fail(ErrorCode::InvariantViolation, "step > 0");
      if (!(drive.omega_in > 0.0)) fail(ErrorCode::NonPositiveSpeed, "omega_in > 0");
      if (!(drive.tau_in >= 0.0)) fail(ErrorCode::InvariantViolation, "tau_in >= 0");
    } catch (const MechanismError& e) {
      return error_response(400, std::string(to_string(e.code())), e.what());
    }
    if (!project_.cable_design) return error_response(400, "InvariantViolation", "project has a cable_design");

    const CableDesign& d = *project_.cable_design;
    try {
      const Stroke stroke = cable_stroke(d, mode, options_);
      const auto samples = cable_sweep(d, mode, drive, step, options_);
      json arr = json::array();
      double max_open = 0.0;
      for (const auto& s : samples) {
        json x = {{"theta_f_deg", s.theta_f},
                  {"theta_t_deg", s.theta_t},
                  {"opening_mm", s.opening},
                  {"arm_fingers_mm", s.arm_fingers},
                  {"arm_thumb_mm", s.arm_thumb}};
        if (s.singular) {
          x["singular"] = true;
          x["reason"] = s.reason;
        } else {
          x["force_N"] = s.force;
        }
        if (s.has_tension) x["tension_N"] = s.tension;
        arr.push_back(std::move(x));
        max_open = std::max(max_open, s.opening);
      }
      json out;
      out["grip"] = to_string(mode);
      out["step_deg"] = step;
      out["stroke_deg"] = {stroke.theta_min, stroke.theta_max};
      out["max_opening_mm"] = max_open;
      out["samples"] = std::move(arr);
      return {200, out};
    } catch (const MechanismError& e) {
      return error_response(422, std::string(to_string(e.code())), e.what());
    }
  }

 private:
  static void apply_target_overrides(detail::ObjectReader r, DesignTargets& t) {
    t.opening_opposed_min = r.number_or("opening_opposed_min_mm", t.opening_opposed_min);
    t.opening_lateral_min = r.number_or("opening_lateral_min_mm", t.opening_lateral_min);
    t.contact_tol = r.number_or("contact_tol_mm", t.contact_tol);
    if (r.has("envelope")) {
      auto env = r.object("envelope");
      t.envelope.min = env.point3("min_mm");
      t.envelope.max = env.point3("max_mm");
      env.finish();
    }
    t.weight_hard = r.number_or("weight_hard", t.weight_hard);
    t.weight_anthropomorphism = r.number_or("weight_anthropomorphism", t.weight_anthropomorphism);
    t.retro_deg = r.number_or("retro_deg", t.retro_deg);
    r.finish();
  }

  Project project_;
  std::string text_;
  std::optional<AxisProblem> problem_;
  CableOptions options_;
};

}  // namespace myohand

#endif  // MYOHAND_SERVICE_HPP
