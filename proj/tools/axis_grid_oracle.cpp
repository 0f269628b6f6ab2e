// Exhaustive chart scan: counts feasible axis placements for a project.
//   axis_grid_oracle <project.json> <out.json> [angle_step_deg] [offset_step_mm]

#include <cstdio>
#include <cstdlib>

#include "myohand/io.hpp"

using namespace myohand;

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: axis_grid_oracle <project.json> <out.json> [angle_step] [offset_step]\n");
    return 1;
  }
  const Project p = load_project(argv[1]);
  const double da = argc > 3 ? std::atof(argv[3]) : 2.0;
  const double dl = argc > 4 ? std::atof(argv[4]) : 2.0;
  const AxisProblem problem = AxisProblem::make(p.geometry, require_design(p), p.targets);

  std::size_t total = 0, feasible = 0, kinematic_failures = 0;
  std::optional<TraceEntry> best;
  json samples = json::array();
  for (double az = -180.0; az < 180.0 - 1e-9; az += da)
    for (double el = da; el <= 90.0 + 1e-9; el += da)
      for (double x0 = -20.0; x0 <= 70.0 + 1e-9; x0 += dl)
        for (double y0 = -40.0; y0 <= 40.0 + 1e-9; y0 += dl) {
          ++total;
          const TraceEntry e = detail::evaluate_entry(problem, {az, el, x0, y0});
          if (e.infeasible_kinematics) {
            ++kinematic_failures;
            continue;
          }
          if (!e.report.feasible()) continue;
          ++feasible;
          if (samples.size() < 50) samples.push_back(to_json(e.axis));
          if (!best || detail::better(e, *best)) best = e;
        }

  json out;
  out["project"] = p.name;
  out["angle_step_deg"] = da;
  out["offset_step_mm"] = dl;
  out["evaluated"] = total;
  out["kinematics_infeasible"] = kinematic_failures;
  out["feasible"] = feasible;
  out["best"] = best ? json{{"axis", to_json(best->axis)}, {"penalty", best->penalty}} : json(nullptr);
  out["feasible_samples"] = samples;
  write_text_file(argv[2], dump(out));
  std::printf("%zu of %zu placements feasible\n", feasible, total);
  return feasible > 0 ? 0 : 3;
}
