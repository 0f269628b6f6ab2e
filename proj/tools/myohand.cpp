#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "myohand/http.hpp"
#include "myohand/io.hpp"

using namespace myohand;

namespace {

// 0 success, 1 I/O or parse, 2 invariant violation, 3 infeasible.
int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
      return 1;
    case ErrorCode::InvariantViolation:
    case ErrorCode::NonPositiveSpeed:
    case ErrorCode::EmptyStroke:
      return 2;
    default:
      return 3;
  }
}

void print_report(const RunReport& rep) {
  std::cout << rep.command << "\n";
  for (const auto& [name, digest] : rep.inputs) std::cout << "  input " << name << " fnv1a64=" << digest << "\n";
  for (const auto& [file, rows] : rep.outputs) std::cout << "  wrote " << file << " (" << rows << " rows)\n";
  std::cout << rep.summary.dump(2) << "\n";
  for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
  std::printf("  wall time %.3f s\n", rep.wall_time_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"myohand: prosthetic-hand mechanism toolkit"};
  app.require_subcommand(1);

  std::string project_path = "data/variplus.json";
  std::string out_dir = "out";
  SweepFlags flags;
  std::string grip = "both";
  std::string design_path;
  std::uint64_t seed = 0;
  std::size_t budget = 10000;
  int port = kDefaultPort;
  std::string ui_dir;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--project", project_path, "project JSON")->capture_default_str();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
  };
  auto sweep_flags = [&](CLI::App* sub) {
    sub->add_option("--step", flags.step, "sampling step, deg")->capture_default_str();
    sub->add_option("--tau", flags.tau, "input torque override, N.mm");
    sub->add_option("--omega", flags.omega, "input speed override, deg/s");
  };

  auto* fourbar = app.add_subcommand("fourbar-sweep", "grip force over the calibrated four-bar stroke");
  common(fourbar);
  sweep_flags(fourbar);

  auto* cable = app.add_subcommand("cable-sweep", "cable-driven sweep, per grip mode");
  common(cable);
  sweep_flags(cable);
  cable->add_option("--grip", grip, "opposed | lateral | both")
      ->check(CLI::IsMember({"opposed", "lateral", "both"}))
      ->capture_default_str();
  cable->add_option("--design", design_path, "standalone cable design file (defaults to the project's)");
  cable->add_flag("--check-antagonist", flags.check_antagonist, "check flexor/extensor compatibility");

  auto* eval = app.add_subcommand("axis-eval", "evaluate the project's retropulsion axis");
  common(eval);

  auto* optimize = app.add_subcommand("axis-optimize", "search for a feasible retropulsion axis");
  common(optimize);
  optimize->add_option("--seed", seed, "RNG seed")->capture_default_str();
  optimize->add_option("--budget", budget, "evaluation budget")->capture_default_str()->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "HTTP JSON design service");
  serve->add_option("--project", project_path, "project JSON")->capture_default_str();
  serve->add_option("--port", port, "listen port")->capture_default_str();
  serve->add_option("--ui", ui_dir, "directory with the UI bundle served at /");

  CLI11_PARSE(app, argc, argv);
  flags.out_dir = out_dir;

  try {
    if (serve->parsed()) {
      const DesignService service = DesignService::from_file(project_path);
      httplib::Server server;
      bind_routes(server, service, ui_dir);
      std::printf("serving %s on http://127.0.0.1:%d\n", service.project().name.c_str(), port);
      std::fflush(stdout);
      if (!server.listen("0.0.0.0", port)) {
        std::fprintf(stderr, "cannot listen on port %d\n", port);
        return 1;
      }
      return 0;
    }

    const Project project = load_project(project_path);
    if (fourbar->parsed()) {
      print_report(run_fourbar_sweep(project, flags));
    } else if (cable->parsed()) {
      const CableDesign design = design_path.empty() ? require_design(project) : load_cable_design(design_path, project);
      std::vector<GripMode> modes;
      if (grip == "both") {
        modes = {GripMode::Opposed, GripMode::Lateral};
      } else {
        modes = {parse_grip_mode(grip)};
      }
      print_report(run_cable_sweep(project, design, modes, flags));
    } else if (eval->parsed()) {
      const AxisEvalResult res = run_axis_eval(project, flags.out_dir);
      print_report(res.report);
      return res.feasible ? 0 : 3;
    } else if (optimize->parsed()) {
      const AxisOptimizeResult res = run_axis_optimize(project, budget, seed, flags.out_dir);
      print_report(res.report);
      return res.search.feasible ? 0 : 3;
    }
  } catch (const MechanismError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
