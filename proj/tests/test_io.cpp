#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

#include "myohand/io.hpp"
#include "support.hpp"

using namespace myohand;
using testing_support::data_dir;
using testing_support::scratch_dir;
using testing_support::slurp;

namespace {

const Project& project() { return testing_support::default_project(); }

json project_json() { return json::parse(slurp(data_dir() / "variplus.json")); }

MechanismError parse_error_of(const std::string& text) {
  try {
    parse_project(text);
  } catch (const MechanismError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse failure";
  return MechanismError(ErrorCode::ParseError, "none");
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Io, ShippedProjectCarriesReferenceGeometry) {
  const auto& g = project().geometry;
  EXPECT_EQ(g.l_f, 75.0);
  EXPECT_EQ(g.l_th, 52.0);
  EXPECT_EQ(g.l_1, 14.0);
  EXPECT_EQ(g.l_2, 13.0);
  EXPECT_EQ(g.l_r, 40.0);
  EXPECT_EQ(g.d_ab, 43.8);
  EXPECT_EQ(g.alpha_deg, 8.0);
  EXPECT_EQ(g.beta_deg, 180.0);
  EXPECT_TRUE(is_feasible(g));
  ASSERT_TRUE(project().cable_design);
  EXPECT_EQ(project().cable_design->iteration, 3);
}

TEST(Io, NegativeRodLengthNamesInvariant) {
  json j = project_json();
  j["geometry"]["l_r"] = -1.0;
  const MechanismError e = parse_error_of(j.dump());
  EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
  EXPECT_NE(std::string(e.what()).find("l_r > 0"), std::string::npos);
}

TEST(Io, UnknownFieldRejectedWithPath) {
  json j = project_json();
  j["color"] = "red";
  MechanismError e = parse_error_of(j.dump());
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("/color"), std::string::npos);

  j = project_json();
  j["cable_design"]["flexor"]["elements"][1]["friction"] = 0.1;
  e = parse_error_of(j.dump());
  EXPECT_NE(std::string(e.what()).find("/cable_design/flexor/elements/1/friction"), std::string::npos) << e.what();
}

TEST(Io, MissingAndMistypedFields) {
  json j = project_json();
  j["axis"].erase("y0_mm");
  MechanismError e = parse_error_of(j.dump());
  EXPECT_NE(std::string(e.what()).find("/axis/y0_mm: missing"), std::string::npos);
  j = project_json();
  j["drive"]["tau_in_Nmm"] = "6000";
  e = parse_error_of(j.dump());
  EXPECT_NE(std::string(e.what()).find("/drive/tau_in_Nmm: expected a number"), std::string::npos);
  j = project_json();
  j["geometry"]["branch"] = "sideways";
  e = parse_error_of(j.dump());
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
}

TEST(Io, SyntaxErrorReportsLine) {
  const std::string text = "{\n  \"schema_version\": 1,\n  \"name\": oops\n}\n";
  const MechanismError e = parse_error_of(text);
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("<project>:3:"), std::string::npos) << e.what();
}

TEST(Io, SchemaVersionChecked) {
  json j = project_json();
  j["schema_version"] = 2;
  const MechanismError e = parse_error_of(j.dump());
  EXPECT_NE(std::string(e.what()).find("unsupported version 2"), std::string::npos);
}

TEST(Io, ElevationZeroRejected) {
  json j = project_json();
  j["axis"]["elevation_deg"] = 0.0;
  const MechanismError e = parse_error_of(j.dump());
  EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
}

TEST(Io, MissingFileIsParseError) {
  try {
    load_project(data_dir() / "does_not_exist.json");
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Io, SaveLoadRoundTripsEveryShippedFile) {
  const auto dir = scratch_dir("roundtrip");
  save_project(project(), dir / "p.json");
  const Project again = load_project(dir / "p.json");
  EXPECT_EQ(to_json(again), to_json(project()));
  EXPECT_EQ(again.geometry, project().geometry);
  EXPECT_EQ(again.axis, project().axis);
  EXPECT_EQ(again.calibration, project().calibration);
  EXPECT_EQ(again.targets, project().targets);
  EXPECT_EQ(slurp(dir / "p.json"), slurp(data_dir() / "variplus.json"));

  for (const char* name : {"cable_iteration1.json", "cable_iteration2.json", "cable_iteration3.json"}) {
    const CableDesign d = load_cable_design(data_dir() / name, project());
    write_text_file(dir / name, dump(cable_design_file_json(d)));
    const CableDesign e = load_cable_design(dir / name, project());
    EXPECT_EQ(to_json(d), to_json(e)) << name;
    EXPECT_EQ(slurp(dir / name), slurp(data_dir() / name)) << name;
  }
}

TEST(Io, NumberFormattingIsLocaleIndependent) {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  for (const char* loc : {"de_DE.UTF-8", "fr_FR.UTF-8", "C"}) {
    if (!std::setlocale(LC_NUMERIC, loc)) continue;
    EXPECT_EQ(fmt(1.5), "1.500000");
    EXPECT_EQ(fmt(-2.25, 2), "-2.25");
    EXPECT_EQ(fmt(-0.0), "0.000000");
    EXPECT_EQ(fmt(-1e-9), "0.000000");
  }
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Io, FourbarSweepSummaryAndRequirementLine) {
  const auto dir = scratch_dir("fourbar");
  SweepFlags f;
  f.out_dir = dir;
  f.step = 0.5;
  const RunReport rep = run_fourbar_sweep(project(), f);
  const auto& s = rep.summary;
  EXPECT_GE(s["force_variation"].get<double>(), 0.15);
  EXPECT_LE(s["force_variation"].get<double>(), 0.35);
  EXPECT_GE(s["closing_time_s"].get<double>(), 0.34);
  EXPECT_LE(s["closing_time_s"].get<double>(), 0.40);
  EXPECT_GE(s["mean_force_N"].get<double>(), 40.0);
  EXPECT_LE(s["mean_force_N"].get<double>(), 80.0);
  EXPECT_NE(s["requirement"].get<std::string>().find("68 N"), std::string::npos);

  const auto rows = lines_of(slurp(dir / "fourbar_sweep.csv"));
  EXPECT_EQ(rows.front(), "theta_f_deg,theta_t_deg,opening_mm,force_N");
  // every empty force cell has a warning and vice versa
  std::size_t empty = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) empty += rows[i].back() == ',';
  EXPECT_EQ(empty, rep.warnings.size());
  EXPECT_GE(empty, 1u);
}

TEST(Io, StepLargerThanStrokeGivesEndpoints) {
  const auto dir = scratch_dir("bigstep");
  SweepFlags f;
  f.out_dir = dir;
  f.step = 500.0;
  run_fourbar_sweep(project(), f);
  EXPECT_EQ(lines_of(slurp(dir / "fourbar_sweep.csv")).size(), 3u);  // header + 2 rows
}

TEST(Io, ZeroSpeedSurfacesNonPositiveSpeed) {
  SweepFlags f;
  f.out_dir = scratch_dir("omega0");
  f.omega = 0.0;
  try {
    run_fourbar_sweep(project(), f);
    FAIL();
  } catch (const MechanismError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveSpeed);
  }
}

TEST(Io, CableSweepBothModes) {
  const auto dir = scratch_dir("cable");
  SweepFlags f;
  f.out_dir = dir;
  f.check_antagonist = true;
  const RunReport rep =
      run_cable_sweep(project(), *project().cable_design, {GripMode::Opposed, GripMode::Lateral}, f);
  EXPECT_TRUE(std::filesystem::exists(dir / "cable_sweep_opposed.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cable_sweep_lateral.csv"));
  EXPECT_GE(rep.summary["opposed"]["max_opening_mm"].get<double>(), 100.0);
  EXPECT_NEAR(rep.summary["lateral"]["max_opening_mm"].get<double>(), 40.0, 5.0);
  EXPECT_LT(rep.summary["opposed"]["antagonist_max_stretch_mm"].get<double>(),
            rep.summary["opposed"]["antagonist_bound_mm"].get<double>());
  EXPECT_EQ(lines_of(slurp(dir / "cable_sweep_opposed.csv")).front(),
            "theta_f_deg,theta_t_deg,opening_mm,force_N,tension_N,arm_fingers_mm,arm_thumb_mm,grip_mode");
  for (const auto& w : rep.warnings) EXPECT_NE(w.find("contact"), std::string::npos) << w;
}

TEST(Io, CheckAntagonistWithoutExtensorWarns) {
  SweepFlags f;
  f.out_dir = scratch_dir("noext");
  f.check_antagonist = true;
  const CableDesign d = load_cable_design(data_dir() / "cable_iteration2.json", project());
  const RunReport rep = run_cable_sweep(project(), d, {GripMode::Opposed}, f);
  EXPECT_NE(std::find(rep.warnings.begin(), rep.warnings.end(), "extensor undefined"), rep.warnings.end());
}

TEST(Io, StraightCableTensionWarnings) {
  SweepFlags f;
  f.out_dir = scratch_dir("it1");
  const CableDesign d = load_cable_design(data_dir() / "cable_iteration1.json", project());
  const RunReport rep = run_cable_sweep(project(), d, {GripMode::Opposed}, f);
  const auto hit = std::find_if(rep.warnings.begin(), rep.warnings.end(),
                                [](const std::string& w) { return w.find("exceeds limit") != std::string::npos; });
  EXPECT_NE(hit, rep.warnings.end());
}

TEST(Io, RerunsAreByteIdentical) {
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  for (const auto& dir : {a, b}) {
    SweepFlags f;
    f.out_dir = dir;
    run_fourbar_sweep(project(), f);
    run_cable_sweep(project(), *project().cable_design, {GripMode::Opposed, GripMode::Lateral}, f);
    run_axis_eval(project(), dir);
  }
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Io, AxisEvalReportsFeasibleDefault) {
  const auto dir = scratch_dir("eval");
  const AxisEvalResult r = run_axis_eval(project(), dir);
  EXPECT_TRUE(r.feasible);
  const json j = json::parse(slurp(dir / "axis_eval.json"));
  EXPECT_EQ(j["poses"].size(), 4u);
  EXPECT_EQ(j["poses"][0]["thumb_matrix"].size(), 16u);
  for (const auto& c : j["report"]["criteria"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
}

TEST(Io, AxisOptimizeTraceAndProject) {
  const auto a = scratch_dir("opt_a"), b = scratch_dir("opt_b");
  const AxisOptimizeResult ra = run_axis_optimize(project(), 10000, 0, a);
  run_axis_optimize(project(), 10000, 0, b);
  EXPECT_TRUE(ra.search.feasible);
  EXPECT_EQ(ra.search.report.hard_penalty, 0.0);
  EXPECT_EQ(slurp(a / "axis_trace.jsonl"), slurp(b / "axis_trace.jsonl"));
  EXPECT_EQ(slurp(a / "project_optimized.json"), slurp(b / "project_optimized.json"));
  const Project opt = load_project(a / "project_optimized.json");
  EXPECT_EQ(opt.axis, ra.search.axis);

  const auto lines = lines_of(slurp(a / "axis_trace.jsonl"));
  EXPECT_EQ(lines.size(), ra.search.trace.size());
  const json first = json::parse(lines.front());
  EXPECT_TRUE(first.contains("params"));
  EXPECT_TRUE(first.contains("residuals"));
  EXPECT_TRUE(first.contains("penalty"));
}

TEST(Io, AxisOptimizeBudgetOne) {
  const auto dir = scratch_dir("opt_one");
  run_axis_optimize(project(), 1, 0, dir);
  EXPECT_EQ(lines_of(slurp(dir / "axis_trace.jsonl")).size(), 1u);
}

TEST(Io, DigestIsStable) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}
