#ifndef MYOHAND_IO_HPP
#define MYOHAND_IO_HPP

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "myohand/axis_placement.hpp"
#include "myohand/cable.hpp"
#include "myohand/errors.hpp"
#include "myohand/fourbar.hpp"
#include "myohand/thumb_axis.hpp"

namespace myohand {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr double kRequiredGripForce = 68.0;  // N, target grip force printed for comparison

struct CalibrationRecord {
  double target_opening = 110.0;  // mm
  double target_time = 0.37;      // s
  Calibration result;

  bool operator==(const CalibrationRecord&) const = default;
};

struct Project {
  int schema_version = kSchemaVersion;
  std::string name;
  TridigitalGeometry geometry;
  DriveParameters drive;
  FourbarOptions fourbar;
  CalibrationRecord calibration;
  AxisPlacement axis;
  DesignTargets targets;
  std::optional<CableDesign> cable_design;
};

// ---------------------------------------------------------------------------
// Strict JSON reading

namespace detail {

/// Walks one JSON object, recording which keys were consumed so leftovers
/// can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::ParseError, where() + ": expected an object");
  }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) fail(ErrorCode::ParseError, where(key) + ": missing field");
    seen_.insert(key);
    return j_.at(key);
  }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(ErrorCode::ParseError, where(key) + ": expected a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) {
    if (!j_.contains(key)) return fallback;
    return number(key);
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    seen_.insert(key);
    if (j_.at(key).is_null()) return std::nullopt;
    return number(key);
  }
  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(ErrorCode::ParseError, where(key) + ": expected an integer");
    return v.get<int>();
  }
  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail(ErrorCode::ParseError, where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, const std::string& fallback) {
    if (!j_.contains(key)) return fallback;
    return string(key);
  }
  Point2 point2(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(ErrorCode::ParseError, where(key) + ": expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }
  Point3 point3(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
      fail(ErrorCode::ParseError, where(key) + ": expected [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }
  ObjectReader object(const std::string& key) { return ObjectReader(at(key), where(key)); }

  template <typename E, std::size_t N>
  E choice(const std::string& key, const std::pair<const char*, E> (&options)[N]) {
    const std::string s = string(key);
    for (const auto& [name, value] : options) {
      if (s == name) return value;
    }
    fail(ErrorCode::ParseError, where(key) + ": unknown value \"" + s + "\"");
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) fail(ErrorCode::ParseError, where(key) + ": unknown field");
    }
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "/" : path_;
    return path_ + "/" + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline constexpr std::pair<const char*, Branch> kBranches[] = {{"plus", Branch::Plus}, {"minus", Branch::Minus}};
inline constexpr std::pair<const char*, Winding> kWindings[] = {{"ccw", Winding::CounterClockwise},
                                                                {"cw", Winding::Clockwise}};
inline constexpr std::pair<const char*, BodyId> kBodies[] = {
    {"chassis", BodyId::Chassis}, {"fingers", BodyId::Fingers}, {"thumb", BodyId::Thumb}};
inline constexpr std::pair<const char*, CableRole> kRoles[] = {{"flexor", CableRole::Flexor},
                                                               {"extensor", CableRole::Extensor}};

template <typename E, std::size_t N>
const char* name_of(E v, const std::pair<const char*, E> (&options)[N]) {
  for (const auto& [name, value] : options) {
    if (value == v) return name;
  }
  return "?";
}

inline json array2(const Point2& p) { return json::array({p.x, p.y}); }
inline json array3(const Point3& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace detail

inline std::string to_string(GripMode m) { return m == GripMode::Opposed ? "opposed" : "lateral"; }

inline GripMode parse_grip_mode(const std::string& s) {
  if (s == "opposed") return GripMode::Opposed;
  if (s == "lateral") return GripMode::Lateral;
  fail(ErrorCode::ParseError, "grip mode must be opposed or lateral, got \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// Readers

inline TridigitalGeometry read_geometry(detail::ObjectReader r) {
  TridigitalGeometry g;
  g.l_f = r.number("l_f");
  g.l_th = r.number("l_th");
  g.l_1 = r.number("l_1");
  g.l_2 = r.number("l_2");
  g.l_r = r.number("l_r");
  g.d_ab = r.number("d_AB");
  g.alpha_deg = r.number("alpha_deg");
  g.beta_deg = r.number("beta_deg");
  g.branch = r.choice("branch", detail::kBranches);
  r.finish();
  return g;
}

inline AxisPlacement read_axis(detail::ObjectReader r) {
  AxisPlacement a;
  a.azimuth = r.number("azimuth_deg");
  a.elevation = r.number("elevation_deg");
  a.x0 = r.number("x0_mm");
  a.y0 = r.number("y0_mm");
  r.finish();
  return a;
}

inline DesignTargets read_targets(detail::ObjectReader r) {
  DesignTargets t;
  t.opening_opposed_min = r.number("opening_opposed_min_mm");
  t.opening_lateral_min = r.number("opening_lateral_min_mm");
  t.contact_tol = r.number("contact_tol_mm");
  auto env = r.object("envelope");
  t.envelope.min = env.point3("min_mm");
  t.envelope.max = env.point3("max_mm");
  env.finish();
  t.weight_hard = r.number("weight_hard");
  t.weight_anthropomorphism = r.number("weight_anthropomorphism");
  t.retro_deg = r.number("retro_deg");
  r.finish();
  return t;
}

inline RouteElement read_element(detail::ObjectReader r) {
  const std::string type = r.string("type");
  const BodyId body = r.choice("body", detail::kBodies);
  RouteElement out;
  if (type == "anchor") {
    out = Anchor{r.point2("point_mm"), body};
  } else if (type == "pulley") {
    Pulley p;
    p.body = body;
    p.center = r.point2("center_mm");
    p.radius = r.number("radius_mm");
    p.winding = r.choice("winding", detail::kWindings);
    out = p;
  } else if (type == "wrap") {
    WrapSurface w;
    w.body = body;
    w.center = r.point2("center_mm");
    w.radius = r.number("radius_mm");
    w.start_deg = r.number("start_deg");
    w.extent_deg = r.number("extent_deg");
    w.winding = r.choice("winding", detail::kWindings);
    out = w;
  } else {
    fail(ErrorCode::ParseError, r.where("type") + ": unknown element type \"" + type + "\"");
  }
  r.finish();
  return out;
}

inline CableRoute read_route(detail::ObjectReader r) {
  CableRoute route;
  route.role = r.choice("role", detail::kRoles);
  route.rest_length = r.number("rest_length_mm");
  route.stiffness = r.number("stiffness_N_per_mm");
  const json& els = r.at("elements");
  if (!els.is_array()) fail(ErrorCode::ParseError, r.where("elements") + ": expected an array");
  for (std::size_t i = 0; i < els.size(); ++i) {
    route.elements.push_back(read_element(detail::ObjectReader(els[i], r.where("elements") + "/" + std::to_string(i))));
  }
  r.finish();
  return route;
}

inline CableDesign read_cable_design(detail::ObjectReader r, const TridigitalGeometry& g, const AxisPlacement& axis) {
  CableDesign d;
  d.name = r.string("name");
  d.iteration = r.integer("iteration");
  d.note = r.string_or("note", "");
  d.theta_open_deg = r.number("theta_open_deg");
  d.max_stroke_deg = r.number("max_stroke_deg");
  auto range = r.object("thumb_range_deg");
  d.thumb_min_deg = range.number("min");
  d.thumb_max_deg = range.number("max");
  range.finish();
  d.dist_axis_max = r.optional_number("dist_axis_max_mm");
  d.tension_limit = r.number("tension_limit_N");
  d.flexor = read_route(r.object("flexor"));
  if (r.has("extensor")) {
    d.extensor = read_route(r.object("extensor"));
  } else {
    (void)r.optional_number("extensor");  // explicit null is allowed
  }
  r.finish();
  d.geometry = g;
  d.axis = axis;
  return d;
}

inline int check_schema(detail::ObjectReader& r) {
  const int v = r.integer("schema_version");
  if (v != kSchemaVersion) {
    fail(ErrorCode::ParseError, "/schema_version: unsupported version " + std::to_string(v) + " (expected " +
                                    std::to_string(kSchemaVersion) + ")");
  }
  return v;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void validate(const Project& p) {
  validate(p.geometry);
  if (!is_feasible(p.geometry)) fail(ErrorCode::InvariantViolation, "geometry admits a loop closure");
  if (!(p.drive.omega_in > 0.0)) fail(ErrorCode::InvariantViolation, "omega_in > 0");
  if (!(p.drive.tau_in >= 0.0)) fail(ErrorCode::InvariantViolation, "tau_in >= 0");
  if (!(p.fourbar.eps_arm > 0.0)) fail(ErrorCode::InvariantViolation, "eps_arm > 0");
  if (!(p.fourbar.tol_contact > 0.0)) fail(ErrorCode::InvariantViolation, "tol_contact > 0");
  if (!(p.calibration.result.theta_closed != p.calibration.result.theta_open)) {
    fail(ErrorCode::InvariantViolation, "calibrated stroke non-empty");
  }
  validate(p.axis);
  validate(p.targets);
  if (p.cable_design) validate(*p.cable_design);
}

inline Project parse_project(const std::string& text, const std::string& source = "<project>") {
  const json j = parse_json_text(text, source);
  detail::ObjectReader r(j, "");
  Project p;
  p.schema_version = check_schema(r);
  p.name = r.string("name");
  p.geometry = read_geometry(r.object("geometry"));
  {
    auto d = r.object("drive");
    p.drive.tau_in = d.number("tau_in_Nmm");
    p.drive.omega_in = d.number("omega_in_deg_s");
    d.finish();
  }
  {
    auto o = r.object("fourbar_options");
    p.fourbar.eps_arm = o.number("eps_arm_mm_per_rad");
    p.fourbar.tol_contact = o.number("tol_contact_mm");
    o.finish();
  }
  {
    auto c = r.object("calibration");
    p.calibration.target_opening = c.number("target_opening_mm");
    p.calibration.target_time = c.number("target_time_s");
    p.calibration.result.theta_closed = c.number("theta_closed_deg");
    p.calibration.result.theta_open = c.number("theta_open_deg");
    p.calibration.result.contact_residual = c.number("contact_residual_mm");
    p.calibration.result.opening_residual = c.number("opening_residual_mm");
    p.calibration.result.time_residual = c.number("time_residual_s");
    c.finish();
  }
  p.axis = read_axis(r.object("axis"));
  p.targets = read_targets(r.object("targets"));
  if (r.has("cable_design")) {
    p.cable_design = read_cable_design(r.object("cable_design"), p.geometry, p.axis);
  } else {
    (void)r.optional_number("cable_design");
  }
  r.finish();
  validate(p);
  return p;
}

inline Project load_project(const std::filesystem::path& path) {
  return parse_project(read_text_file(path), path.string());
}

/// Standalone design file: {"schema_version": 1, "cable_design": {...}},
/// bound to a project's geometry and axis.
inline CableDesign parse_cable_design_file(const std::string& text, const Project& project,
                                           const std::string& source = "<design>") {
  const json j = parse_json_text(text, source);
  detail::ObjectReader r(j, "");
  check_schema(r);
  CableDesign d = read_cable_design(r.object("cable_design"), project.geometry, project.axis);
  r.finish();
  validate(d);
  return d;
}

inline CableDesign load_cable_design(const std::filesystem::path& path, const Project& project) {
  return parse_cable_design_file(read_text_file(path), project, path.string());
}

// ---------------------------------------------------------------------------
// Writers

inline json to_json(const TridigitalGeometry& g) {
  return {{"l_f", g.l_f},          {"l_th", g.l_th}, {"l_1", g.l_1},
          {"l_2", g.l_2},          {"l_r", g.l_r},   {"d_AB", g.d_ab},
          {"alpha_deg", g.alpha_deg}, {"beta_deg", g.beta_deg}, {"branch", detail::name_of(g.branch, detail::kBranches)}};
}

inline json to_json(const AxisPlacement& a) {
  return {{"azimuth_deg", a.azimuth}, {"elevation_deg", a.elevation}, {"x0_mm", a.x0}, {"y0_mm", a.y0}};
}

inline json to_json(const DesignTargets& t) {
  return {{"opening_opposed_min_mm", t.opening_opposed_min},
          {"opening_lateral_min_mm", t.opening_lateral_min},
          {"contact_tol_mm", t.contact_tol},
          {"envelope", {{"min_mm", detail::array3(t.envelope.min)}, {"max_mm", detail::array3(t.envelope.max)}}},
          {"weight_hard", t.weight_hard},
          {"weight_anthropomorphism", t.weight_anthropomorphism},
          {"retro_deg", t.retro_deg}};
}

inline json to_json(const RouteElement& e) {
  return std::visit(
      [](const auto& x) -> json {
        using X = std::decay_t<decltype(x)>;
        json j;
        if constexpr (std::is_same_v<X, Anchor>) {
          j["type"] = "anchor";
          j["body"] = detail::name_of(x.body, detail::kBodies);
          j["point_mm"] = detail::array2(x.point);
        } else if constexpr (std::is_same_v<X, Pulley>) {
          j["type"] = "pulley";
          j["body"] = detail::name_of(x.body, detail::kBodies);
          j["center_mm"] = detail::array2(x.center);
          j["radius_mm"] = x.radius;
          j["winding"] = detail::name_of(x.winding, detail::kWindings);
        } else {
          j["type"] = "wrap";
          j["body"] = detail::name_of(x.body, detail::kBodies);
          j["center_mm"] = detail::array2(x.center);
          j["radius_mm"] = x.radius;
          j["start_deg"] = x.start_deg;
          j["extent_deg"] = x.extent_deg;
          j["winding"] = detail::name_of(x.winding, detail::kWindings);
        }
        return j;
      },
      e);
}

inline json to_json(const CableRoute& r) {
  json els = json::array();
  for (const auto& e : r.elements) els.push_back(to_json(e));
  return {{"role", detail::name_of(r.role, detail::kRoles)},
          {"rest_length_mm", r.rest_length},
          {"stiffness_N_per_mm", r.stiffness},
          {"elements", els}};
}

inline json to_json(const CableDesign& d) {
  json j;
  j["name"] = d.name;
  j["iteration"] = d.iteration;
  if (!d.note.empty()) j["note"] = d.note;
  j["theta_open_deg"] = d.theta_open_deg;
  j["max_stroke_deg"] = d.max_stroke_deg;
  j["thumb_range_deg"] = {{"min", d.thumb_min_deg}, {"max", d.thumb_max_deg}};
  if (d.dist_axis_max) j["dist_axis_max_mm"] = *d.dist_axis_max;
  j["tension_limit_N"] = d.tension_limit;
  j["flexor"] = to_json(d.flexor);
  if (d.extensor) j["extensor"] = to_json(*d.extensor);
  return j;
}

inline json to_json(const Project& p) {
  json j;
  j["schema_version"] = p.schema_version;
  j["name"] = p.name;
  j["geometry"] = to_json(p.geometry);
  j["drive"] = {{"tau_in_Nmm", p.drive.tau_in}, {"omega_in_deg_s", p.drive.omega_in}};
  j["fourbar_options"] = {{"eps_arm_mm_per_rad", p.fourbar.eps_arm}, {"tol_contact_mm", p.fourbar.tol_contact}};
  const auto& c = p.calibration;
  j["calibration"] = {{"target_opening_mm", c.target_opening},
                      {"target_time_s", c.target_time},
                      {"theta_closed_deg", c.result.theta_closed},
                      {"theta_open_deg", c.result.theta_open},
                      {"contact_residual_mm", c.result.contact_residual},
                      {"opening_residual_mm", c.result.opening_residual},
                      {"time_residual_s", c.result.time_residual}};
  j["axis"] = to_json(p.axis);
  j["targets"] = to_json(p.targets);
  if (p.cable_design) j["cable_design"] = to_json(*p.cable_design);
  return j;
}

inline json cable_design_file_json(const CableDesign& d) {
  return {{"schema_version", kSchemaVersion}, {"cable_design", to_json(d)}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::ParseError, "write failed for " + path.string());
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void save_project(const Project& p, const std::filesystem::path& path) { write_text_file(path, dump(to_json(p))); }

// ---------------------------------------------------------------------------
// Reports and CSV

/// Fixed-point number with `digits` decimals, independent of the C locale.
inline std::string fmt(double v, int digits = 6) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  std::string s(buf, res.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // name, fnv1a-64 digest
  std::vector<std::pair<std::string, std::size_t>> outputs;  // file, data rows
  json summary = json::object();
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;  // console only; kept out of files so reruns compare equal

  json to_json() const {
    json j;
    j["command"] = command;
    j["inputs"] = json::array();
    for (const auto& [name, digest] : inputs) j["inputs"].push_back({{"name", name}, {"fnv1a64", digest}});
    j["outputs"] = json::array();
    for (const auto& [file, rows] : outputs) j["outputs"].push_back({{"file", file}, {"rows", rows}});
    j["summary"] = summary;
    j["warnings"] = warnings;
    return j;
  }
};

struct SweepFlags {
  std::filesystem::path out_dir = "out";
  double step = 1.0;  // deg
  std::optional<double> tau;
  std::optional<double> omega;
  bool check_antagonist = false;
};

inline DriveParameters effective_drive(const Project& p, const SweepFlags& f) {
  DriveParameters d = p.drive;
  if (f.tau) d.tau_in = *f.tau;
  if (f.omega) d.omega_in = *f.omega;
  if (!(d.tau_in >= 0.0)) fail(ErrorCode::InvariantViolation, "tau_in >= 0");
  return d;
}

inline std::string project_digest(const Project& p) { return hex64(fnv1a(to_json(p).dump())); }

inline double mean_force(const std::vector<double>& forces) {
  if (forces.empty()) fail(ErrorCode::AllSingular, "no valid sample in the curve");
  return std::accumulate(forces.begin(), forces.end(), 0.0) / static_cast<double>(forces.size());
}

inline std::string requirement_line(double mean) {
  return "mean grip force " + fmt(mean, 1) + " N (lossless model) vs " + fmt(kRequiredGripForce, 0) +
         " N required";
}

/// Four-bar force curve over the project's calibrated stroke.
inline RunReport run_fourbar_sweep(const Project& p, const SweepFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.command = "fourbar-sweep --step " + fmt(f.step, 6);
  rep.inputs.push_back({p.name, project_digest(p)});
  const DriveParameters drive = effective_drive(p, f);
  const double time = closing_time(p.calibration.result.stroke().extent(), drive.omega_in);
  const ForceCurve curve = force_curve(p.geometry, drive, p.calibration.result.stroke(), f.step, p.fourbar);

  std::string csv = "theta_f_deg,theta_t_deg,opening_mm,force_N\n";
  double max_open = 0.0;
  std::vector<double> forces;
  for (const auto& s : curve.samples) {
    csv += fmt(s.theta_f) + "," + fmt(s.theta_t) + "," + fmt(s.opening) + "," + (s.singular ? "" : fmt(s.force)) + "\n";
    max_open = std::max(max_open, s.opening);
    if (s.singular) {
      rep.warnings.push_back("theta_f=" + fmt(s.theta_f, 3) + ": " + s.reason + ", force omitted");
    } else {
      forces.push_back(s.force);
    }
  }
  const double variation = force_variation(curve);
  const double mean = mean_force(forces);
  const auto file = f.out_dir / "fourbar_sweep.csv";
  write_text_file(file, csv);
  rep.outputs.push_back({file.filename().string(), curve.samples.size()});

  rep.summary["stroke_deg"] = {p.calibration.result.stroke().theta_min, p.calibration.result.stroke().theta_max};
  rep.summary["max_opening_mm"] = max_open;
  rep.summary["force_variation"] = variation;
  rep.summary["closing_time_s"] = time;
  rep.summary["mean_force_N"] = mean;
  rep.summary["required_force_N"] = kRequiredGripForce;
  rep.summary["requirement"] = requirement_line(mean);
  write_text_file(f.out_dir / "fourbar_report.json", dump(rep.to_json()));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline std::string cable_csv(const std::vector<CableSample>& samples) {
  std::string csv = "theta_f_deg,theta_t_deg,opening_mm,force_N,tension_N,arm_fingers_mm,arm_thumb_mm,grip_mode\n";
  for (const auto& s : samples) {
    csv += fmt(s.theta_f) + "," + fmt(s.theta_t) + "," + fmt(s.opening) + "," + (s.singular ? "" : fmt(s.force)) +
           "," + (s.has_tension ? fmt(s.tension) : "") + "," + fmt(s.arm_fingers) + "," + fmt(s.arm_thumb) + "," +
           to_string(s.grip_mode) + "\n";
  }
  return csv;
}

struct CableSummary {
  Stroke stroke;
  double max_opening = 0.0;
  double force_variation = 0.0;
  double mean_force = 0.0;
  double closing_time = 0.0;
  double max_tension = 0.0;
};

inline CableSummary summarize(const std::vector<CableSample>& samples, const Stroke& stroke, double omega) {
  CableSummary s;
  s.stroke = stroke;
  s.closing_time = closing_time(stroke.extent(), omega);
  std::vector<double> forces;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& x : samples) {
    s.max_opening = std::max(s.max_opening, x.opening);
    if (x.has_tension) s.max_tension = std::max(s.max_tension, x.tension);
    if (x.singular) continue;
    forces.push_back(x.force);
    lo = std::min(lo, x.force);
    hi = std::max(hi, x.force);
  }
  s.mean_force = mean_force(forces);
  s.force_variation = (hi - lo) / hi;
  return s;
}

inline RunReport run_cable_sweep(const Project& p, const CableDesign& design, const std::vector<GripMode>& modes,
                                 const SweepFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.command = "cable-sweep --step " + fmt(f.step, 6);
  rep.inputs.push_back({p.name, project_digest(p)});
  rep.inputs.push_back({design.name, hex64(fnv1a(to_json(design).dump()))});
  const DriveParameters drive = effective_drive(p, f);
  CableOptions opt;
  opt.eps_arm = p.fourbar.eps_arm;
  opt.tol_contact = p.fourbar.tol_contact;

  for (GripMode mode : modes) {
    const std::string m = to_string(mode);
    const Stroke stroke = cable_stroke(design, mode, opt);
    const auto samples = cable_sweep(design, mode, drive, f.step, opt);
    for (const auto& s : samples) {
      if (s.singular) rep.warnings.push_back(m + " theta_f=" + fmt(s.theta_f, 3) + ": " + s.reason + ", force omitted");
      if (s.has_tension && s.tension > design.tension_limit) {
        rep.warnings.push_back(m + " theta_f=" + fmt(s.theta_f, 3) + ": tension " + fmt(s.tension, 1) +
                               " N exceeds limit " + fmt(design.tension_limit, 1) + " N");
      }
    }
    const auto file = f.out_dir / ("cable_sweep_" + m + ".csv");
    write_text_file(file, cable_csv(samples));
    rep.outputs.push_back({file.filename().string(), samples.size()});

    const CableSummary s = summarize(samples, stroke, drive.omega_in);
    json js;
    js["stroke_deg"] = {stroke.theta_min, stroke.theta_max};
    js["max_opening_mm"] = s.max_opening;
    js["force_variation"] = s.force_variation;
    js["mean_force_N"] = s.mean_force;
    js["closing_time_s"] = s.closing_time;
    js["max_tension_N"] = s.max_tension;
    js["tension_limit_N"] = design.tension_limit;
    js["requirement"] = requirement_line(s.mean_force);
    if (f.check_antagonist) {
      if (!design.extensor) {
        rep.warnings.push_back("extensor undefined");
      } else {
        double worst = 0.0, bound = 0.0;
        for (const auto& x : samples) {
          try {
            const auto r = antagonist_residual(design, x.theta_f, mode, opt);
            worst = std::max(worst, r.stretch_mm);
            bound = r.bound_mm;
            if (!r.admissible) {
              rep.warnings.push_back(m + " theta_f=" + fmt(x.theta_f, 3) + ": antagonist stretch " +
                                     fmt(r.stretch_mm, 4) + " mm exceeds elastic bound");
            }
          } catch (const MechanismError& e) {
            rep.warnings.push_back(m + " theta_f=" + fmt(x.theta_f, 3) + ": " + e.what());
          }
        }
        js["antagonist_max_stretch_mm"] = worst;
        js["antagonist_bound_mm"] = bound;
      }
    }
    rep.summary[m] = js;
  }
  write_text_file(f.out_dir / "cable_report.json", dump(rep.to_json()));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Axis design reports.

inline json to_json(const ConstraintReport& r) {
  json crit = json::array();
  auto add = [&](const char* name, double residual, bool pass, double value) {
    crit.push_back({{"name", name}, {"residual", residual}, {"pass", pass}, {"value", value}});
  };
  add("opening_opposed", r.r_opening_opposed, r.pass_opening_opposed(), r.opening_opposed);
  add("opening_lateral", r.r_opening_lateral, r.pass_opening_lateral(), r.opening_lateral);
  add("contact", std::max(r.r_contact_opposed, r.r_contact_lateral), r.pass_contact(),
      std::max(r.contact_opposed, r.contact_lateral));
  add("envelope", r.r_envelope, r.pass_envelope(), r.envelope_distance);
  if (r.attachment_distance) add("cable_attachment", r.r_attachment, r.pass_attachment(), *r.attachment_distance);
  json j;
  j["criteria"] = crit;
  j["residuals"] = {{"opening_opposed", r.r_opening_opposed}, {"opening_lateral", r.r_opening_lateral},
                    {"contact_opposed", r.r_contact_opposed}, {"contact_lateral", r.r_contact_lateral},
                    {"envelope", r.r_envelope},               {"attachment", r.r_attachment}};
  j["openings_mm"] = {{"opposed", r.opening_opposed}, {"lateral", r.opening_lateral}};
  j["contact_mm"] = {{"opposed", r.contact_opposed}, {"lateral", r.contact_lateral}};
  j["anthropomorphism_mm"] = r.anthropomorphism;
  j["weights"] = {{"hard", r.weight_hard}, {"anthropomorphism", r.weight_anthropomorphism}};
  j["hard_penalty"] = r.hard_penalty;
  j["penalty"] = r.penalty;
  j["feasible"] = r.feasible();
  return j;
}

inline json to_json(const ExtremePose& p) {
  json m = json::array();
  for (double v : p.thumb.matrix4()) m.push_back(v);
  json fm = json::array();
  for (double v : p.fingers.matrix4()) fm.push_back(v);
  return {{"name", p.name},         {"retro_deg", p.retro},  {"theta_f_deg", p.theta_f},
          {"theta_t_deg", p.theta_t}, {"thumb_matrix", m},   {"finger_matrix", fm},
          {"points", {{"thumb_base", detail::array3(p.thumb_base)}, {"T", detail::array3(p.t)}, {"M", detail::array3(p.m)}}},
          {"opening_mm", p.opening}};
}

inline json to_json(const ExtremePoseSet& s) {
  json j = json::array();
  for (const auto& p : s.poses) j.push_back(to_json(p));
  return j;
}

inline json trace_line(const TraceEntry& e) {
  json j;
  j["i"] = e.index;
  j["start"] = e.start;
  j["phase"] = e.phase;
  j["params"] = to_json(e.axis);
  if (e.infeasible_kinematics) {
    j["residuals"] = nullptr;
    j["penalty"] = nullptr;
  } else {
    j["residuals"] = {{"opening_opposed", e.report.r_opening_opposed}, {"opening_lateral", e.report.r_opening_lateral},
                      {"contact_opposed", e.report.r_contact_opposed}, {"contact_lateral", e.report.r_contact_lateral},
                      {"envelope", e.report.r_envelope},               {"attachment", e.report.r_attachment},
                      {"anthropomorphism", e.report.anthropomorphism}};
    j["penalty"] = e.penalty;
  }
  return j;
}

inline const CableDesign& require_design(const Project& p) {
  if (!p.cable_design) fail(ErrorCode::InvariantViolation, "project has a cable_design");
  return *p.cable_design;
}

struct AxisEvalResult {
  RunReport report;
  bool feasible = false;
};

inline AxisEvalResult run_axis_eval(const Project& p, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  AxisEvalResult res;
  RunReport& rep = res.report;
  rep.command = "axis-eval";
  rep.inputs.push_back({p.name, project_digest(p)});
  const AxisProblem problem = AxisProblem::make(p.geometry, require_design(p), p.targets);
  const ConstraintReport r = evaluate_axis(problem, p.axis);
  json j;
  j["axis"] = to_json(p.axis);
  j["report"] = to_json(r);
  j["poses"] = to_json(report_poses(problem, p.axis, r));
  const auto file = out_dir / "axis_eval.json";
  write_text_file(file, dump(j));
  rep.outputs.push_back({file.filename().string(), 1});
  rep.summary = j["report"];
  for (const auto& c : j["report"]["criteria"]) {
    if (!c["pass"].get<bool>()) rep.warnings.push_back("criterion " + c["name"].get<std::string>() + " fails");
  }
  res.feasible = r.feasible();
  write_text_file(out_dir / "axis_eval_report.json", dump(rep.to_json()));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct AxisOptimizeResult {
  RunReport report;
  OptimizeResult search;
  Project optimized;
};

inline AxisOptimizeResult run_axis_optimize(const Project& p, std::size_t budget, std::uint64_t seed,
                                            const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  AxisOptimizeResult res;
  RunReport& rep = res.report;
  rep.command = "axis-optimize --budget " + std::to_string(budget) + " --seed " + std::to_string(seed);
  rep.inputs.push_back({p.name, project_digest(p)});
  const AxisProblem problem = AxisProblem::make(p.geometry, require_design(p), p.targets);
  OptimizeOptions opt;
  opt.budget = budget;
  opt.seed = seed;
  res.search = optimize_axis({p.axis}, problem, opt);

  std::string lines;
  for (const auto& e : res.search.trace) lines += trace_line(e).dump() + "\n";
  const auto trace_file = out_dir / "axis_trace.jsonl";
  write_text_file(trace_file, lines);
  rep.outputs.push_back({trace_file.filename().string(), res.search.trace.size()});

  res.optimized = p;
  res.optimized.axis = res.search.axis;
  if (res.optimized.cable_design) res.optimized.cable_design->axis = res.search.axis;
  const auto project_file = out_dir / "project_optimized.json";
  save_project(res.optimized, project_file);
  rep.outputs.push_back({project_file.filename().string(), 1});

  rep.summary["axis"] = to_json(res.search.axis);
  rep.summary["report"] = to_json(res.search.report);
  rep.summary["evaluations"] = res.search.trace.size();
  rep.summary["feasible"] = res.search.feasible;
  if (!res.search.feasible) rep.warnings.push_back("NoFeasiblePoint: " + res.search.diagnosis);
  write_text_file(out_dir / "axis_optimize_report.json", dump(rep.to_json()));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace myohand

#endif  // MYOHAND_IO_HPP
