#include "mha/io.hpp"

#include "mha/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mha {

using nlohmann::json;

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kParse, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::kOutput, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kOutput, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) fail(ErrorKind::kOutput, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Curves

ClosedCurve parse_curve(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("curve file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kInvalidCurve, "curve document must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) fail(ErrorKind::kInvalidCurve, "field \"n\" must be an integer");
  if (!doc.contains("points") || !doc["points"].is_array()) fail(ErrorKind::kInvalidCurve, "field \"points\" must be an array");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "n" && key != "points") fail(ErrorKind::kInvalidCurve, "unknown field \"" + key + "\"");
  }
  const long long n = doc["n"].get<long long>();
  const json& pts = doc["points"];
  if (n < 3) fail(ErrorKind::kInvalidCurve, "curve needs at least 3 samples, got n = " + std::to_string(n));
  if (static_cast<long long>(pts.size()) != n) {
    fail(ErrorKind::kInvalidCurve,
         "n = " + std::to_string(n) + " but points has " + std::to_string(pts.size()) + " entries");
  }
  std::vector<Vec2> points;
  points.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    const json& p = pts[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(ErrorKind::kInvalidCurve, "sample " + std::to_string(i) + " is not a pair of numbers");
    }
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return ClosedCurve::from_points(std::move(points));
}

ClosedCurve load_curve(const std::filesystem::path& path) { return parse_curve(read_text(path)); }

std::string curve_document(const ClosedCurve& curve) {
  json pts = json::array();
  for (const Vec2& p : curve.points()) pts.push_back({round12(p.x()), round12(p.y())});
  return json{{"n", curve.size()}, {"points", pts}}.dump() + "\n";
}

// ---------------------------------------------------------------------------
// Settings

SolverSettings parse_solver_settings(const json& doc, SolverSettings base) {
  if (!doc.is_object()) fail(ErrorKind::kConfiguration, "solver settings must be an object");
  for (const auto& [key, value] : doc.items()) {
    auto number = [&]() {
      if (!value.is_number()) fail(ErrorKind::kConfiguration, "solver setting \"" + key + "\" must be a number");
      return value.get<double>();
    };
    if (key == "step0") {
      base.step0 = number();
    } else if (key == "step_min") {
      base.step_min = number();
    } else if (key == "energy_tol") {
      base.energy_tol = number();
    } else if (key == "max_outer") {
      if (!value.is_number_integer()) fail(ErrorKind::kConfiguration, "solver setting \"max_outer\" must be an integer");
      base.max_outer = value.get<int>();
    } else if (key == "cl_slack") {
      base.cl_slack = number();
    } else if (key == "increment_cap") {
      base.increment_cap = number();
    } else {
      fail(ErrorKind::kConfiguration, "unknown solver setting \"" + key + "\"");
    }
  }
  return base;
}

json to_json(const SolverSettings& cfg) {
  return json{{"step0", round12(cfg.step0)},           {"step_min", round12(cfg.step_min)},
              {"energy_tol", round12(cfg.energy_tol)}, {"max_outer", cfg.max_outer},
              {"cl_slack", round12(cfg.cl_slack)},     {"increment_cap", round12(cfg.increment_cap)}};
}

// ---------------------------------------------------------------------------
// Reports

std::string mesh_text(const DiskMap& map) {
  const DiskMesh& mesh = map.mesh();
  std::string out = "vertices " + std::to_string(mesh.vertex_count()) + " dim " + std::to_string(map.dim()) + "\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2& p = mesh.vertices()[static_cast<size_t>(v)];
    out += fmt12(p.x()) + " " + fmt12(p.y());
    for (int c = 0; c < map.dim(); ++c) out += " " + fmt12(map.values()(v, c));
    out += "\n";
  }
  out += "triangles " + std::to_string(mesh.triangle_count()) + "\n";
  for (const auto& t : mesh.triangles()) {
    out += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  return out;
}

json sweep_json(const ContinuationRecord& record) {
  json rows = json::array();
  for (const SweepEntry& e : record.entries) {
    rows.push_back({{"epsilon", round12(e.epsilon)},
                    {"energy", round12(e.result.energy)},
                    {"area", round12(e.result.area)},
                    {"conformality", round12(e.result.conformality)},
                    {"cone_energy", round12(e.result.cone_energy)},
                    {"iterations", e.result.iterations},
                    {"converged", e.result.converged},
                    {"warm_started", e.result.warm_started},
                    {"map_distance", round12(e.map_distance)},
                    {"projected_distance", round12(e.projected_distance)},
                    {"trace_distance", round12(e.trace_distance)},
                    {"phi_change", round12(e.phi_change)},
                    {"planarity_defect", round12(e.planarity_defect)},
                    {"max_phi_jump", round12(e.result.param.max_jump())}});
  }
  return json{{"mode", to_string(record.mode)},
              {"pins", {round12(record.pins[0]), round12(record.pins[1]), round12(record.pins[2])}},
              {"energy_bound", round12(record.energy_bound)},
              {"entries", rows}};
}

std::string sweep_csv(const ContinuationRecord& record) {
  std::string out =
      "epsilon,energy,area,conformality,cone_energy,iterations,converged,map_distance,projected_distance,"
      "trace_distance,phi_change,planarity_defect\n";
  for (const SweepEntry& e : record.entries) {
    out += fmt12(e.epsilon) + "," + fmt12(e.result.energy) + "," + fmt12(e.result.area) + "," +
           fmt12(e.result.conformality) + "," + fmt12(e.result.cone_energy) + "," +
           std::to_string(e.result.iterations) + "," + (e.result.converged ? "1" : "0") + "," +
           fmt12(e.map_distance) + "," + fmt12(e.projected_distance) + "," + fmt12(e.trace_distance) + "," +
           fmt12(e.phi_change) + "," + fmt12(e.planarity_defect) + "\n";
  }
  return out;
}

json limit_json(const LimitResult& limit) {
  return json{{"area0", round12(limit.area0)},
              {"final_area", round12(limit.final_area)},
              {"extrapolation_model", "area(eps) = area0 + c1 eps^2 + c2 eps^4 through the last three entries"},
              {"pair_estimates", {round12(limit.pair_estimates[0]), round12(limit.pair_estimates[1])}},
              {"extrapolation_flagged", limit.extrapolation_flagged},
              {"planarity_defect", round12(limit.planarity_defect)},
              {"max_phi_jump", round12(limit.phi0.max_jump())},
              {"u0_area", round12(map_area(limit.u0))}};
}

std::string svg_drawing(const std::vector<Vec2>& points, const std::vector<Vec2>& backdrop, const Vec2& lo,
                        const Vec2& hi, const std::string& caption) {
  constexpr double kCanvas = 512.0;
  const Vec2 span = (hi - lo).cwiseMax(Vec2::Constant(1e-12));
  const double pad = 0.1 * std::max(span.x(), span.y());
  const Vec2 origin = lo - Vec2::Constant(pad);
  const double scale = kCanvas / (std::max(span.x(), span.y()) + 2.0 * pad);
  auto xy = [&](const Vec2& p) {
    // SVG y grows downward.
    return fmt12(round12((p.x() - origin.x()) * scale)) + "," +
           fmt12(round12(kCanvas - (p.y() - origin.y()) * scale));
  };
  auto path = [&](const std::vector<Vec2>& pts) {
    std::string d;
    for (size_t i = 0; i < pts.size(); ++i) d += (i == 0 ? "M" : " L") + xy(pts[i]);
    return d + " Z";
  };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" viewBox=\"0 0 512 512\">\n";
  out += "<rect width=\"512\" height=\"512\" fill=\"white\"/>\n";
  if (!backdrop.empty()) {
    out += "<path d=\"" + path(backdrop) + "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  }
  if (!points.empty()) {
    out += "<path d=\"" + path(points) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    out += "<circle cx=\"" + xy(points.front()).substr(0, xy(points.front()).find(',')) + "\" cy=\"" +
           xy(points.front()).substr(xy(points.front()).find(',') + 1) + "\" r=\"2\" fill=\"black\"/>\n";
  }
  out += "<text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" + caption + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace mha
