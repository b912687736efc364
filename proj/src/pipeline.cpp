#include "mha/pipeline.hpp"

#include "mha/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mha {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

RunConfig parse_run_config(const json& doc, RunConfig base) {
  if (!doc.is_object()) fail(ErrorKind::kConfiguration, "configuration must be an object");
  for (const auto& [key, value] : doc.items()) {
    auto number = [&]() {
      if (!value.is_number()) fail(ErrorKind::kConfiguration, "\"" + key + "\" must be a number");
      return value.get<double>();
    };
    auto integer = [&]() {
      if (!value.is_number_integer()) fail(ErrorKind::kConfiguration, "\"" + key + "\" must be an integer");
      return value.get<int>();
    };
    auto text = [&]() {
      if (!value.is_string()) fail(ErrorKind::kConfiguration, "\"" + key + "\" must be a string");
      return value.get<std::string>();
    };
    if (key == "input") base.input = text();
    else if (key == "out") base.out = text();
    else if (key == "rings") base.rings = integer();
    else if (key == "boundary") base.boundary = integer();
    else if (key == "eps0") base.eps0 = number();
    else if (key == "factor") base.factor = number();
    else if (key == "count") base.count = integer();
    else if (key == "resolution") base.resolution = integer();
    else if (key == "samples") base.samples = integer();
    else if (key == "limit_tol") base.limit_tol = number();
    else if (key == "planarity_slack") base.planarity_slack = number();
    else if (key == "phi_jump_tol") base.phi_jump_tol = number();
    else if (key == "annulus_area_tol") base.annulus_area_tol = number();
    else if (key == "annulus_steps") base.annulus_steps = integer();
    else if (key == "annulus_angles") base.annulus_angles = integer();
    else if (key == "swept_steps") base.swept_steps = integer();
    else if (key == "swept_angles") base.swept_angles = integer();
    else if (key == "frame_steps") base.frame_steps = integer();
    else if (key == "frame_points") base.frame_points = integer();
    else if (key == "svg") {
      if (!value.is_boolean()) fail(ErrorKind::kConfiguration, "\"svg\" must be a boolean");
      base.svg = value.get<bool>();
    } else if (key == "mode") {
      const std::string m = text();
      if (m == "warm") base.mode = SweepMode::kWarm;
      else if (m == "cold") base.mode = SweepMode::kCold;
      else fail(ErrorKind::kConfiguration, "\"mode\" must be \"warm\" or \"cold\"");
    } else if (key == "solver") {
      base.solver = parse_solver_settings(value, base.solver);
    } else {
      fail(ErrorKind::kConfiguration, "unknown configuration key \"" + key + "\"");
    }
  }
  return base;
}

json to_json(const RunConfig& cfg) {
  return json{{"input", cfg.input},
              {"out", cfg.out},
              {"rings", cfg.rings},
              {"boundary", cfg.boundary},
              {"eps0", round12(cfg.eps0)},
              {"factor", round12(cfg.factor)},
              {"count", cfg.count},
              {"resolution", cfg.resolution},
              {"samples", cfg.samples},
              {"mode", to_string(cfg.mode)},
              {"solver", to_json(cfg.solver)},
              {"limit_tol", round12(cfg.limit_tol)},
              {"planarity_slack", round12(cfg.planarity_slack)},
              {"phi_jump_tol", round12(cfg.phi_jump_tol)},
              {"annulus_area_tol", round12(cfg.annulus_area_tol)},
              {"annulus_steps", cfg.annulus_steps},
              {"annulus_angles", cfg.annulus_angles},
              {"swept_steps", cfg.swept_steps},
              {"swept_angles", cfg.swept_angles},
              {"frame_steps", cfg.frame_steps},
              {"frame_points", cfg.frame_points},
              {"svg", cfg.svg}};
}

void check_run_config(const RunConfig& cfg) {
  if (cfg.rings < 1) fail(ErrorKind::kConfiguration, "rings must be >= 1");
  if (cfg.boundary < 12 || cfg.boundary % 3 != 0) fail(ErrorKind::kConfiguration, "boundary must be >= 12 and divisible by 3");
  epsilon_schedule(cfg.eps0, cfg.factor, cfg.count);
  if (cfg.resolution < 64) fail(ErrorKind::kConfiguration, "resolution must be >= 64");
  if (cfg.samples < 3) fail(ErrorKind::kConfiguration, "samples must be >= 3");
  if (cfg.limit_tol < 0.0 || cfg.phi_jump_tol < 0.0 || cfg.planarity_slack < 0.0 || cfg.annulus_area_tol < 0.0) {
    fail(ErrorKind::kConfiguration, "tolerances must be nonnegative");
  }
  if (cfg.swept_steps < 2 || cfg.swept_angles < 3 || cfg.annulus_steps < 2 || cfg.annulus_angles < 3) fail(ErrorKind::kConfiguration, "swept-area grid too small");
  if (cfg.frame_steps < 2 || cfg.frame_points < 3) fail(ErrorKind::kConfiguration, "frame grid too small");
}

// ---------------------------------------------------------------------------
// Pipeline

bool PipelineResult::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::optional<CatalogEntry> match_catalog(const ClosedCurve& curve) {
  for (const CatalogEntry& e : catalog()) {
    std::optional<ClosedCurve> generated;
    try {
      generated = e.generate(curve.size());
    } catch (const Error&) {
      continue;  // e.g. odd sample count for a two-lobe generator
    }
    const ClosedCurve& c = *generated;
    const double tol = 1e-9 * std::max(1.0, c.diameter());
    bool same = c.size() == curve.size();
    for (int i = 0; same && i < c.size(); ++i) same = (c.point(i) - curve.point(i)).norm() <= tol;
    if (same) return e;
  }
  return std::nullopt;
}

PipelineResult run_pipeline(const ClosedCurve& input, const RunConfig& cfg) {
  check_run_config(cfg);
  const std::optional<CatalogEntry> entry = match_catalog(input);
  ClosedCurve curve = resample_arclength(input, cfg.samples);
  IntersectionReport intersections = self_intersections(curve);

  const MeshPtr mesh = make_disk_mesh(cfg.rings, cfg.boundary);
  const std::vector<double> schedule = epsilon_schedule(cfg.eps0, cfg.factor, cfg.count);
  ContinuationRecord record = run_sweep(curve, mesh, schedule, cfg.solver, cfg.mode);
  for (const SweepEntry& e : record.entries) {
    if (e.result.converged) continue;
    std::string series;
    for (const SweepEntry& f : record.entries) {
      series += (series.empty() ? "" : ", ") + fmt(f.epsilon) + ":" + fmt(f.projected_distance) + "/" +
                (f.result.converged ? "ok" : "cap");
    }
    fail(ErrorKind::kNonConvergence, "sweep hit the iteration cap (" + std::to_string(cfg.solver.max_outer) +
                                         ") at eps " + fmt(e.epsilon) + "; eps:projected distance/status " + series);
  }
  const double limit_tol = cfg.limit_tol > 0.0 ? cfg.limit_tol : default_limit_tol(curve);
  LimitResult limit = extract_limit(record, limit_tol);
  const double jump_tol = cfg.phi_jump_tol > 0.0 ? cfg.phi_jump_tol : default_phi_jump_tol(cfg.boundary);
  Homotopy homotopy = build_null_homotopy(limit, curve, jump_tol);
  const SweptArea swept = homotopy_swept_area(homotopy, cfg.swept_steps, cfg.swept_angles);
  const double annulus = annulus_swept_area(homotopy, cfg.annulus_steps, cfg.annulus_angles);
  const WindingIntegral winding = winding_area(curve, cfg.resolution);

  std::vector<OscillationReport> oscillation;
  for (const SweepEntry& e : record.entries) {
    oscillation.push_back(courant_lebesgue_check(e.result.map, e.result.energy, cfg.solver.cl_slack, dyadic_deltas()));
  }

  std::vector<Verdict> verdicts;
  auto add = [&](std::string name, bool pass, std::string detail) {
    verdicts.push_back({std::move(name), pass, std::move(detail)});
  };

  {
    bool ok = true;
    double worst = -1e300;
    for (const SweepEntry& e : record.entries) {
      worst = std::max(worst, e.result.energy - e.result.cone_energy);
      ok = ok && e.result.energy <= e.result.cone_energy + 1e-9;
    }
    add("competitor_inequality", ok, "max(energy - cone energy) = " + fmt(worst));
  }
  {
    double worst = 0.0;
    for (const SweepEntry& e : record.entries) worst = std::max(worst, e.result.energy);
    add("energy_bound", worst <= record.energy_bound,
        "max energy " + fmt(worst) + " vs bound " + fmt(record.energy_bound));
  }
  {
    bool ok = true;
    double worst = 0.0;
    for (size_t k = 0; k < record.entries.size(); ++k) {
      if (!record.entries[k].result.converged) continue;
      ok = ok && oscillation[k].pass();
      for (const auto& s : oscillation[k].samples) worst = std::max(worst, s.oscillation / s.bound);
    }
    add("courant_lebesgue", ok, "max oscillation / bound = " + fmt(worst) + " (slack " + fmt(cfg.solver.cl_slack) + ")");
  }
  {
    bool ok = true;
    for (size_t k = 1; k < record.entries.size(); ++k) {
      ok = ok && record.entries[k].planarity_defect < record.entries[k - 1].planarity_defect;
    }
    add("planarity_decay", ok, "final planarity defect " + fmt(limit.planarity_defect));
  }
  {
    // Sup-distance and phi change between consecutive maps, decreasing over
    // the last three schedule entries.
    const auto& e = record.entries;
    const size_t n = e.size();
    bool ok = true;
    for (size_t k = std::max<size_t>(n, 4) - 2; k < n; ++k) {
      ok = ok && e[k].map_distance < e[k - 1].map_distance && e[k].phi_change < e[k - 1].phi_change;
    }
    add("cauchy_monitor", ok || n < 3,
        "last sup-distance " + fmt(e.back().map_distance) + ", last phi change " + fmt(e.back().phi_change));
  }
  {
    const double deficit = chord_deficit(curve, limit.phi0);
    const double slack = winding.error + deficit + 0.02 * limit.area0;
    add("winding_lower_bound", limit.area0 >= winding.value - slack,
        "area0 " + fmt(limit.area0) + " vs winding integral " + fmt(winding.value) + " - " + fmt(slack) +
            " (raster " + fmt(winding.error) + ", chords " + fmt(deficit) + ", 2% solve)");
  }
  if (entry) {
    if (entry->exact_area) {
      const double rel = std::abs(limit.area0 - *entry->exact_area) / *entry->exact_area;
      add("catalog_exact", rel <= entry->tolerance,
          entry->name + ": relative error " + fmt(rel) + " (tolerance " + fmt(entry->tolerance) + ")");
    } else {
      add("catalog_lower_bound", limit.area0 >= entry->winding_integral * (1.0 - entry->tolerance),
          entry->name + ": area0 " + fmt(limit.area0) + " vs lower bound " + fmt(entry->winding_integral));
    }
  }
  {
    const double u0_area = map_area(limit.u0);
    const double rel = std::abs(swept.total - u0_area) / u0_area;
    add("swept_area_identity", rel <= 0.03, "swept " + fmt(swept.total) + " vs u0 area " + fmt(u0_area));
    add("annulus_area", annulus <= cfg.annulus_area_tol * swept.total,
        "second half " + fmt(annulus) + " of total " + fmt(swept.total) + " on the " +
            std::to_string(cfg.annulus_steps) + "x" + std::to_string(cfg.annulus_angles) + " grid");
  }
  {
    double gap = 0.0;
    for (int j = 0; j < cfg.frame_points; ++j) {
      const double theta = kTwoPi * j / cfg.frame_points;
      gap = std::max(gap, (homotopy.disk_branch(0.5, theta) - homotopy.boundary_branch(0.5, theta)).norm());
    }
    add("interface_continuity", gap <= homotopy.interface_tolerance(),
        "gap " + fmt(gap) + " vs tolerance " + fmt(homotopy.interface_tolerance()));
  }

  return PipelineResult{std::move(curve),
                        std::move(intersections),
                        std::move(record),
                        std::move(limit),
                        std::move(homotopy),
                        swept,
                        annulus,
                        winding,
                        std::move(oscillation),
                        entry ? std::optional<std::string>(entry->name) : std::nullopt,
                        std::move(verdicts)};
}

// ---------------------------------------------------------------------------
// Artifacts

json verdict_json(const PipelineResult& result) {
  json rows = json::array();
  for (const Verdict& v : result.verdicts) rows.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return json{{"pass", result.pass()},
              {"catalog_match", result.catalog_match ? json(*result.catalog_match) : json(nullptr)},
              {"area0", round12(result.limit.area0)},
              {"winding_area", round12(result.winding.value)},
              {"winding_error", round12(result.winding.error)},
              {"swept_area", {{"total", round12(result.swept.total)},
                              {"first_half", round12(result.swept.first_half)},
                              {"second_half", round12(result.swept.second_half)},
                              {"annulus_audit", round12(result.annulus_area)}}},
              {"crossings", {{"transverse", result.intersections.transverse_count()},
                             {"tangential", result.intersections.tangential_count()}}},
              {"verdicts", rows}};
}

void write_artifacts(const PipelineResult& result, const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.out);
  const json config = to_json(cfg);

  json sweep = sweep_json(result.record);
  sweep["config"] = config;
  write_text(dir / "sweep.json", sweep.dump(1) + "\n");
  write_text(dir / "sweep.csv", "# config " + config.dump() + "\n" + sweep_csv(result.record));

  json limit = limit_json(result.limit);
  limit["interface_tolerance"] = round12(result.homotopy.interface_tolerance());
  limit["config"] = config;
  write_text(dir / "limit.json", limit.dump(1) + "\n");

  json verdict = verdict_json(result);
  verdict["config"] = config;
  write_text(dir / "verdict.json", verdict.dump(1) + "\n");

  write_text(dir / "u0_mesh.txt", mesh_text(result.limit.u0));

  // Full-precision state for the frames command.
  json u0 = json::array();
  const Eigen::MatrixXd& v = result.limit.u0.values();
  for (int r = 0; r < v.rows(); ++r) u0.push_back({v(r, 0), v(r, 1)});
  json pins = json::array();
  for (const Pin& p : result.limit.phi0.pins()) pins.push_back({p.boundary_index, p.curve_param});
  json curve_pts = json::array();
  for (const Vec2& p : result.curve.points()) curve_pts.push_back({p.x(), p.y()});
  const json state{{"config", config},
                   {"rings", cfg.rings},
                   {"boundary", cfg.boundary},
                   {"curve", curve_pts},
                   {"u0", u0},
                   {"phi0", result.limit.phi0.lifted()},
                   {"pins", pins},
                   {"phi_jump_tol", cfg.phi_jump_tol > 0.0 ? cfg.phi_jump_tol : default_phi_jump_tol(cfg.boundary)}};
  write_text(dir / "state.json", state.dump() + "\n");

  export_frames(result.homotopy, cfg.frame_steps, cfg.frame_points, dir, cfg.svg, json{{"config", config}}.dump());
}

Homotopy load_homotopy(const std::filesystem::path& state_file, json* config) {
  json state;
  try {
    state = json::parse(read_text(state_file));
    const int rings = state.at("rings").get<int>();
    const int boundary = state.at("boundary").get<int>();
    const MeshPtr mesh = make_disk_mesh(rings, boundary);
    std::vector<Vec2> pts;
    for (const auto& p : state.at("curve")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    ClosedCurve curve = ClosedCurve::from_points(std::move(pts));
    const auto& u0 = state.at("u0");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(u0.size()), 2);
    for (size_t r = 0; r < u0.size(); ++r) {
      values(static_cast<Eigen::Index>(r), 0) = u0[r].at(0).get<double>();
      values(static_cast<Eigen::Index>(r), 1) = u0[r].at(1).get<double>();
    }
    PinSet pins;
    for (size_t k = 0; k < 3; ++k) {
      pins[k] = Pin{state.at("pins").at(k).at(0).get<int>(), state.at("pins").at(k).at(1).get<double>()};
    }
    BoundaryParam phi0(state.at("phi0").get<std::vector<double>>(), pins, mesh->boundary_angles());
    if (config) *config = state.at("config");
    return build_null_homotopy(DiskMap(mesh, std::move(values)), phi0, curve, state.at("phi_jump_tol").get<double>());
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "state file " + state_file.string() + " is malformed: " + e.what());
  }
}

}  // namespace mha
