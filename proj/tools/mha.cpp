// mha: command-line front end for the minimal-homotopy-area pipeline.
//
//   mha solve --input curve.json [--config run.json] [--out dir] [overrides]
//   mha validate [--filter name ...] [--out dir]
//   mha frames [--state dir/state.json] --times 0,0.5,1 [--out dir]
//   mha catalog [--emit name --samples n]
//
// Exit status: 0 when every stage and verdict passed, 1 when a verdict
// failed, 2 on an error (serialized to stderr as JSON).

#include "mha/error.hpp"
#include "mha/io.hpp"
#include "mha/oracle.hpp"
#include "mha/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::string> input, out, mode;
  std::optional<int> rings, boundary, count, resolution, samples, max_outer;
  std::optional<double> eps0, factor, step0, step_min, energy_tol, cl_slack, increment_cap;
  bool no_svg = false;
};

void add_run_flags(CLI::App* cmd, Overrides& o, std::string& config_file) {
  cmd->add_option("--config", config_file, "JSON run configuration");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--rings", o.rings, "mesh rings");
  cmd->add_option("--boundary", o.boundary, "boundary vertices (multiple of 3)");
  cmd->add_option("--eps0", o.eps0, "first lift parameter");
  cmd->add_option("--factor", o.factor, "schedule ratio in (0, 1)");
  cmd->add_option("--count", o.count, "schedule length");
  cmd->add_option("--resolution", o.resolution, "winding raster resolution");
  cmd->add_option("--samples", o.samples, "arc-length resampling of the input");
  cmd->add_option("--mode", o.mode, "warm or cold sweep");
  cmd->add_option("--step0", o.step0, "solver: first trial step");
  cmd->add_option("--step-min", o.step_min, "solver: backtracking floor");
  cmd->add_option("--energy-tol", o.energy_tol, "solver: relative decrease threshold");
  cmd->add_option("--max-outer", o.max_outer, "solver: iteration cap");
  cmd->add_option("--cl-slack", o.cl_slack, "solver: oscillation diagnostic slack");
  cmd->add_option("--increment-cap", o.increment_cap, "solver: max boundary increment in spacings (0: none)");
  cmd->add_flag("--no-svg", o.no_svg, "skip SVG drawings");
}

// flags > file > defaults
mha::RunConfig resolve(const std::string& config_file, const Overrides& o) {
  mha::RunConfig cfg;
  if (!config_file.empty()) {
    json doc;
    try {
      doc = json::parse(mha::read_text(config_file));
    } catch (const json::exception& e) {
      mha::fail(mha::ErrorKind::kParse, "config " + config_file + " is not valid JSON: " + e.what());
    }
    cfg = mha::parse_run_config(doc);
  }
  json flags = json::object();
  json solver = json::object();
  if (o.input) flags["input"] = *o.input;
  if (o.out) flags["out"] = *o.out;
  if (o.mode) flags["mode"] = *o.mode;
  if (o.rings) flags["rings"] = *o.rings;
  if (o.boundary) flags["boundary"] = *o.boundary;
  if (o.count) flags["count"] = *o.count;
  if (o.resolution) flags["resolution"] = *o.resolution;
  if (o.samples) flags["samples"] = *o.samples;
  if (o.eps0) flags["eps0"] = *o.eps0;
  if (o.factor) flags["factor"] = *o.factor;
  if (o.no_svg) flags["svg"] = false;
  if (o.step0) solver["step0"] = *o.step0;
  if (o.step_min) solver["step_min"] = *o.step_min;
  if (o.energy_tol) solver["energy_tol"] = *o.energy_tol;
  if (o.max_outer) solver["max_outer"] = *o.max_outer;
  if (o.cl_slack) solver["cl_slack"] = *o.cl_slack;
  if (o.increment_cap) solver["increment_cap"] = *o.increment_cap;
  if (!solver.empty()) flags["solver"] = solver;
  cfg = mha::parse_run_config(flags, cfg);
  mha::check_run_config(cfg);
  return cfg;
}

void report_error(const mha::Error& e) {
  std::cerr << json{{"error", std::string(mha::to_string(e.kind()))}, {"message", e.what()}}.dump() << "\n";
}

int cmd_solve(const mha::RunConfig& cfg) {
  if (cfg.input.empty()) mha::fail(mha::ErrorKind::kConfiguration, "solve needs --input or \"input\" in the config");
  const mha::ClosedCurve curve = mha::load_curve(cfg.input);
  const mha::PipelineResult result = mha::run_pipeline(curve, cfg);
  mha::write_artifacts(result, cfg);
  for (const mha::Verdict& v : result.verdicts) {
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.detail.c_str());
  }
  std::printf("area0 %s (winding integral %s)\n", mha::fmt12(mha::round12(result.limit.area0)).c_str(),
              mha::fmt12(mha::round12(result.winding.value)).c_str());
  return result.pass() ? 0 : 1;
}

int cmd_validate(const mha::RunConfig& cfg, const std::vector<std::string>& filter, bool filter_given) {
  std::vector<mha::CatalogEntry> entries;
  for (const mha::CatalogEntry& e : mha::catalog()) {
    if (!filter_given || std::find(filter.begin(), filter.end(), e.name) != filter.end()) entries.push_back(e);
  }
  if (entries.empty()) mha::fail(mha::ErrorKind::kConfiguration, "no catalog entries match the filter");

  std::string table = "name,area0,oracle,oracle_kind,relative_error,winding_error,pass,detail\n";
  json rows = json::array();
  bool all = true;
  for (const mha::CatalogEntry& e : entries) {
    const double oracle = e.exact_area ? *e.exact_area : e.winding_integral;
    const std::string kind = e.exact_area ? "exact" : "lower_bound";
    json row{{"name", e.name}, {"oracle", mha::round12(oracle)}, {"oracle_kind", kind}};
    std::string line;
    try {
      const mha::PipelineResult r = mha::run_pipeline(e.generate(cfg.samples), cfg);
      const double rel = (r.limit.area0 - oracle) / oracle;
      std::string failed;
      for (const mha::Verdict& v : r.verdicts) {
        if (!v.pass) failed += (failed.empty() ? "" : " ") + v.name;
      }
      row["area0"] = mha::round12(r.limit.area0);
      row["relative_error"] = mha::round12(rel);
      row["winding_error"] = mha::round12(r.winding.error);
      row["pass"] = r.pass();
      row["failed"] = failed;
      all = all && r.pass();
      line = e.name + "," + mha::fmt12(mha::round12(r.limit.area0)) + "," + mha::fmt12(mha::round12(oracle)) + "," +
             kind + "," + mha::fmt12(mha::round12(rel)) + "," + mha::fmt12(mha::round12(r.winding.error)) + "," +
             (r.pass() ? "pass" : "fail") + "," + failed + "\n";
    } catch (const mha::Error& err) {
      all = false;
      row["pass"] = false;
      row["error"] = {{"error", std::string(mha::to_string(err.kind()))}, {"message", err.what()}};
      line = e.name + ",,," + kind + ",,,fail," + std::string(mha::to_string(err.kind())) + "\n";
    }
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    table += line;
    rows.push_back(row);
  }
  const std::filesystem::path dir(cfg.out);
  mha::write_text(dir / "validation.csv", "# config " + mha::to_json(cfg).dump() + "\n" + table);
  mha::write_text(dir / "validation.json",
                  json{{"config", mha::to_json(cfg)}, {"pass", all}, {"entries", rows}}.dump(1) + "\n");
  return all ? 0 : 1;
}

int cmd_frames(const std::string& state, const std::string& times_arg, const std::string& out, int points,
               bool svg) {
  std::vector<double> times;
  std::stringstream ss(times_arg);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      size_t used = 0;
      times.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      mha::fail(mha::ErrorKind::kParse, "bad frame time \"" + tok + "\"");
    }
  }
  for (double t : times) {
    if (!(t >= 0.0 && t <= 1.0)) mha::fail(mha::ErrorKind::kDomain, "frame time " + mha::fmt12(t) + " outside [0, 1]");
  }
  if (!std::filesystem::exists(state)) {
    mha::fail(mha::ErrorKind::kPrecondition, "no solve artifacts at " + state + "; run mha solve first");
  }
  json config;
  const mha::Homotopy h = mha::load_homotopy(state, &config);
  const mha::FrameExport ex = mha::render_frames_at(h, times, points, svg, json{{"config", config}}.dump());
  const std::filesystem::path dir(out);
  mha::write_text(dir / "frames.json", ex.document);
  for (size_t k = 0; k < ex.svgs.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.svg", k);
    mha::write_text(dir / name, ex.svgs[k]);
  }
  std::printf("%zu frames written to %s\n", times.size(), dir.string().c_str());
  return 0;
}

int cmd_catalog(const std::string& emit, int samples, int resolution) {
  if (emit.empty()) {
    std::fputs(mha::catalog_csv(resolution, samples).c_str(), stdout);
    return 0;
  }
  for (const mha::CatalogEntry& e : mha::catalog()) {
    if (e.name == emit) {
      std::fputs(mha::curve_document(e.generate(samples)).c_str(), stdout);
      return 0;
    }
  }
  mha::fail(mha::ErrorKind::kConfiguration, "unknown catalog entry \"" + emit + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal null homotopies of planar closed curves"};
  app.require_subcommand(1);

  Overrides solve_o, validate_o;
  std::string solve_config, validate_config;
  auto* solve = app.add_subcommand("solve", "run the pipeline on a curve file");
  solve->add_option("--input", solve_o.input, "curve JSON file");
  add_run_flags(solve, solve_o, solve_config);

  auto* validate = app.add_subcommand("validate", "run the catalog through the pipeline");
  std::vector<std::string> filter;
  auto* filter_opt = validate->add_option("--filter", filter, "catalog entry names")->expected(0, -1);
  add_run_flags(validate, validate_o, validate_config);

  auto* frames = app.add_subcommand("frames", "draw homotopy frames from a completed solve");
  std::string state = "out/state.json", times = "0,0.5,1", frames_out;
  int frame_points = 128;
  bool frames_no_svg = false;
  frames->add_option("--state", state, "state.json written by solve")->capture_default_str();
  frames->add_option("--times", times, "comma-separated times in [0, 1]")->capture_default_str();
  frames->add_option("--out", frames_out, "output directory (default: <state dir>/frames)");
  frames->add_option("--points", frame_points, "points per frame")->capture_default_str();
  frames->add_flag("--no-svg", frames_no_svg, "skip SVG drawings");

  auto* cat = app.add_subcommand("catalog", "list catalog curves or emit one as a curve file");
  std::string emit;
  int cat_samples = 384, cat_resolution = 512;
  cat->add_option("--emit", emit, "entry name to write as curve JSON");
  cat->add_option("--samples", cat_samples, "samples per curve")->capture_default_str();
  cat->add_option("--resolution", cat_resolution, "winding raster resolution")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(resolve(solve_config, solve_o));
    if (*validate) return cmd_validate(resolve(validate_config, validate_o), filter, filter_opt->count() > 0);
    if (*frames) {
      const std::string out =
          frames_out.empty() ? (std::filesystem::path(state).parent_path() / "frames").string() : frames_out;
      return cmd_frames(state, times, out, frame_points, !frames_no_svg);
    }
    if (*cat) return cmd_catalog(emit, cat_samples, cat_resolution);
  } catch (const mha::Error& e) {
    report_error(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 2;
}
