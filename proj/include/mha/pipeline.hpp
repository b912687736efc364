#pragma once

#include "mha/homotopy.hpp"
#include "mha/io.hpp"
#include "mha/oracle.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mha {

struct RunConfig {
  std::string input;
  std::string out = "out";
  int rings = 24;
  int boundary = 48;
  double eps0 = 0.2;
  double factor = 0.5;
  int count = 4;
  int resolution = 512;
  int samples = 384;  // arc-length resampling of the input
  SweepMode mode = SweepMode::kWarm;
  SolverSettings solver;
  double limit_tol = 0.0;     // 0: 1e-3 x curve diameter
  double planarity_slack = 0.5;
  double phi_jump_tol = 0.0;  // 0: 16 pi / boundary
  double annulus_area_tol = 1e-3;
  int annulus_steps = 16;      // second-half audit grid; exact in time, so only the angles matter
  int annulus_angles = 16384;
  int swept_steps = 64;
  int swept_angles = 256;
  int frame_steps = 5;
  int frame_points = 128;
  bool svg = true;
};

/// Overlays the keys of `doc` onto `base`; unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& doc, RunConfig base = {});
nlohmann::json to_json(const RunConfig& cfg);
/// Throws configuration errors for out-of-range fields.
void check_run_config(const RunConfig& cfg);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PipelineResult {
  ClosedCurve curve;  // arc-length resampled input
  IntersectionReport intersections;
  ContinuationRecord record;
  LimitResult limit;
  Homotopy homotopy;
  SweptArea swept;
  double annulus_area = 0.0;  // second half on the audit grid
  WindingIntegral winding;
  std::vector<OscillationReport> oscillation;  // one per sweep entry
  std::optional<std::string> catalog_match;
  std::vector<Verdict> verdicts;

  bool pass() const;
};

/// Catalog entry whose generator reproduces `curve` sample for sample.
std::optional<CatalogEntry> match_catalog(const ClosedCurve& curve);

/// Resample, sweep, extract the limit, build the homotopy and cross-check it
/// against the oracles. Stage failures propagate as Error.
PipelineResult run_pipeline(const ClosedCurve& input, const RunConfig& cfg);

nlohmann::json verdict_json(const PipelineResult& result);

/// sweep.json, sweep.csv, limit.json, verdict.json, u0_mesh.txt, state.json,
/// frames.json and frame SVGs under cfg.out.
void write_artifacts(const PipelineResult& result, const RunConfig& cfg);

/// Homotopy restored from state.json written by write_artifacts.
Homotopy load_homotopy(const std::filesystem::path& state_file, nlohmann::json* config = nullptr);

}  // namespace mha
