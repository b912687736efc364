#pragma once

#include "mha/continuation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mha {

/// Value printed with 12 significant digits and read back, so reports hash
/// identically across runs.
double round12(double v);
std::string fmt12(double v);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories; failures raise output errors.
void write_text(const std::filesystem::path& path, const std::string& content);

/// Curve document {"n": N, "points": [[x, y], ...]} on the uniform grid
/// t_i = 2 pi i / N. Violations name the offending sample index.
ClosedCurve parse_curve(const std::string& text);
ClosedCurve load_curve(const std::filesystem::path& path);
std::string curve_document(const ClosedCurve& curve);

/// Overlays the keys of `doc` (step0, step_min, energy_tol, max_outer,
/// cl_slack, increment_cap) onto `base`; any other key is rejected.
SolverSettings parse_solver_settings(const nlohmann::json& doc, SolverSettings base = {});
nlohmann::json to_json(const SolverSettings& cfg);

/// Plain-text mesh dump:
///   line 1: "vertices <V> dim <k>"
///   V lines: "<x> <y> <image_1> ... <image_k>"   (domain, then image)
///   next:    "triangles <T>"
///   T lines: "<i> <j> <k>"                        (0-based, CCW in the domain)
std::string mesh_text(const DiskMap& map);

nlohmann::json sweep_json(const ContinuationRecord& record);
/// One row per lift parameter, header included.
std::string sweep_csv(const ContinuationRecord& record);
nlohmann::json limit_json(const LimitResult& limit);

/// Closed path of `points` on a 512 x 512 canvas mapped from the box
/// [lo, hi] (padded by 10%), with `backdrop` drawn underneath in grey.
std::string svg_drawing(const std::vector<Vec2>& points, const std::vector<Vec2>& backdrop, const Vec2& lo,
                        const Vec2& hi, const std::string& caption);

}  // namespace mha
