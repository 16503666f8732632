#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointgraph/blocknorm.hpp"
#include "jointgraph/edges.hpp"
#include "jointgraph/fpca.hpp"
#include "jointgraph/simulate.hpp"
#include "jointgraph/solver.hpp"

namespace jointgraph::io {

using nlohmann::json;
namespace fs = std::filesystem;

/// Writes to "<path>.tmp" and renames over `path`.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// 64-bit FNV-1a, hex encoded; used to fingerprint inputs in manifests.
std::string fingerprint(const std::string& bytes);

struct GridInfo {
  double t_start = 0.0;
  double t_end = 1.0;
  int nu = 0;
};

json grid_to_json(const GridInfo& grid);
GridInfo grid_from_json(const json& j);

/// Long format with header group,subject,variable,time_index,value.
/// subject, variable and time_index are 1-based.
std::string curves_to_csv(const std::vector<CurvePanel>& panels);
/// Groups come back in order of first appearance; every (group, subject,
/// variable, time_index) cell must be present exactly once.
std::vector<CurvePanel> curves_from_csv(const std::string& text, const GridInfo& grid);

/// {"p", "M", "data": [row-major]}
json matrix_to_json(const BlockMatrix& a);
BlockMatrix matrix_from_json(const json& j);

json edges_to_json(const EdgeSet& edges);
EdgeSet edges_from_json(const json& j);

json sim_config_to_json(const SimConfig& c);
SimConfig sim_config_from_json(const json& j);

json ground_truth_to_json(const GroundTruth& truth, int p, int M);
GroundTruth ground_truth_from_json(const json& j);

json admm_settings_to_json(const AdmmSettings& s);
AdmmSettings admm_settings_from_json(const json& j);

/// Pretty JSON text with a trailing newline.
std::string dump(const json& j);

}  // namespace jointgraph::io
