#pragma once

// File formats: row-major matrix CSV, sheaf JSON, candidate tables, edge
// selections, dataset containers and GraphML / DOT topology exports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheaflearn/denoise.hpp"
#include "sheaflearn/infer.hpp"
#include "sheaflearn/sheaf.hpp"
#include "sheaflearn/synth.hpp"

namespace sheaflearn::io {

using nlohmann::json;
namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Header row of column indices, then one line per row.
std::string matrix_to_csv(const MatrixXd& m);
MatrixXd matrix_from_csv(const std::string& text);
void write_matrix_csv(const fs::path& path, const MatrixXd& m);
MatrixXd read_matrix_csv(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// {nodes, ambient_dim, per_node_dim, edges: [{tail, head, F_tail, F_head}]}
/// with maps flattened row-major.
json sheaf_to_json(const Sheaf<double>& sheaf);
Sheaf<double> sheaf_from_json(const json& j);

/// u,v,cost,rank,sigma_1..sigma_k; shorter singular-value lists padded with 0.
std::string candidates_to_csv(const std::vector<Candidate>& candidates);
/// One row-major CSV per candidate map: map_u_<u>_<v>.csv (map_v is I).
void write_candidate_maps(const fs::path& dir, const std::vector<Candidate>& candidates);

json selection_to_json(const EdgeSelection& selection);

json sparse_code_to_json(const SparseCode& code, const std::string& coefficients_csv_path);

struct TopologyNode {
  int dim = 0;
  int cluster = 0;
};

struct TopologyEdge {
  NodeId u = -1;
  NodeId v = -1;
  double cost = 0.0;
};

std::string topology_graphml(const std::string& graph_id, const std::vector<TopologyNode>& nodes,
                             const std::vector<TopologyEdge>& edges);
std::string topology_dot(const std::string& graph_id, const std::vector<TopologyNode>& nodes,
                         const std::vector<TopologyEdge>& edges);

/// Edges of a selection with their costs, in selection order.
std::vector<TopologyEdge> selection_edges(const EdgeSelection& selection);

json synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const json& j, SynthConfig base = {});
json denoise_config_to_json(const DenoiseConfig& cfg);
DenoiseConfig denoise_config_from_json(const json& j, DenoiseConfig base = {});

/// Directory with manifest.json plus node_<u>_{observation,dictionary,
/// coefficients,noise}.csv. The manifest records config, seed and ground truth.
void save_dataset(const fs::path& dir, const Dataset& ds);
Dataset load_dataset(const fs::path& dir);

}  // namespace sheaflearn::io
