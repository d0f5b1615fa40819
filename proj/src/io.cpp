#include "sheaflearn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sheaflearn::io {

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string matrix_to_csv(const MatrixXd& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 12 + 16);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out += ',';
    out += std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("matrix CSV: cannot parse '" + std::string(s) + "'");
  return x;
}

}  // namespace

MatrixXd matrix_from_csv(const std::string& text) {
  std::vector<std::string_view> lines;
  std::string_view view(text);
  for (auto line : split(view, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("matrix CSV: missing header row");
  const std::size_t cols = lines.front().empty() ? 0 : split(lines.front(), ',').size();
  MatrixXd m(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != cols)
      throw std::invalid_argument("matrix CSV: row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) m(i - 1, j) = parse_double(fields[j]);
  }
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix_csv(const fs::path& path, const MatrixXd& m) { write_text(path, matrix_to_csv(m)); }
MatrixXd read_matrix_csv(const fs::path& path) { return matrix_from_csv(read_text(path)); }

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }
json read_json(const fs::path& path) { return json::parse(read_text(path)); }

namespace {

json row_major(const MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

MatrixXd from_row_major(const json& arr, int d) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != d * d)
    throw StructuralError("sheaf JSON: map must hold ambient_dim^2 numbers");
  MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = arr.at(static_cast<std::size_t>(i * d + j)).get<double>();
  return m;
}

}  // namespace

json sheaf_to_json(const Sheaf<double>& sheaf) {
  json j;
  j["nodes"] = sheaf.node_count();
  j["ambient_dim"] = sheaf.ambient_dim();
  j["per_node_dim"] = sheaf.stalks().per_node_dim;
  json edges = json::array();
  for (const auto& e : sheaf.edges()) {
    edges.push_back({{"tail", e.tail},
                     {"head", e.head},
                     {"F_tail", row_major(e.tail_map.matrix)},
                     {"F_head", row_major(e.head_map.matrix)}});
  }
  j["edges"] = std::move(edges);
  return j;
}

Sheaf<double> sheaf_from_json(const json& j) {
  const int n = j.at("nodes").get<int>();
  const int d = j.at("ambient_dim").get<int>();
  std::vector<int> dims = j.contains("per_node_dim") ? j.at("per_node_dim").get<std::vector<int>>()
                                                     : std::vector<int>(std::max(n, 0), d);
  Sheaf<double> sheaf(StalkSpec(n, d, std::move(dims)));
  for (const auto& e : j.at("edges")) {
    sheaf.add_oriented_edge(e.at("tail").get<int>(), e.at("head").get<int>(), from_row_major(e.at("F_tail"), d),
                            from_row_major(e.at("F_head"), d));
  }
  return sheaf;
}

std::string candidates_to_csv(const std::vector<Candidate>& candidates) {
  Eigen::Index k = 0;
  for (const auto& c : candidates) k = std::max(k, c.singular_values.size());
  std::string out = "u,v,cost,rank";
  for (Eigen::Index i = 1; i <= k; ++i) out += ",sigma_" + std::to_string(i);
  out += '\n';
  for (const auto& c : candidates) {
    out += std::to_string(c.u) + ',' + std::to_string(c.v) + ',' + format_double(c.cost) + ',' +
           std::to_string(c.rank);
    for (Eigen::Index i = 0; i < k; ++i)
      out += ',' + format_double(i < c.singular_values.size() ? c.singular_values(i) : 0.0);
    out += '\n';
  }
  return out;
}

void write_candidate_maps(const fs::path& dir, const std::vector<Candidate>& candidates) {
  fs::create_directories(dir);
  for (const auto& c : candidates)
    write_matrix_csv(dir / ("map_u_" + std::to_string(c.u) + "_" + std::to_string(c.v) + ".csv"), c.map_u.matrix);
}

json selection_to_json(const EdgeSelection& selection) {
  json j;
  j["E0"] = selection.e0;
  j["connected_at"] = selection.connected_at;
  json sel = json::array();
  for (const auto& [u, v] : selection.selected) sel.push_back({u, v});
  j["selected"] = std::move(sel);
  json ranked = json::array();
  for (const auto& r : selection.ranked) ranked.push_back({{"u", r.u}, {"v", r.v}, {"cost", r.cost}});
  j["ranked"] = std::move(ranked);
  return j;
}

json sparse_code_to_json(const SparseCode& code, const std::string& coefficients_csv_path) {
  return {{"support", code.support},
          {"coefficients_csv_path", coefficients_csv_path},
          {"iterations", code.iterations},
          {"converged", code.converged},
          {"final_rel_change", code.final_rel_change},
          {"objective", code.objective}};
}

std::vector<TopologyEdge> selection_edges(const EdgeSelection& selection) {
  std::vector<TopologyEdge> out;
  out.reserve(selection.selected.size());
  for (int k = 0; k < selection.e0; ++k)
    out.push_back({selection.ranked[k].u, selection.ranked[k].v, selection.ranked[k].cost});
  return out;
}

std::string topology_graphml(const std::string& graph_id, const std::vector<TopologyNode>& nodes,
                             const std::vector<TopologyEdge>& edges) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out += "  <key id=\"dim\" for=\"node\" attr.name=\"dim\" attr.type=\"int\"/>\n";
  out += "  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n";
  out += "  <key id=\"cost\" for=\"edge\" attr.name=\"cost\" attr.type=\"double\"/>\n";
  out += "  <graph id=\"" + graph_id + "\" edgedefault=\"undirected\">\n";
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    out += "    <node id=\"n" + std::to_string(u) + "\">";
    out += "<data key=\"dim\">" + std::to_string(nodes[u].dim) + "</data>";
    out += "<data key=\"cluster\">" + std::to_string(nodes[u].cluster) + "</data></node>\n";
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out += "    <edge id=\"e" + std::to_string(k) + "\" source=\"n" + std::to_string(edges[k].u) + "\" target=\"n" +
           std::to_string(edges[k].v) + "\"><data key=\"cost\">" + format_double(edges[k].cost) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string topology_dot(const std::string& graph_id, const std::vector<TopologyNode>& nodes,
                         const std::vector<TopologyEdge>& edges) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::string out = "graph " + graph_id + " {\n  node [shape=circle, style=filled, fontcolor=white];\n";
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    const int c = std::abs(nodes[u].cluster) % 6;
    out += "  n" + std::to_string(u) + " [label=\"" + std::to_string(u) + "\\nd=" + std::to_string(nodes[u].dim) +
           "\", fillcolor=\"" + palette[c] + "\"];\n";
  }
  for (const auto& e : edges)
    out += "  n" + std::to_string(e.u) + " -- n" + std::to_string(e.v) + " [cost=" + format_double(e.cost) + "];\n";
  out += "}\n";
  return out;
}

json synth_config_to_json(const SynthConfig& cfg) {
  return {{"node_count", cfg.node_count}, {"ambient_dim", cfg.ambient_dim}, {"dims", cfg.dims},
          {"dim_min", cfg.dim_min},       {"dim_max", cfg.dim_max},         {"snapshots", cfg.snapshots},
          {"rho", cfg.rho},               {"snr_db", cfg.snr_db},           {"seed", cfg.seed},
          {"random_bases", cfg.random_bases}, {"labels", cfg.labels}};
}

SynthConfig synth_config_from_json(const json& j, SynthConfig cfg) {
  cfg.node_count = j.value("node_count", cfg.node_count);
  cfg.ambient_dim = j.value("ambient_dim", cfg.ambient_dim);
  cfg.dims = j.value("dims", cfg.dims);
  cfg.dim_min = j.value("dim_min", cfg.dim_min);
  cfg.dim_max = j.value("dim_max", cfg.dim_max);
  cfg.snapshots = j.value("snapshots", cfg.snapshots);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.snr_db = j.value("snr_db", cfg.snr_db);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.random_bases = j.value("random_bases", cfg.random_bases);
  cfg.labels = j.value("labels", cfg.labels);
  return cfg;
}

json denoise_config_to_json(const DenoiseConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"max_iters", cfg.max_iters},
          {"rel_tol", cfg.rel_tol},
          {"support_threshold", cfg.support_threshold}};
}

DenoiseConfig denoise_config_from_json(const json& j, DenoiseConfig cfg) {
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
  cfg.support_threshold = j.value("support_threshold", cfg.support_threshold);
  return cfg;
}

namespace {

std::string node_file(int u, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "node_%02d_%s.csv", u, what);
  return buf;
}

}  // namespace

void save_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  json nodes = json::array();
  for (int u = 0; u < ds.node_count(); ++u) {
    const auto& t = ds.truth[u];
    nodes.push_back({{"node", u},
                     {"subset", t.subset},
                     {"cluster", t.cluster},
                     {"dictionary_orthonormal", ds.dictionaries[u].orthonormal},
                     {"observation_csv", node_file(u, "observation")},
                     {"dictionary_csv", node_file(u, "dictionary")},
                     {"coefficients_csv", node_file(u, "coefficients")},
                     {"noise_csv", node_file(u, "noise")},
                     {"realized_snr_db", realized_snr_db(ds.clean_signal(u), t.noise)}});
    write_matrix_csv(dir / node_file(u, "observation"), ds.observations[u]);
    write_matrix_csv(dir / node_file(u, "dictionary"), ds.dictionaries[u].atoms);
    write_matrix_csv(dir / node_file(u, "coefficients"), t.coefficients);
    write_matrix_csv(dir / node_file(u, "noise"), t.noise);
  }
  json manifest;
  manifest["kind"] = "sheaflearn-dataset";
  manifest["schema_version"] = 1;
  manifest["seed"] = ds.config.seed;
  manifest["config"] = synth_config_to_json(ds.config);
  manifest["nodes"] = std::move(nodes);
  write_json(dir / "manifest.json", manifest);
}

Dataset load_dataset(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  Dataset ds;
  ds.config = synth_config_from_json(manifest.at("config"));
  for (const auto& node : manifest.at("nodes")) {
    ds.observations.push_back(read_matrix_csv(dir / node.at("observation_csv").get<std::string>()));
    ds.dictionaries.push_back(
        {read_matrix_csv(dir / node.at("dictionary_csv").get<std::string>()), node.value("dictionary_orthonormal", false)});
    NodeGroundTruth t;
    t.subset = node.value("subset", std::vector<int>{});
    t.cluster = node.value("cluster", 0);
    if (node.contains("coefficients_csv"))
      t.coefficients = read_matrix_csv(dir / node.at("coefficients_csv").get<std::string>());
    if (node.contains("noise_csv")) t.noise = read_matrix_csv(dir / node.at("noise_csv").get<std::string>());
    ds.truth.push_back(std::move(t));
  }
  return ds;
}

}  // namespace sheaflearn::io
