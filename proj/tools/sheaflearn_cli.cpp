// sheaflearn: command-line driver for sheaf learning experiments.
//
//   sheaflearn [--config cfg.json] [--seed N] [--out DIR] [--threads N] <command>
//
// Commands: generate, denoise, infer, sweep, cluster, export.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sheaflearn/experiment.hpp"
#include "sheaflearn/io.hpp"
#include "sheaflearn/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace sheaflearn;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct AppConfig {
  SynthConfig synth;
  DenoiseConfig denoise;
  SweepSpec sweep;
  ClusterSettings cluster;
};

DistanceMode parse_mode(const std::string& s) {
  if (s == "aligned") return DistanceMode::aligned;
  if (s == "baseline") return DistanceMode::baseline;
  throw std::invalid_argument("unknown mode '" + s + "' (expected aligned or baseline)");
}

AppConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  AppConfig cfg;
  if (!path.empty()) {
    const json j = io::read_json(path);
    if (j.contains("synth")) cfg.synth = io::synth_config_from_json(j.at("synth"), cfg.synth);
    if (j.contains("denoise")) cfg.denoise = io::denoise_config_from_json(j.at("denoise"), cfg.denoise);
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      cfg.sweep.alpha_grid = s.value("alpha_grid", cfg.sweep.alpha_grid);
      cfg.sweep.snr_grid = s.value("snr_grid", cfg.sweep.snr_grid);
      cfg.sweep.e0_grid = s.value("e0_grid", cfg.sweep.e0_grid);
      if (s.contains("modes")) {
        cfg.sweep.modes.clear();
        for (const auto& m : s.at("modes")) cfg.sweep.modes.push_back(parse_mode(m.get<std::string>()));
      }
      cfg.sweep.seed = s.value("seed", cfg.synth.seed);
    } else {
      cfg.sweep.seed = cfg.synth.seed;
    }
    if (j.contains("cluster")) {
      const json& c = j.at("cluster");
      cfg.cluster.snapshots = c.value("snapshots", cfg.cluster.snapshots);
      cfg.cluster.rho = c.value("rho", cfg.cluster.rho);
      cfg.cluster.snr_db = c.value("snr_db", cfg.cluster.snr_db);
      cfg.cluster.alpha = c.value("alpha", cfg.cluster.alpha);
    }
  }
  if (seed) {
    cfg.synth.seed = *seed;
    cfg.sweep.seed = *seed;
  }
  return cfg;
}

json sweep_to_json(const SweepSpec& s) {
  json modes = json::array();
  for (auto m : s.modes) modes.push_back(to_string(m));
  return {{"alpha_grid", s.alpha_grid}, {"snr_grid", s.snr_grid}, {"e0_grid", s.e0_grid},
          {"modes", modes},            {"seed", s.seed}};
}

json manifest(const std::string& command, std::uint64_t seed, const AppConfig& cfg) {
  return {{"tool", "sheaflearn"},
          {"version", kVersion},
          {"report_schema_version", kReportSchemaVersion},
          {"command", command},
          {"seed", seed},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"config",
           {{"synth", io::synth_config_to_json(cfg.synth)},
            {"denoise", io::denoise_config_to_json(cfg.denoise)},
            {"sweep", sweep_to_json(cfg.sweep)},
            {"cluster",
             {{"snapshots", cfg.cluster.snapshots},
              {"rho", cfg.cluster.rho},
              {"snr_db", cfg.cluster.snr_db},
              {"alpha", cfg.cluster.alpha}}}}},
          {"artifact_choices",
           {"snapshot count, rho, alpha grid, SNR grid and subspace-dimension range are tool defaults, not "
            "published values",
            "coefficients: unit-variance Gaussian rows scaled by 1/sqrt(N); rows on shared atoms have correlation "
            "rho through a common latent factor",
            "noise rescaled per node to the exact Frobenius SNR"}}};
}

std::vector<io::TopologyNode> topology_nodes(const std::vector<NodeRepresentation>& nodes,
                                             const std::vector<int>& labels) {
  std::vector<io::TopologyNode> out;
  for (std::size_t u = 0; u < nodes.size(); ++u) out.push_back({nodes[u].dim(), labels.empty() ? 0 : labels[u]});
  return out;
}

void write_topology(const fs::path& stem, const std::string& id, const std::vector<io::TopologyNode>& nodes,
                    const EdgeSelection& sel) {
  const auto edges = io::selection_edges(sel);
  io::write_text(stem.string() + ".graphml", io::topology_graphml(id, nodes, edges));
  io::write_text(stem.string() + ".dot", io::topology_dot(id, nodes, edges));
}

std::vector<NodeRepresentation> denoise_dataset(const Dataset& ds, const DenoiseConfig& cfg, int threads,
                                                std::vector<SparseCode>* codes_out = nullptr) {
  auto codes = denoise_nodes(ds.observations, ds.dictionaries, cfg, threads);
  for (std::size_t u = 0; u < codes.size(); ++u)
    if (!codes[u].converged)
      std::cerr << "warning: node " << u << " did not converge in " << codes[u].iterations
                << " iterations (relative change " << codes[u].final_rel_change << ")\n";
  auto nodes = representations(codes);
  if (codes_out) *codes_out = std::move(codes);
  return nodes;
}

int cmd_generate(const AppConfig& cfg, const fs::path& out) {
  const Dataset ds = generate_dataset(cfg.synth);
  io::save_dataset(out, ds);
  std::cout << "wrote dataset with " << ds.node_count() << " nodes to " << out << "\n";
  return 0;
}

Dataset dataset_or_generate(const std::string& dir, const AppConfig& cfg) {
  return dir.empty() ? generate_dataset(cfg.synth) : io::load_dataset(dir);
}

int cmd_denoise(const AppConfig& cfg, const fs::path& out, const std::string& dataset_dir, int threads) {
  const Dataset ds = dataset_or_generate(dataset_dir, cfg);
  std::vector<SparseCode> codes;
  denoise_dataset(ds, cfg.denoise, threads, &codes);
  json summary = json::array();
  for (std::size_t u = 0; u < codes.size(); ++u) {
    char name[64];
    std::snprintf(name, sizeof(name), "node_%02zu_coefficients.csv", u);
    io::write_matrix_csv(out / name, codes[u].coefficients);
    std::snprintf(name, sizeof(name), "node_%02zu_local_basis.csv", u);
    io::write_matrix_csv(out / name, codes[u].local_basis);
    std::snprintf(name, sizeof(name), "node_%02zu_coefficients.csv", u);
    json j = io::sparse_code_to_json(codes[u], name);
    std::snprintf(name, sizeof(name), "node_%02zu_code.json", u);
    io::write_json(out / name, j);
    summary.push_back({{"node", u}, {"dim", codes[u].dim()}, {"converged", codes[u].converged}});
  }
  io::write_json(out / "denoise_summary.json", {{"denoise", io::denoise_config_to_json(cfg.denoise)}, {"nodes", summary}});
  std::cout << "denoised " << codes.size() << " nodes into " << out << "\n";
  return 0;
}

int cmd_infer(const AppConfig& cfg, const fs::path& out, const std::string& dataset_dir, const std::string& mode_name,
              std::optional<int> e0, bool maps, int threads) {
  const Dataset ds = dataset_or_generate(dataset_dir, cfg);
  const auto nodes = denoise_dataset(ds, cfg.denoise, threads);
  const DistanceMode mode = parse_mode(mode_name);
  const auto candidates = enumerate_candidates(nodes, mode, threads);
  const int k = e0.value_or(min_edges_for_connectivity(candidates));
  const EdgeSelection sel = select_topology(candidates, k);
  const Sheaf<double> sheaf = build_sheaf(sel, candidates);

  io::write_text(out / "candidates.csv", io::candidates_to_csv(candidates));
  io::write_json(out / "selection.json", io::selection_to_json(sel));
  io::write_json(out / "sheaf.json", io::sheaf_to_json(sheaf));
  write_topology(out / "topology", mode_name, topology_nodes(nodes, ds.cluster_labels()), sel);
  if (maps) io::write_candidate_maps(out / "maps", candidates);
  std::cout << mode_name << ": " << candidates.size() << " candidates, E0 = " << k << ", connected at "
            << sel.connected_at << "\n";
  return 0;
}

int cmd_sweep(const AppConfig& cfg, const fs::path& out, const RunOptions& options) {
  const RunReport report = run_tv_sweep(cfg.sweep, cfg.synth, cfg.denoise, options);
  io::write_text(out / "report.csv", report_csv(report));
  const auto plots = plot::emit_plots(report, out / "plots");
  io::write_json(out / "manifest.json", manifest("sweep", cfg.sweep.seed, cfg));
  std::cout << "sweep: " << report.rows.size() << " rows, " << plots.size() << " plots in " << out << "\n";
  return 0;
}

int cmd_cluster(const AppConfig& cfg, const fs::path& out, std::uint64_t seed, const RunOptions& options) {
  const ClusterOutcome res = run_cluster_experiment(seed, cfg.cluster, options);
  io::write_text(out / "report.csv", report_csv(res.report));
  const auto nodes = topology_nodes(res.nodes, res.dataset.cluster_labels());
  for (const auto& m : res.modes) {
    const std::string name = to_string(m.mode);
    write_topology(out / name, name, nodes, m.selection);
    io::write_text(out / (name + "_candidates.csv"), io::candidates_to_csv(m.candidates));
    std::cout << name << ": connectivity minimum E0 = " << m.connect_min
              << ", intra-cluster edge fraction = " << m.intra_cluster_fraction << "\n";
  }
  AppConfig recorded = cfg;
  recorded.synth = res.dataset.config;
  io::write_json(out / "manifest.json", manifest("cluster", seed, recorded));
  return 0;
}

int cmd_export(const fs::path& out, const std::string& sheaf_path) {
  const Sheaf<double> sheaf = io::sheaf_from_json(io::read_json(sheaf_path));
  const SheafLaplacian<double> lap = assemble_laplacian(sheaf);
  io::write_matrix_csv(out / "laplacian.csv", lap.matrix);
  io::write_matrix_csv(out / "incidence.csv", lap.incidence);
  std::vector<io::TopologyNode> nodes;
  for (int d : sheaf.stalks().per_node_dim) nodes.push_back({d, 0});
  std::vector<io::TopologyEdge> edges;
  for (const auto& e : sheaf.edges()) edges.push_back({e.tail, e.head, 0.0});
  io::write_text(out / "topology.graphml", io::topology_graphml("sheaf", nodes, edges));
  io::write_text(out / "topology.dot", io::topology_dot("sheaf", nodes, edges));
  io::write_json(out / "summary.json", {{"nodes", sheaf.node_count()},
                                        {"edges", sheaf.edge_count()},
                                        {"ambient_dim", sheaf.ambient_dim()},
                                        {"global_section_dim", global_section_dim(lap)}});
  std::cout << "exported Laplacian (" << lap.matrix.rows() << " x " << lap.matrix.cols() << ") to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn cellular sheaves (topology and orthonormal restriction maps) from node data"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
  bool timing = false;
  app.add_option("--config", config_path, "JSON config (synth / denoise / sweep / cluster sections)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "Record wall-clock times in reports (makes them non-reproducible)");

  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
  auto* denoise = app.add_subcommand("denoise", "Block-sparse code every node");
  auto* infer = app.add_subcommand("infer", "Learn a sheaf from a dataset");
  auto* sweep = app.add_subcommand("sweep", "Total variation sweep over alpha, SNR and E0");
  auto* cluster = app.add_subcommand("cluster", "Two-cluster subspace-dimension experiment");
  auto* exporter = app.add_subcommand("export", "Export Laplacian, incidence and graph of a sheaf JSON");
  for (auto* sub : {generate, denoise, infer, sweep, cluster, exporter}) sub->fallthrough();

  std::string dataset_dir;
  denoise->add_option("--dataset", dataset_dir, "Dataset directory (default: generate from config)");
  infer->add_option("--dataset", dataset_dir, "Dataset directory (default: generate from config)");
  std::string mode = "aligned";
  std::optional<int> e0;
  bool maps = false;
  infer->add_option("--mode", mode, "aligned or baseline")->check(CLI::IsMember({"aligned", "baseline"}));
  infer->add_option("--e0", e0, "Edge count (default: connectivity minimum)");
  infer->add_flag("--maps", maps, "Also write every candidate map as CSV");
  std::string sheaf_path;
  exporter->add_option("--sheaf", sheaf_path, "Sheaf JSON file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const AppConfig cfg = load_config(config_path, seed);
    const fs::path out(out_dir);
    fs::create_directories(out);
    const RunOptions options{threads, timing};
    if (*generate) return cmd_generate(cfg, out);
    if (*denoise) return cmd_denoise(cfg, out, dataset_dir, threads);
    if (*infer) return cmd_infer(cfg, out, dataset_dir, mode, e0, maps, threads);
    if (*sweep) return cmd_sweep(cfg, out, options);
    if (*cluster) return cmd_cluster(cfg, out, seed.value_or(cfg.synth.seed), options);
    if (*exporter) return cmd_export(out, sheaf_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
