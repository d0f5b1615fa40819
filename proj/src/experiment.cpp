#include "sheaflearn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <tuple>

#include "sheaflearn/io.hpp"
#include "sheaflearn/parallel.hpp"
#include "sheaflearn/sheaf.hpp"

namespace sheaflearn {

void SweepSpec::validate() const {
  if (alpha_grid.empty() || snr_grid.empty() || modes.empty())
    throw std::invalid_argument("SweepSpec: alpha, snr and mode grids must be nonempty");
  for (double a : alpha_grid)
    if (!(a >= 0.0)) throw std::invalid_argument("SweepSpec: alpha must be nonnegative");
  for (int e : e0_grid)
    if (e < 0) throw std::invalid_argument("SweepSpec: E0 must be nonnegative");
}

double intra_cluster_fraction(const std::vector<std::pair<NodeId, NodeId>>& edges, const std::vector<int>& labels) {
  if (edges.empty()) return 0.0;
  const auto intra = std::count_if(edges.begin(), edges.end(),
                                   [&](const auto& e) { return labels.at(e.first) == labels.at(e.second); });
  return static_cast<double>(intra) / static_cast<double>(edges.size());
}

MatrixXd stacked_signal_gram(const std::vector<NodeRepresentation>& nodes) {
  Cochain0<double> x;
  x.blocks.reserve(nodes.size());
  for (const auto& n : nodes) x.blocks.push_back(n.signal());
  const MatrixXd stacked = x.stacked();
  MatrixXd gram(stacked.rows(), stacked.rows());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(stacked);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return gram;
}

double learned_total_variation(const std::vector<Candidate>& candidates, int e0, const MatrixXd& signal_gram) {
  const EdgeSelection sel = select_topology(candidates, e0);
  const Sheaf<double> sheaf = build_sheaf(sel, candidates);
  return total_variation_from_gram(laplacian_blocks(sheaf), signal_gram);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool has_labels(const std::vector<int>& labels) {
  return !labels.empty() && std::any_of(labels.begin(), labels.end(), [&](int l) { return l != labels.front(); });
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.mode, a.alpha, a.snr_db, a.e0) < std::tie(b.mode, b.alpha, b.snr_db, b.e0);
  });
}

}  // namespace

RunReport run_tv_sweep(const SweepSpec& spec, const SynthConfig& synth, const DenoiseConfig& denoise,
                       const RunOptions& options) {
  spec.validate();
  denoise.validate();

  struct GridPoint {
    double snr_db;
    double alpha;
  };
  std::vector<GridPoint> grid;
  for (double snr : spec.snr_grid)
    for (double alpha : spec.alpha_grid) grid.push_back({snr, alpha});

  std::vector<std::vector<ReportRow>> per_point(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t g) {
    const auto start = Clock::now();
    SynthConfig cfg = synth;
    cfg.snr_db = grid[g].snr_db;
    cfg.seed = spec.seed;
    const Dataset ds = generate_dataset(cfg);
    DenoiseConfig dcfg = denoise;
    dcfg.alpha = grid[g].alpha;
    std::vector<NodeRepresentation> nodes;
    try {
      nodes = representations(denoise_nodes(ds.observations, ds.dictionaries, dcfg));
    } catch (const std::exception& ex) {
      throw std::runtime_error("sweep point alpha=" + io::format_double(grid[g].alpha) +
                               " snr_db=" + io::format_double(grid[g].snr_db) + ": " + ex.what());
    }
    const MatrixXd gram = stacked_signal_gram(nodes);
    const std::vector<int> labels = ds.cluster_labels();
    const bool labelled = has_labels(labels);

    std::vector<std::vector<Candidate>> candidates;
    std::vector<int> connect;
    for (DistanceMode mode : spec.modes) {
      candidates.push_back(enumerate_candidates(nodes, mode));
      connect.push_back(min_edges_for_connectivity(candidates.back()));
    }
    std::vector<int> e0s = spec.e0_grid;
    const int max_edges = static_cast<int>(candidates.front().size());
    if (e0s.empty()) {
      for (int e = *std::min_element(connect.begin(), connect.end()); e <= max_edges; ++e) e0s.push_back(e);
    }
    for (int e : e0s)
      if (e > max_edges)
        throw std::invalid_argument("sweep: E0 = " + std::to_string(e) + " exceeds " + std::to_string(max_edges));

    for (std::size_t m = 0; m < spec.modes.size(); ++m) {
      for (int e0 : e0s) {
        const EdgeSelection sel = select_topology(candidates[m], e0);
        const Sheaf<double> sheaf = build_sheaf(sel, candidates[m]);
        ReportRow row;
        row.mode = spec.modes[m];
        row.alpha = grid[g].alpha;
        row.snr_db = grid[g].snr_db;
        row.e0 = e0;
        row.total_variation = total_variation_from_gram(laplacian_blocks(sheaf), gram);
        row.intra_cluster_fraction = labelled ? intra_cluster_fraction(sel.selected, labels) : -1.0;
        row.connect_min = connect[m];
        per_point[g].push_back(row);
      }
    }
    if (options.timing) {
      const double total = elapsed_ms(start);
      for (auto& row : per_point[g]) row.wall_ms = total;
    }
  });

  RunReport report;
  for (auto& rows : per_point) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  sort_rows(report.rows);
  return report;
}

ClusterOutcome run_cluster_experiment(std::uint64_t seed, const ClusterSettings& settings,
                                      const RunOptions& options) {
  const auto start = Clock::now();
  ClusterOutcome out;
  out.dataset = generate_dataset(cluster_scenario_config(seed, settings.snapshots, settings.rho, settings.snr_db));
  DenoiseConfig dcfg;
  dcfg.alpha = settings.alpha;
  out.nodes = representations(denoise_nodes(out.dataset.observations, out.dataset.dictionaries, dcfg, options.threads));
  const MatrixXd gram = stacked_signal_gram(out.nodes);
  const std::vector<int> labels = out.dataset.cluster_labels();

  for (DistanceMode mode : {DistanceMode::aligned, DistanceMode::baseline}) {
    ModeResult r;
    r.mode = mode;
    r.candidates = enumerate_candidates(out.nodes, mode, options.threads);
    r.connect_min = min_edges_for_connectivity(r.candidates);
    r.selection = select_topology(r.candidates, r.connect_min);
    r.intra_cluster_fraction = intra_cluster_fraction(r.selection.selected, labels);
    r.total_variation = total_variation_from_gram(laplacian_blocks(build_sheaf(r.selection, r.candidates)), gram);

    ReportRow row;
    row.mode = mode;
    row.alpha = settings.alpha;
    row.snr_db = settings.snr_db;
    row.e0 = r.connect_min;
    row.total_variation = r.total_variation;
    row.intra_cluster_fraction = r.intra_cluster_fraction;
    row.connect_min = r.connect_min;
    out.report.rows.push_back(row);
    out.modes.push_back(std::move(r));
  }
  if (options.timing) {
    const double total = elapsed_ms(start);
    for (auto& row : out.report.rows) row.wall_ms = total;
  }
  sort_rows(out.report.rows);
  return out;
}

std::string report_csv(const RunReport& report) {
  std::string out = "mode,alpha,snr_db,e0,total_variation,intra_cluster_fraction,connect_min,wall_ms\n";
  for (const auto& r : report.rows) {
    out += std::string(to_string(r.mode)) + ',' + io::format_double(r.alpha) + ',' + io::format_double(r.snr_db) +
           ',' + std::to_string(r.e0) + ',' + io::format_double(r.total_variation) + ',' +
           (r.intra_cluster_fraction < 0.0 ? std::string() : io::format_double(r.intra_cluster_fraction)) + ',' +
           std::to_string(r.connect_min) + ',' + io::format_double(r.wall_ms) + '\n';
  }
  return out;
}

}  // namespace sheaflearn
