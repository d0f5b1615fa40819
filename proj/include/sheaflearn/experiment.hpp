#pragma once

// End-to-end experiments: generate -> denoise -> enumerate -> select ->
// assemble -> total variation, swept over (alpha, SNR, E0) for both distance
// modes, and the two-cluster dimension scenario.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sheaflearn/denoise.hpp"
#include "sheaflearn/infer.hpp"
#include "sheaflearn/synth.hpp"

namespace sheaflearn {

inline constexpr int kReportSchemaVersion = 1;

struct SweepSpec {
  std::vector<double> alpha_grid{0.1, 0.5, 1.0};
  std::vector<double> snr_grid{10.0, 20.0};
  std::vector<int> e0_grid;  // empty: every E0 from the smaller connectivity minimum to V(V-1)/2
  std::vector<DistanceMode> modes{DistanceMode::aligned, DistanceMode::baseline};
  std::uint64_t seed = 1;

  void validate() const;
};

struct RunOptions {
  int threads = 1;
  bool timing = false;  // wall_ms stays 0 unless set, keeping reports byte-reproducible
};

struct ReportRow {
  DistanceMode mode = DistanceMode::aligned;
  double alpha = 0.0;
  double snr_db = 0.0;
  int e0 = 0;
  double total_variation = 0.0;
  double intra_cluster_fraction = -1.0;  // < 0: no labels
  int connect_min = 0;
  double wall_ms = 0.0;
};

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::vector<ReportRow> rows;  // sorted by (mode, alpha, snr_db, e0)
};

/// Fraction of edges joining nodes with equal labels (0 for no edges).
double intra_cluster_fraction(const std::vector<std::pair<NodeId, NodeId>>& edges, const std::vector<int>& labels);

/// Result of learning a topology on one denoised dataset in one mode.
struct ModeResult {
  DistanceMode mode = DistanceMode::aligned;
  std::vector<Candidate> candidates;
  EdgeSelection selection;  // at the connectivity minimum
  int connect_min = 0;
  double intra_cluster_fraction = -1.0;
  double total_variation = 0.0;
};

/// Total variation of `signals` (one d x N block per node) under the sheaf
/// built from the E0 cheapest candidates, through the assembled Laplacian.
double learned_total_variation(const std::vector<Candidate>& candidates, int e0, const MatrixXd& signal_gram);

MatrixXd stacked_signal_gram(const std::vector<NodeRepresentation>& nodes);

RunReport run_tv_sweep(const SweepSpec& spec, const SynthConfig& synth, const DenoiseConfig& denoise,
                       const RunOptions& options = {});

struct ClusterSettings {
  int snapshots = 512;
  double rho = 0.9;
  double snr_db = 20.0;
  double alpha = 0.5;
};

struct ClusterOutcome {
  RunReport report;
  Dataset dataset;
  std::vector<NodeRepresentation> nodes;
  std::vector<ModeResult> modes;  // aligned, baseline
};

ClusterOutcome run_cluster_experiment(std::uint64_t seed, const ClusterSettings& settings = {},
                                      const RunOptions& options = {});

/// mode,alpha,snr_db,e0,total_variation,intra_cluster_fraction,connect_min,wall_ms
std::string report_csv(const RunReport& report);

}  // namespace sheaflearn
