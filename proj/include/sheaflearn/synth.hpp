#pragma once

// Seeded synthetic node data: each node observes Y_u = D_u S_u + N_u where
// D_u is a random subset of a known orthonormal basis, the coefficient rows
// share a common Gaussian latent factor, and the white noise is rescaled to
// an exact per-node SNR.

#include <cstdint>
#include <random>
#include <vector>

#include "sheaflearn/denoise.hpp"

namespace sheaflearn {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream, index); the result does not
/// depend on how many other streams were drawn before.
Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Haar-distributed matrix with orthonormal columns (rows >= cols).
MatrixXd random_orthonormal(int rows, int cols, Rng& rng);

MatrixXd gaussian_matrix(int rows, int cols, Rng& rng);

struct SynthConfig {
  int node_count = 16;
  int ambient_dim = 64;
  std::vector<int> dims;  // per-node subspace dimension; empty = sample in [dim_min, dim_max]
  int dim_min = 4;
  int dim_max = 32;
  int snapshots = 512;
  double rho = 0.9;  // correlation of coefficients on shared atoms
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  bool random_bases = false;  // per-node random orthonormal basis instead of the standard basis
  std::vector<int> labels;    // optional cluster label per node

  void validate() const;
};

struct NodeGroundTruth {
  std::vector<int> subset;  // ascending atom indices
  MatrixXd coefficients;    // K x N, rows outside `subset` exactly zero
  MatrixXd noise;           // d x N
  int cluster = 0;
};

struct Dataset {
  SynthConfig config;
  std::vector<MatrixXd> observations;      // Y_u, d x N
  std::vector<Dictionary> dictionaries;    // known dictionary of each node
  std::vector<NodeGroundTruth> truth;

  int node_count() const { return static_cast<int>(observations.size()); }
  MatrixXd clean_signal(int u) const { return dictionaries[u].atoms * truth[u].coefficients; }
  std::vector<int> cluster_labels() const;
};

Dataset generate_dataset(const SynthConfig& cfg);

/// 16 nodes in ambient R^64: nodes 0-7 live on 10-dimensional subspaces
/// (label 0), nodes 8-15 on 40-dimensional ones (label 1), each drawn from its
/// own random orthonormal basis.
SynthConfig cluster_scenario_config(std::uint64_t seed, int snapshots = 512, double rho = 0.9, double snr_db = 20.0);
Dataset generate_cluster_scenario(std::uint64_t seed);

/// 10 log10(||clean||^2 / ||noise||^2).
double realized_snr_db(const MatrixXd& clean, const MatrixXd& noise);

}  // namespace sheaflearn
