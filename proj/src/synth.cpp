#include "sheaflearn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sheaflearn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum Stream : std::uint64_t { kLatent = 1, kDims = 2, kSubset = 3, kCoeffs = 4, kNoise = 5, kBasis = 6 };

std::vector<int> sample_subset(int population, int k, Rng& rng) {
  std::vector<int> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
  return m;
}

MatrixXd random_orthonormal(int rows, int cols, Rng& rng) {
  if (cols > rows || cols < 0) throw std::invalid_argument("random_orthonormal: need 0 <= cols <= rows");
  const MatrixXd g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
  const MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < cols; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

void SynthConfig::validate() const {
  if (node_count < 1) throw std::invalid_argument("SynthConfig: node_count must be >= 1");
  if (ambient_dim < 1) throw std::invalid_argument("SynthConfig: ambient_dim must be >= 1");
  if (snapshots < 1) throw std::invalid_argument("SynthConfig: snapshots must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("SynthConfig: rho must lie in [0, 1]");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("SynthConfig: snr_db must be finite");
  if (!dims.empty()) {
    if (static_cast<int>(dims.size()) != node_count)
      throw std::invalid_argument("SynthConfig: dims length != node_count");
    for (int k : dims)
      if (k < 1 || k > ambient_dim)
        throw std::invalid_argument("SynthConfig: subspace dimension " + std::to_string(k) +
                                    " outside [1, ambient_dim]");
  } else if (dim_min < 1 || dim_max < dim_min || dim_max > ambient_dim) {
    throw std::invalid_argument("SynthConfig: need 1 <= dim_min <= dim_max <= ambient_dim");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != node_count)
    throw std::invalid_argument("SynthConfig: labels length != node_count");
}

std::vector<int> Dataset::cluster_labels() const {
  std::vector<int> out;
  out.reserve(truth.size());
  for (const auto& t : truth) out.push_back(t.cluster);
  return out;
}

double realized_snr_db(const MatrixXd& clean, const MatrixXd& noise) {
  return 10.0 * std::log10(clean.squaredNorm() / noise.squaredNorm());
}

Dataset generate_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const int n = cfg.node_count;
  const int d = cfg.ambient_dim;
  const int snaps = cfg.snapshots;
  const double scale = 1.0 / std::sqrt(static_cast<double>(snaps));
  const double shared_weight = std::sqrt(cfg.rho);
  const double own_weight = std::sqrt(1.0 - cfg.rho);

  Rng latent_rng = substream(cfg.seed, kLatent);
  const MatrixXd latent = gaussian_matrix(d, snaps, latent_rng);

  Dataset ds;
  ds.config = cfg;
  ds.observations.resize(n);
  ds.dictionaries.resize(n);
  ds.truth.resize(n);
  for (int u = 0; u < n; ++u) {
    int k = 0;
    if (cfg.dims.empty()) {
      Rng dim_rng = substream(cfg.seed, kDims, u);
      k = std::uniform_int_distribution<int>(cfg.dim_min, cfg.dim_max)(dim_rng);
    } else {
      k = cfg.dims[u];
    }
    if (cfg.dims.empty()) ds.config.dims.push_back(k);

    Rng subset_rng = substream(cfg.seed, kSubset, u);
    NodeGroundTruth& truth = ds.truth[u];
    truth.subset = sample_subset(d, k, subset_rng);
    truth.cluster = cfg.labels.empty() ? 0 : cfg.labels[u];

    if (cfg.random_bases) {
      Rng basis_rng = substream(cfg.seed, kBasis, u);
      ds.dictionaries[u] = {random_orthonormal(d, d, basis_rng), true};
    } else {
      ds.dictionaries[u] = Dictionary::identity(d);
    }

    Rng coeff_rng = substream(cfg.seed, kCoeffs, u);
    const MatrixXd own = gaussian_matrix(k, snaps, coeff_rng);
    truth.coefficients = MatrixXd::Zero(d, snaps);
    for (int r = 0; r < k; ++r) {
      const int atom = truth.subset[r];
      truth.coefficients.row(atom) = scale * (shared_weight * latent.row(atom) + own_weight * own.row(r));
    }

    const MatrixXd clean = ds.dictionaries[u].atoms * truth.coefficients;
    Rng noise_rng = substream(cfg.seed, kNoise, u);
    MatrixXd noise = gaussian_matrix(d, snaps, noise_rng);
    const double target_ratio = std::pow(10.0, cfg.snr_db / 10.0);
    noise *= std::sqrt(clean.squaredNorm() / (target_ratio * noise.squaredNorm()));
    ds.observations[u] = clean + noise;
    truth.noise = std::move(noise);
  }
  return ds;
}

SynthConfig cluster_scenario_config(std::uint64_t seed, int snapshots, double rho, double snr_db) {
  SynthConfig cfg;
  cfg.node_count = 16;
  cfg.ambient_dim = 64;
  cfg.dims.assign(8, 10);
  cfg.dims.insert(cfg.dims.end(), 8, 40);
  cfg.labels.assign(8, 0);
  cfg.labels.insert(cfg.labels.end(), 8, 1);
  cfg.snapshots = snapshots;
  cfg.rho = rho;
  cfg.snr_db = snr_db;
  cfg.seed = seed;
  cfg.random_bases = true;
  return cfg;
}

Dataset generate_cluster_scenario(std::uint64_t seed) { return generate_dataset(cluster_scenario_config(seed)); }

}  // namespace sheaflearn
