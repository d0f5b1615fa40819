#include "sheaflearn/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sheaflearn/parallel.hpp"

namespace sheaflearn {

void Dictionary::validate() const {
  if (atoms.rows() == 0 || atoms.cols() == 0) throw std::invalid_argument("Dictionary: empty atom matrix");
  if (orthonormal) {
    MatrixXd gram = atoms.transpose() * atoms;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("Dictionary: flagged orthonormal but atoms^T atoms != I");
  }
}

void DenoiseConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("DenoiseConfig: alpha must be nonnegative");
  if (max_iters <= 0) throw std::invalid_argument("DenoiseConfig: max_iters must be positive");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("DenoiseConfig: rel_tol must be positive");
  if (!(support_threshold >= 0.0)) throw std::invalid_argument("DenoiseConfig: support_threshold must be nonnegative");
}

double group_lasso_objective(const MatrixXd& x, const MatrixXd& atoms, const MatrixXd& s, double alpha) {
  return (x - atoms * s).squaredNorm() + alpha * s.rowwise().norm().sum();
}

MatrixXd row_soft_threshold(const MatrixXd& s, double t) {
  MatrixXd out = s;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n <= t)
      out.row(i).setZero();
    else
      out.row(i) *= (n - t) / n;
  }
  return out;
}

double stationarity_residual(const MatrixXd& x, const MatrixXd& atoms, const MatrixXd& s, double alpha) {
  const MatrixXd g = 2.0 * atoms.transpose() * (x - atoms * s);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double n = s.row(i).norm();
    const double violation =
        n > 0.0 ? (g.row(i) - alpha * s.row(i) / n).norm() : std::max(0.0, g.row(i).norm() - alpha);
    worst = std::max(worst, violation);
  }
  return worst;
}

namespace {

double spectral_norm_squared(const MatrixXd& atoms) {
  const MatrixXd gram = atoms.transpose() * atoms;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

SparseCode block_sparse_code(const MatrixXd& x, const Dictionary& dict, const DenoiseConfig& cfg) {
  cfg.validate();
  dict.validate();
  if (x.rows() != dict.ambient_dim())
    throw std::invalid_argument("block_sparse_code: signal has " + std::to_string(x.rows()) +
                                " rows, dictionary has " + std::to_string(dict.ambient_dim()));
  const MatrixXd& d = dict.atoms;
  const double lipschitz = dict.orthonormal ? 1.0 : spectral_norm_squared(d);
  if (!(lipschitz > 0.0)) throw std::invalid_argument("block_sparse_code: dictionary has zero norm");
  const double step = 1.0 / lipschitz;
  const double shrink = cfg.alpha * step / 2.0;

  const MatrixXd gram = d.transpose() * d;
  const MatrixXd correlation = d.transpose() * x;

  SparseCode code;
  code.coefficients = MatrixXd::Zero(d.cols(), x.cols());
  double objective = group_lasso_objective(x, d, code.coefficients, cfg.alpha);
  code.objective_history.push_back(objective);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const MatrixXd gradient_step = code.coefficients - step * (gram * code.coefficients - correlation);
    MatrixXd next = row_soft_threshold(gradient_step, shrink);
    const double next_objective = group_lasso_objective(x, d, next, cfg.alpha);
    const double change = std::abs(objective - next_objective);
    const double scale = std::max(std::abs(objective), std::numeric_limits<double>::min());
    code.coefficients = std::move(next);
    code.objective_history.push_back(next_objective);
    code.iterations = it;
    code.final_rel_change = change / scale;
    objective = next_objective;
    if (change == 0.0 || code.final_rel_change < cfg.rel_tol) {
      code.converged = true;
      break;
    }
  }
  code.objective = objective;

  if (code.coefficients.rowwise().norm().maxCoeff() > 0.0) {
    LocalBasis basis = extract_local_basis(code.coefficients, dict, cfg.support_threshold);
    code.support = std::move(basis.support);
    code.local_basis = std::move(basis.local_basis);
    code.compact_coeffs = std::move(basis.compact_coeffs);
  }
  return code;
}

LocalBasis extract_local_basis(const MatrixXd& coefficients, const Dictionary& dict, double threshold) {
  if (coefficients.rows() != dict.atom_count())
    throw std::invalid_argument("extract_local_basis: coefficient rows != atom count");
  if (threshold < 0.0) throw std::invalid_argument("extract_local_basis: negative threshold");
  const VectorXd norms = coefficients.rowwise().norm();
  const double max_norm = norms.size() ? norms.maxCoeff() : 0.0;
  LocalBasis out;
  if (max_norm > 0.0) {
    for (Eigen::Index i = 0; i < norms.size(); ++i)
      if (norms(i) > threshold * max_norm) out.support.push_back(static_cast<int>(i));
  }
  if (out.support.empty())
    throw EmptySupportError("extract_local_basis: every coefficient row is below threshold; lower alpha or the threshold");
  out.local_basis = dict.atoms(Eigen::all, out.support);
  out.compact_coeffs = coefficients(out.support, Eigen::all);
  return out;
}

LocalBasis extract_local_basis(const SparseCode& code, const Dictionary& dict, double threshold) {
  return extract_local_basis(code.coefficients, dict, threshold);
}

std::vector<SparseCode> denoise_nodes(const std::vector<MatrixXd>& observations,
                                      const std::vector<Dictionary>& dicts, const DenoiseConfig& cfg, int threads) {
  if (dicts.size() != 1 && dicts.size() != observations.size())
    throw std::invalid_argument("denoise_nodes: need one shared dictionary or one per node");
  std::vector<SparseCode> codes(observations.size());
  parallel_for(observations.size(), threads, [&](std::size_t u) {
    codes[u] = block_sparse_code(observations[u], dicts.size() == 1 ? dicts[0] : dicts[u], cfg);
  });
  return codes;
}

std::vector<NodeRepresentation> representations(const std::vector<SparseCode>& codes) {
  std::vector<NodeRepresentation> out;
  out.reserve(codes.size());
  for (std::size_t u = 0; u < codes.size(); ++u) {
    if (codes[u].support.empty())
      throw EmptySupportError("node " + std::to_string(u) + " was fully thresholded; lower alpha");
    out.push_back({codes[u].local_basis, codes[u].compact_coeffs});
  }
  return out;
}

}  // namespace sheaflearn
