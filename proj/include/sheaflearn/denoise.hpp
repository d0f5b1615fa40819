#pragma once

// Row-sparse coding of node observations over a known dictionary:
//
//     min_S  ||X - D S||_F^2 + alpha * sum_i ||S_{i,:}||_2
//
// solved by proximal gradient with row-wise group soft-thresholding, followed
// by extraction of the compact local basis D_u (atoms on the support) and the
// matching coefficient rows.

#include <stdexcept>
#include <vector>

#include "sheaflearn/types.hpp"

namespace sheaflearn {

struct Dictionary {
  MatrixXd atoms;  // d x K
  bool orthonormal = false;

  static Dictionary identity(int d) { return {MatrixXd::Identity(d, d), true}; }

  int ambient_dim() const { return static_cast<int>(atoms.rows()); }
  int atom_count() const { return static_cast<int>(atoms.cols()); }

  /// Throws std::invalid_argument if the orthonormal flag is set but
  /// atoms^T atoms differs from I by more than 1e-9.
  void validate() const;
};

struct DenoiseConfig {
  double alpha = 0.5;
  int max_iters = 5000;
  double rel_tol = 1e-8;
  double support_threshold = 1e-6;  // relative to the largest row norm

  void validate() const;
};

/// Thrown when every coefficient row falls below the support threshold.
class EmptySupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LocalBasis {
  std::vector<int> support;  // ascending atom indices
  MatrixXd local_basis;      // d x d_u
  MatrixXd compact_coeffs;   // d_u x N
};

struct SparseCode {
  MatrixXd coefficients;  // K x N

  // Filled from the solver's support threshold; empty when every row is zero.
  std::vector<int> support;
  MatrixXd local_basis;
  MatrixXd compact_coeffs;

  int iterations = 0;
  bool converged = false;  // false: max_iters reached, last iterate returned
  double final_rel_change = 0.0;
  double objective = 0.0;
  std::vector<double> objective_history;  // objective after each iterate, starting at S = 0

  int dim() const { return static_cast<int>(support.size()); }
};

double group_lasso_objective(const MatrixXd& x, const MatrixXd& atoms, const MatrixXd& s, double alpha);

/// Prox of t * ||.||_{2,1}: shrinks every row norm by t, zeroing short rows.
MatrixXd row_soft_threshold(const MatrixXd& s, double t);

/// Largest violation of the row-wise optimality conditions of the objective:
/// g = 2 D^T (X - D S);  g_i = alpha s_i / ||s_i|| on nonzero rows and
/// ||g_i|| <= alpha on zero rows.
double stationarity_residual(const MatrixXd& x, const MatrixXd& atoms, const MatrixXd& s, double alpha);

SparseCode block_sparse_code(const MatrixXd& x, const Dictionary& dict, const DenoiseConfig& cfg);

/// Support = rows with l2 norm > threshold * max row norm.
LocalBasis extract_local_basis(const MatrixXd& coefficients, const Dictionary& dict, double threshold);
LocalBasis extract_local_basis(const SparseCode& code, const Dictionary& dict, double threshold);

/// Denoised node: Xhat = local_basis * compact_coeffs.
struct NodeRepresentation {
  MatrixXd local_basis;
  MatrixXd compact_coeffs;

  MatrixXd signal() const { return local_basis * compact_coeffs; }
  int dim() const { return static_cast<int>(local_basis.cols()); }
};

/// Codes every node independently (concurrently up to `threads`).
/// `dicts` holds either one shared dictionary or one per node.
std::vector<SparseCode> denoise_nodes(const std::vector<MatrixXd>& observations,
                                      const std::vector<Dictionary>& dicts, const DenoiseConfig& cfg,
                                      int threads = 1);

std::vector<NodeRepresentation> representations(const std::vector<SparseCode>& codes);

}  // namespace sheaflearn
