#pragma once

// Closed-form orthonormal alignment of two node signals.
//
// For denoised node signals Xu = Du Su and Xv = Dv Sv (both d x N) the local
// problem   min_{F^T F = I} || F Xu - Xv ||_F^2   is solved by the full SVD
// A = Xu Xv^T = U diag(sigma) V^T and F = V U^T. The minimum equals
//
//     ||Xu||_F^2 + ||Xv||_F^2 - 2 * sum_i sigma_i.
//
// The second map of the edge is fixed to the identity.

#include <stdexcept>
#include <vector>

#include "sheaflearn/sheaf.hpp"

namespace sheaflearn {

enum class DistanceMode { aligned, baseline };

inline const char* to_string(DistanceMode mode) {
  return mode == DistanceMode::aligned ? "aligned" : "baseline";
}

template <typename Scalar = double>
struct CrossCovariance {
  Matrix<Scalar> matrix;  // Su Sv^T / N
  Eigen::Index snapshots = 0;
};

template <typename Scalar = double>
struct EdgeCandidate {
  NodeId u = -1;
  NodeId v = -1;
  RestrictionMap<Scalar> map_u;
  RestrictionMap<Scalar> map_v;
  Scalar cost = 0;
  Vector<Scalar> singular_values;  // of Xu Xv^T (unnormalized), descending
  int rank = 0;
  int dim_u = 0;
  int dim_v = 0;
  DistanceMode mode = DistanceMode::aligned;
  bool degenerate = false;  // zero cross term: every orthogonal map is optimal
};

template <typename DerivedU, typename DerivedV>
CrossCovariance<typename DerivedU::Scalar> cross_covariance(const Eigen::MatrixBase<DerivedU>& su,
                                                            const Eigen::MatrixBase<DerivedV>& sv) {
  if (su.cols() != sv.cols())
    throw std::invalid_argument("cross_covariance: snapshot counts differ");
  if (su.cols() == 0) throw std::invalid_argument("cross_covariance: no snapshots");
  using S = typename DerivedU::Scalar;
  return {(su * sv.transpose()) / S(su.cols()), su.cols()};
}

template <typename Scalar>
int numerical_rank(const Vector<Scalar>& descending_sigma) {
  if (descending_sigma.size() == 0 || descending_sigma(0) <= Scalar(0)) return 0;
  return static_cast<int>((descending_sigma.array() > Scalar(1e-10) * descending_sigma(0)).count());
}

/// Procrustes alignment on ambient signals Xu, Xv (d x N each).
template <typename DerivedU, typename DerivedV>
EdgeCandidate<typename DerivedU::Scalar> procrustes_align_signals(const Eigen::MatrixBase<DerivedU>& xu,
                                                                  const Eigen::MatrixBase<DerivedV>& xv) {
  using S = typename DerivedU::Scalar;
  if (xu.rows() != xv.rows() || xu.cols() != xv.cols())
    throw std::invalid_argument("procrustes_align: signal shapes differ");
  const Eigen::Index d = xu.rows();

  const Matrix<S> cross = xu * xv.transpose();
  EdgeCandidate<S> out;
  out.mode = DistanceMode::aligned;
  out.map_v.matrix = Matrix<S>::Identity(d, d);

  Eigen::JacobiSVD<Matrix<S>> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.rank = numerical_rank<S>(out.singular_values);
  if (out.rank == 0) {
    out.degenerate = true;
    out.map_u.matrix = Matrix<S>::Identity(d, d);
  } else {
    out.map_u.matrix = svd.matrixV() * svd.matrixU().transpose();
  }
  const S cost = xu.squaredNorm() + xv.squaredNorm() - S(2) * out.singular_values.sum();
  out.cost = std::max(cost, S(0));
  return out;
}

/// Procrustes alignment from local bases and compact coefficients.
template <typename DU, typename SU, typename DV, typename SV>
EdgeCandidate<typename DU::Scalar> procrustes_align(const Eigen::MatrixBase<DU>& du, const Eigen::MatrixBase<SU>& su,
                                                    const Eigen::MatrixBase<DV>& dv, const Eigen::MatrixBase<SV>& sv) {
  if (du.rows() != dv.rows()) throw std::invalid_argument("procrustes_align: ambient dims differ");
  if (su.cols() != sv.cols()) throw std::invalid_argument("procrustes_align: snapshot counts differ");
  if (du.cols() != su.rows() || dv.cols() != sv.rows())
    throw std::invalid_argument("procrustes_align: basis/coefficient shapes disagree");
  auto out = procrustes_align_signals((du * su).eval(), (dv * sv).eval());
  out.dim_u = static_cast<int>(du.cols());
  out.dim_v = static_cast<int>(dv.cols());
  return out;
}

/// Minimum of ||F Xu - Xv||^2 over orthogonal F, without forming F.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar aligned_distance_signals(const Eigen::MatrixBase<DerivedU>& xu,
                                                   const Eigen::MatrixBase<DerivedV>& xv) {
  using S = typename DerivedU::Scalar;
  if (xu.rows() != xv.rows() || xu.cols() != xv.cols())
    throw std::invalid_argument("aligned_distance: signal shapes differ");
  const Matrix<S> cross = xu * xv.transpose();
  const S nuclear = Eigen::JacobiSVD<Matrix<S>>(cross).singularValues().sum();
  return std::max(S(xu.squaredNorm() + xv.squaredNorm() - S(2) * nuclear), S(0));
}

template <typename DU, typename SU, typename DV, typename SV>
typename DU::Scalar aligned_distance(const Eigen::MatrixBase<DU>& du, const Eigen::MatrixBase<SU>& su,
                                     const Eigen::MatrixBase<DV>& dv, const Eigen::MatrixBase<SV>& sv) {
  if (du.rows() != dv.rows() || su.cols() != sv.cols() || du.cols() != su.rows() || dv.cols() != sv.rows())
    throw std::invalid_argument("aligned_distance: shape mismatch");
  return aligned_distance_signals((du * su).eval(), (dv * sv).eval());
}

/// The no-alignment distance ||Xu - Xv||_F^2, as an edge candidate with
/// identity maps on both sides.
template <typename DerivedU, typename DerivedV>
EdgeCandidate<typename DerivedU::Scalar> baseline_candidate(const Eigen::MatrixBase<DerivedU>& xu,
                                                            const Eigen::MatrixBase<DerivedV>& xv) {
  using S = typename DerivedU::Scalar;
  if (xu.rows() != xv.rows() || xu.cols() != xv.cols())
    throw std::invalid_argument("baseline_candidate: signal shapes differ");
  const Eigen::Index d = xu.rows();
  EdgeCandidate<S> out;
  out.mode = DistanceMode::baseline;
  out.map_u.matrix = Matrix<S>::Identity(d, d);
  out.map_v.matrix = Matrix<S>::Identity(d, d);
  out.cost = (xu - xv).squaredNorm();
  return out;
}

}  // namespace sheaflearn
