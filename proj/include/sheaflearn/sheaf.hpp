#pragma once

// Cellular sheaves on graphs: data model plus dense assembly of the
// coboundary, the sheaf incidence matrix and the sheaf Laplacian.
//
// Every node and edge stalk is R^d (d = ambient_dim). An edge e = (tail, head)
// carries two restriction maps F_{tail<e}, F_{head<e} : R^d -> R^d, and the
// coboundary acts as
//
//     (delta x)_e = F_{tail<e} x_tail - F_{head<e} x_head.
//
// All functions are templated on the scalar type and are pure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sheaflearn/types.hpp"

namespace sheaflearn {

/// Thrown when shapes, node ids or the edge set violate the sheaf invariants.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
constexpr Scalar orthonormality_tolerance() {
  return std::max(Scalar(1e-9), Scalar(100) * std::numeric_limits<Scalar>::epsilon());
}

struct StalkSpec {
  int node_count = 0;
  int ambient_dim = 0;
  std::vector<int> per_node_dim;

  StalkSpec() = default;
  StalkSpec(int nodes, int ambient) : node_count(nodes), ambient_dim(ambient), per_node_dim(nodes, ambient) {}
  StalkSpec(int nodes, int ambient, std::vector<int> dims)
      : node_count(nodes), ambient_dim(ambient), per_node_dim(std::move(dims)) {}

  void validate() const {
    if (node_count <= 0) throw StructuralError("StalkSpec: node_count must be positive");
    if (ambient_dim <= 0) throw StructuralError("StalkSpec: ambient_dim must be positive");
    if (static_cast<int>(per_node_dim.size()) != node_count)
      throw StructuralError("StalkSpec: per_node_dim length != node_count");
    for (int du : per_node_dim)
      if (du <= 0 || du > ambient_dim)
        throw StructuralError("StalkSpec: per_node_dim entries must lie in [1, ambient_dim]");
  }
};

template <typename Scalar>
struct RestrictionMap {
  Matrix<Scalar> matrix;
  NodeId source_node = -1;
  int edge_id = -1;
};

/// Largest entry of |F^T F - I|.
template <typename Derived>
typename Derived::Scalar orthonormality_defect(const Eigen::MatrixBase<Derived>& f) {
  using S = typename Derived::Scalar;
  if (f.size() == 0) return S(0);
  Matrix<S> gram = f.transpose() * f;
  gram.diagonal().array() -= S(1);
  return gram.cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct SheafEdge {
  NodeId tail = -1;
  NodeId head = -1;
  RestrictionMap<Scalar> tail_map;
  RestrictionMap<Scalar> head_map;

  const RestrictionMap<Scalar>& map_for(NodeId node) const {
    if (node == tail) return tail_map;
    if (node == head) return head_map;
    throw StructuralError("SheafEdge: node " + std::to_string(node) + " is not incident");
  }
};

template <typename Scalar = double>
class Sheaf {
 public:
  using MatrixType = Matrix<Scalar>;

  Sheaf() = default;
  explicit Sheaf(StalkSpec stalks) : stalks_(std::move(stalks)) { stalks_.validate(); }

  /// Adds the edge {u, v} with maps F_{u<e}, F_{v<e}, oriented so that the
  /// smaller node id is the tail. Returns the edge id.
  int add_edge(NodeId u, NodeId v, MatrixType map_u, MatrixType map_v) {
    if (u > v) {
      std::swap(u, v);
      std::swap(map_u, map_v);
    }
    return add_oriented_edge(u, v, std::move(map_u), std::move(map_v));
  }

  /// Adds an edge keeping the given orientation.
  int add_oriented_edge(NodeId tail, NodeId head, MatrixType tail_map, MatrixType head_map) {
    const int n = stalks_.node_count;
    const int d = stalks_.ambient_dim;
    if (tail < 0 || head < 0 || tail >= n || head >= n)
      throw StructuralError("Sheaf: edge endpoint out of range");
    if (tail == head) throw StructuralError("Sheaf: self-loops are not allowed");
    for (const MatrixType* f : {&tail_map, &head_map}) {
      if (f->rows() != d || f->cols() != d)
        throw StructuralError("Sheaf: restriction map must be ambient_dim x ambient_dim");
      if (orthonormality_defect(*f) > orthonormality_tolerance<Scalar>())
        throw StructuralError("Sheaf: restriction map is not orthonormal");
    }
    if (!pairs_.insert(std::minmax(tail, head)).second)
      throw StructuralError("Sheaf: duplicate edge {" + std::to_string(tail) + ", " +
                            std::to_string(head) + "}");
    const int id = static_cast<int>(edges_.size());
    edges_.push_back(SheafEdge<Scalar>{tail, head,
                                       RestrictionMap<Scalar>{std::move(tail_map), tail, id},
                                       RestrictionMap<Scalar>{std::move(head_map), head, id}});
    return id;
  }

  const StalkSpec& stalks() const { return stalks_; }
  const std::vector<SheafEdge<Scalar>>& edges() const { return edges_; }
  int node_count() const { return stalks_.node_count; }
  int ambient_dim() const { return stalks_.ambient_dim; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// True when every edge follows the tail = min(u, v) convention.
  bool canonically_oriented() const {
    return std::all_of(edges_.begin(), edges_.end(), [](const auto& e) { return e.tail < e.head; });
  }

 private:
  StalkSpec stalks_;
  std::vector<SheafEdge<Scalar>> edges_;
  std::set<std::pair<NodeId, NodeId>> pairs_;
};

/// The sheaf with every map equal to the identity on the given edge list.
template <typename Scalar = double>
Sheaf<Scalar> constant_sheaf(int node_count, int ambient_dim,
                             const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Sheaf<Scalar> sheaf(StalkSpec(node_count, ambient_dim));
  const Matrix<Scalar> id = Matrix<Scalar>::Identity(ambient_dim, ambient_dim);
  for (const auto& [u, v] : edges) sheaf.add_edge(u, v, id, id);
  return sheaf;
}

/// A 0-cochain over N snapshots: one ambient_dim x N block per node.
template <typename Scalar = double>
struct Cochain0 {
  std::vector<Matrix<Scalar>> blocks;

  int node_count() const { return static_cast<int>(blocks.size()); }
  Eigen::Index snapshots() const { return blocks.empty() ? 0 : blocks.front().cols(); }

  Matrix<Scalar> stacked() const {
    if (blocks.empty()) return {};
    const Eigen::Index d = blocks.front().rows();
    Matrix<Scalar> out(d * node_count(), snapshots());
    for (int u = 0; u < node_count(); ++u) out.middleRows(d * u, d) = blocks[u];
    return out;
  }

  template <typename Derived>
  static Cochain0 from_stacked(const Eigen::MatrixBase<Derived>& stacked, int node_count) {
    if (node_count <= 0 || stacked.rows() % node_count != 0)
      throw StructuralError("Cochain0: stacked rows not divisible by node_count");
    const Eigen::Index d = stacked.rows() / node_count;
    Cochain0 out;
    out.blocks.reserve(node_count);
    for (int u = 0; u < node_count; ++u) out.blocks.emplace_back(stacked.middleRows(d * u, d));
    return out;
  }
};

template <typename Scalar>
void check_cochain(const Sheaf<Scalar>& sheaf, const Cochain0<Scalar>& x) {
  if (x.node_count() != sheaf.node_count())
    throw StructuralError("Cochain0: block count != node_count");
  for (const auto& b : x.blocks) {
    if (b.rows() != sheaf.ambient_dim()) throw StructuralError("Cochain0: block rows != ambient_dim");
    if (b.cols() != x.snapshots()) throw StructuralError("Cochain0: blocks disagree on snapshot count");
  }
}

/// Sheaf incidence B = delta^T (V*d x E*d): block (u, e) is -F_{u<e}^T at
/// the tail, +F_{u<e}^T at the head and zero elsewhere, so that L = B B^T and
/// B^T x stacks the (negated) coboundary blocks.
template <typename Scalar>
Matrix<Scalar> assemble_incidence(const Sheaf<Scalar>& sheaf) {
  const Eigen::Index d = sheaf.ambient_dim();
  Matrix<Scalar> b = Matrix<Scalar>::Zero(d * sheaf.node_count(), d * sheaf.edge_count());
  for (int e = 0; e < sheaf.edge_count(); ++e) {
    const auto& edge = sheaf.edges()[e];
    b.block(d * edge.tail, d * e, d, d) = -edge.tail_map.matrix.transpose();
    b.block(d * edge.head, d * e, d, d) = edge.head_map.matrix.transpose();
  }
  return b;
}

/// Sheaf Laplacian from the block formula: diagonal blocks sum F^T F over
/// incident edges, off-diagonal block (u, v) = -F_{u<e}^T F_{v<e}.
template <typename Scalar>
Matrix<Scalar> laplacian_blocks(const Sheaf<Scalar>& sheaf) {
  const Eigen::Index d = sheaf.ambient_dim();
  Matrix<Scalar> l = Matrix<Scalar>::Zero(d * sheaf.node_count(), d * sheaf.node_count());
  for (const auto& edge : sheaf.edges()) {
    const auto& ft = edge.tail_map.matrix;
    const auto& fh = edge.head_map.matrix;
    l.block(d * edge.tail, d * edge.tail, d, d).noalias() += ft.transpose() * ft;
    l.block(d * edge.head, d * edge.head, d, d).noalias() += fh.transpose() * fh;
    l.block(d * edge.tail, d * edge.head, d, d).noalias() -= ft.transpose() * fh;
    l.block(d * edge.head, d * edge.tail, d, d).noalias() -= fh.transpose() * ft;
  }
  return l;
}

template <typename Scalar = double>
struct SheafLaplacian {
  Matrix<Scalar> matrix;
  Matrix<Scalar> incidence;
};

template <typename Scalar>
SheafLaplacian<Scalar> assemble_laplacian(const Sheaf<Scalar>& sheaf) {
  return {laplacian_blocks(sheaf), assemble_incidence(sheaf)};
}

/// Per-edge coboundary blocks F_{tail<e} x_tail - F_{head<e} x_head.
template <typename Scalar>
std::vector<Matrix<Scalar>> coboundary_apply(const Sheaf<Scalar>& sheaf, const Cochain0<Scalar>& x) {
  check_cochain(sheaf, x);
  std::vector<Matrix<Scalar>> out;
  out.reserve(sheaf.edge_count());
  for (const auto& edge : sheaf.edges()) {
    out.emplace_back(edge.tail_map.matrix * x.blocks[edge.tail] - edge.head_map.matrix * x.blocks[edge.head]);
  }
  return out;
}

/// tr(X^T L X) for a stacked cochain X. Clamped at zero against round-off.
template <typename DerivedL, typename DerivedX>
typename DerivedL::Scalar total_variation(const Eigen::MatrixBase<DerivedL>& laplacian,
                                          const Eigen::MatrixBase<DerivedX>& x) {
  using S = typename DerivedL::Scalar;
  if (laplacian.rows() != laplacian.cols() || laplacian.cols() != x.rows())
    throw StructuralError("total_variation: dimension mismatch");
  const S tv = x.cwiseProduct(laplacian * x).sum();
  return std::max(tv, S(0));
}

template <typename Scalar>
Scalar total_variation(const SheafLaplacian<Scalar>& laplacian, const Cochain0<Scalar>& x) {
  return total_variation(laplacian.matrix, x.stacked());
}

/// tr(X^T L X) evaluated as <L, X X^T>_F, for repeated evaluation against a
/// fixed signal whose Gram matrix has been formed once.
template <typename DerivedL, typename DerivedG>
typename DerivedL::Scalar total_variation_from_gram(const Eigen::MatrixBase<DerivedL>& laplacian,
                                                    const Eigen::MatrixBase<DerivedG>& gram) {
  using S = typename DerivedL::Scalar;
  if (laplacian.rows() != gram.rows() || laplacian.cols() != gram.cols())
    throw StructuralError("total_variation_from_gram: dimension mismatch");
  return std::max(S(laplacian.cwiseProduct(gram).sum()), S(0));
}

/// dim H^0 = dim ker L: number of eigenvalues below tol * lambda_max. A zero
/// Laplacian has full kernel.
template <typename Derived>
int global_section_dim(const Eigen::MatrixBase<Derived>& laplacian, typename Derived::Scalar tol = 1e-8) {
  using S = typename Derived::Scalar;
  if (laplacian.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix<S>> eig(laplacian.eval(), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const S lambda_max = ev.cwiseAbs().maxCoeff();
  if (lambda_max <= S(0)) return static_cast<int>(ev.size());
  return static_cast<int>((ev.array() < tol * lambda_max).count());
}

template <typename Scalar>
int global_section_dim(const SheafLaplacian<Scalar>& laplacian, Scalar tol = Scalar(1e-8)) {
  return global_section_dim(laplacian.matrix, tol);
}

}  // namespace sheaflearn
