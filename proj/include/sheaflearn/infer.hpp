#pragma once

// Topology selection: score every node pair with its local alignment cost,
// keep the E0 cheapest pairs, and assemble the learned sheaf from the maps of
// the winning pairs. Because the total variation is a sum of independent
// per-edge costs, the sorted prefix is the exact minimizer under |E| = E0.

#include <utility>
#include <vector>

#include "sheaflearn/align.hpp"
#include "sheaflearn/denoise.hpp"
#include "sheaflearn/sheaf.hpp"

namespace sheaflearn {

using Candidate = EdgeCandidate<double>;

struct RankedEdge {
  NodeId u = -1;
  NodeId v = -1;
  double cost = 0.0;
};

struct EdgeSelection {
  std::vector<std::pair<NodeId, NodeId>> selected;  // cost-ascending prefix
  int e0 = 0;
  std::vector<RankedEdge> ranked;  // all candidates, cost ascending, ties by (u, v)
  int connected_at = 0;            // shortest prefix of `ranked` that connects the graph
};

/// All V(V-1)/2 pairs u < v in lexicographic order. Aligned mode solves the
/// Procrustes problem per pair; baseline mode uses ||Xu - Xv||_F^2.
std::vector<Candidate> enumerate_candidates(const std::vector<NodeRepresentation>& nodes, DistanceMode mode,
                                            int threads = 1);

/// Same, from ambient signals directly (d x N each).
std::vector<Candidate> enumerate_candidates_signals(const std::vector<MatrixXd>& signals, DistanceMode mode,
                                                    int threads = 1);

std::vector<RankedEdge> rank_candidates(const std::vector<Candidate>& candidates);

/// Node count implied by a candidate list: 1 + the largest node id.
int candidate_node_count(const std::vector<Candidate>& candidates);

EdgeSelection select_topology(const std::vector<Candidate>& candidates, int e0);

/// Length of the shortest cost-ascending prefix whose edges connect all
/// `node_count` nodes. Throws std::invalid_argument if the full list does not.
int min_edges_for_connectivity(const std::vector<RankedEdge>& ranked, int node_count);
int min_edges_for_connectivity(const std::vector<Candidate>& candidates);

/// Learned sheaf: the winning candidates' maps with tail = min(u, v).
Sheaf<double> build_sheaf(const EdgeSelection& selection, const std::vector<Candidate>& candidates);

}  // namespace sheaflearn
