#include "sheaflearn/infer.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "sheaflearn/parallel.hpp"
#include "sheaflearn/union_find.hpp"

namespace sheaflearn {

std::vector<Candidate> enumerate_candidates_signals(const std::vector<MatrixXd>& signals, DistanceMode mode,
                                                    int threads) {
  const int n = static_cast<int>(signals.size());
  if (n < 2) throw std::invalid_argument("enumerate_candidates: need at least 2 nodes");
  for (const auto& x : signals)
    if (x.rows() != signals[0].rows() || x.cols() != signals[0].cols())
      throw std::invalid_argument("enumerate_candidates: node signals differ in shape");

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);

  const int d = static_cast<int>(signals[0].rows());
  std::vector<Candidate> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [u, v] = pairs[k];
    Candidate c = mode == DistanceMode::aligned ? procrustes_align_signals(signals[u], signals[v])
                                                : baseline_candidate(signals[u], signals[v]);
    c.u = u;
    c.v = v;
    c.dim_u = d;
    c.dim_v = d;
    c.map_u.source_node = u;
    c.map_v.source_node = v;
    out[k] = std::move(c);
  });
  return out;
}

std::vector<Candidate> enumerate_candidates(const std::vector<NodeRepresentation>& nodes, DistanceMode mode,
                                            int threads) {
  std::vector<MatrixXd> signals;
  signals.reserve(nodes.size());
  for (const auto& node : nodes) signals.push_back(node.signal());
  auto out = enumerate_candidates_signals(signals, mode, threads);
  for (auto& c : out) {
    c.dim_u = nodes[c.u].dim();
    c.dim_v = nodes[c.v].dim();
  }
  return out;
}

std::vector<RankedEdge> rank_candidates(const std::vector<Candidate>& candidates) {
  std::vector<RankedEdge> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) ranked.push_back({std::min(c.u, c.v), std::max(c.u, c.v), c.cost});
  std::sort(ranked.begin(), ranked.end(), [](const RankedEdge& a, const RankedEdge& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  return ranked;
}

int candidate_node_count(const std::vector<Candidate>& candidates) {
  int n = 1;
  for (const auto& c : candidates) n = std::max({n, c.u + 1, c.v + 1});
  return n;
}

int min_edges_for_connectivity(const std::vector<RankedEdge>& ranked, int node_count) {
  if (node_count < 1) throw std::invalid_argument("min_edges_for_connectivity: need at least one node");
  DisjointSets sets(node_count);
  if (sets.components() == 1) return 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    sets.merge(ranked[k].u, ranked[k].v);
    if (sets.components() == 1) return static_cast<int>(k + 1);
  }
  throw std::invalid_argument("min_edges_for_connectivity: candidate set does not connect the graph");
}

int min_edges_for_connectivity(const std::vector<Candidate>& candidates) {
  return min_edges_for_connectivity(rank_candidates(candidates), candidate_node_count(candidates));
}

EdgeSelection select_topology(const std::vector<Candidate>& candidates, int e0) {
  if (e0 < 0 || e0 > static_cast<int>(candidates.size()))
    throw std::out_of_range("select_topology: E0 = " + std::to_string(e0) + " outside [0, " +
                            std::to_string(candidates.size()) + "]");
  EdgeSelection sel;
  sel.e0 = e0;
  sel.ranked = rank_candidates(candidates);
  sel.selected.reserve(e0);
  for (int k = 0; k < e0; ++k) sel.selected.emplace_back(sel.ranked[k].u, sel.ranked[k].v);
  const int n = candidate_node_count(candidates);
  try {
    sel.connected_at = min_edges_for_connectivity(sel.ranked, n);
  } catch (const std::invalid_argument&) {
    sel.connected_at = -1;  // incomplete candidate list
  }
  return sel;
}

Sheaf<double> build_sheaf(const EdgeSelection& selection, const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("build_sheaf: no candidates");
  const int n = candidate_node_count(candidates);
  const int d = static_cast<int>(candidates.front().map_u.matrix.rows());
  std::vector<int> dims(n, d);
  std::map<std::pair<NodeId, NodeId>, const Candidate*> lookup;
  for (const auto& c : candidates) {
    lookup[std::minmax(c.u, c.v)] = &c;
    if (c.dim_u > 0) dims[c.u] = c.dim_u;
    if (c.dim_v > 0) dims[c.v] = c.dim_v;
  }
  Sheaf<double> sheaf(StalkSpec(n, d, dims));
  for (const auto& [a, b] : selection.selected) {
    auto it = lookup.find(std::minmax(a, b));
    if (it == lookup.end())
      throw std::invalid_argument("build_sheaf: selected edge {" + std::to_string(a) + ", " + std::to_string(b) +
                                  "} is not a candidate");
    const Candidate& c = *it->second;
    sheaf.add_edge(c.u, c.v, c.map_u.matrix, c.map_v.matrix);
  }
  return sheaf;
}

}  // namespace sheaflearn
