#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "phida/kernels.hpp"
#include "phida/transform.hpp"
#include "phida/types.hpp"

namespace phida {

using Edge = std::pair<std::size_t, std::size_t>;

// Automatically pruned mutual kNN graph. Positions 0..n-1 are local; the
// caller's indices for them live in node_ids.
struct NeighborGraph {
  std::vector<std::size_t> node_ids;
  // Unordered edges stored once as (p, q) with p < q, sorted.
  std::vector<Edge> edges;
  // Directed candidate distances D_p kept for diagnostics.
  std::vector<std::vector<double>> candidate_distances;
  // Retained directed neighbours N_p after pruning.
  std::vector<std::vector<std::size_t>> retained;
  double global_threshold = 0.0;

  std::size_t size() const { return node_ids.size(); }
  bool has_edge(std::size_t p, std::size_t q) const;
  std::vector<std::vector<std::size_t>> adjacency() const;
  std::vector<std::size_t> degrees() const;
};

// max(1, min(ceil(sqrt(ln n)), n - 1)). Throws for n <= 1.
std::size_t neighborhood_size(std::size_t n);

// Row-major n x n directed candidate distances with +inf on the diagonal.
// `weights` is either empty or holds one nonnegative vector per point; when
// present a nonnegative local-metric penalty scaled by gamma is added.
std::vector<double> candidate_distances(std::span<const Vector> transformed,
                                        std::span<const Vector> weights, double gamma,
                                        kernels::Exec exec = kernels::default_exec());

// Candidate selection, Hazen median + 1.5 IQR pruning (row-wise and global)
// and mutual retention over a precomputed candidate matrix.
NeighborGraph mutual_graph_from_candidates(std::span<const double> delta, std::size_t n);

// Transforms `points` with `transform`, then builds the pruned mutual graph.
// Throws std::invalid_argument("degenerate graph input") for fewer than two
// points.
NeighborGraph build_mutual_graph(std::span<const Vector> points, std::span<const Vector> weights,
                                 const TransformState& transform,
                                 kernels::Exec exec = kernels::default_exec());

// Component label per node, numbered 0.. in order of first appearance.
std::vector<std::size_t> connected_components(std::size_t n, std::span<const Edge> edges);
std::size_t count_components(std::size_t n, std::span<const Edge> edges);

}  // namespace phida
