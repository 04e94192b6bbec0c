#include "phida/ph_view.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phida {

namespace {

NeighborGraph single_node_graph() {
  NeighborGraph g;
  g.node_ids = {0};
  g.candidate_distances.resize(1);
  g.retained.resize(1);
  return g;
}

NeighborGraph induced_subgraph(const NeighborGraph& g, const std::vector<std::size_t>& keep) {
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> local(g.size(), none);
  for (std::size_t i = 0; i < keep.size(); ++i) local[keep[i]] = i;
  NeighborGraph sub;
  sub.global_threshold = g.global_threshold;
  for (std::size_t p : keep) {
    sub.node_ids.push_back(g.node_ids[p]);
    sub.candidate_distances.push_back(g.candidate_distances[p]);
    std::vector<std::size_t> row;
    for (std::size_t q : g.retained[p]) {
      if (local[q] != none) row.push_back(local[q]);
    }
    sub.retained.push_back(std::move(row));
  }
  for (const auto& [p, q] : g.edges) {
    if (local[p] != none && local[q] != none) sub.edges.emplace_back(local[p], local[q]);
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  return sub;
}

}  // namespace

std::vector<double> component_persistence(const PersistenceTree& tree, const RawComponentPartition& raw,
                                          std::span<const std::uint64_t> supports) {
  const double min_density = *std::min_element(tree.density.begin(), tree.density.end());
  std::vector<double> pi(raw.count(), 0.0);
  for (std::size_t a = 0; a < raw.count(); ++a) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i : raw.components[a]) {
      const std::size_t m = tree.mode_of[i];
      double p = tree.persistence[m];
      if (!std::isfinite(p)) p = tree.density[m] - min_density;
      const auto w = static_cast<double>(supports[i]);
      num += w * p;
      den += w;
    }
    pi[a] = den > 0.0 ? num / den : 0.0;
  }
  return pi;
}

PhView build_ph_view(std::span<const NodeId> ids, std::span<const Vector> reps,
                     std::span<const std::uint64_t> supports, std::span<const Vector> feature_weights,
                     const PhBuildOptions& options) {
  const std::size_t n = ids.size();
  if (n == 0) throw std::invalid_argument("build_ph_view: no input nodes");
  if (reps.size() != n || supports.size() != n) throw std::invalid_argument("build_ph_view: size mismatch");

  PhView view;
  view.transform = fit_transform_state(reps);
  NeighborGraph full = n == 1 ? single_node_graph() : build_mutual_graph(reps, feature_weights, view.transform);

  std::vector<std::size_t> keep;
  if (options.prune_isolated && n >= 2) {
    const auto deg = full.degrees();
    std::vector<std::size_t> isolated;
    for (std::size_t i = 0; i < n; ++i) (deg[i] > 0 ? keep : isolated).push_back(i);
    if (keep.size() < 2) {
      std::stable_sort(isolated.begin(), isolated.end(),
                       [&](std::size_t a, std::size_t b) { return supports[a] > supports[b]; });
      std::size_t next = 0;
      while (keep.size() < 2 && next < isolated.size()) keep.push_back(isolated[next++]);
      isolated.erase(isolated.begin(), isolated.begin() + static_cast<std::ptrdiff_t>(next));
      std::sort(keep.begin(), keep.end());
    }
    for (std::size_t i : isolated) view.pruned_ids.push_back(ids[i]);
  } else {
    keep.resize(n);
    std::iota(keep.begin(), keep.end(), std::size_t{0});
  }
  view.graph = keep.size() == n ? std::move(full) : induced_subgraph(full, keep);

  const std::size_t m = keep.size();
  std::vector<std::uint64_t> kept_support(m);
  Points kept_reps(m);
  std::vector<double> density(m);
  for (std::size_t i = 0; i < m; ++i) {
    view.input_ids.push_back(ids[keep[i]]);
    kept_support[i] = supports[keep[i]];
    kept_reps[i] = reps[keep[i]];
    density[i] = std::log(static_cast<double>(kept_support[i]));
  }
  view.graph_component_count = count_components(m, view.graph.edges);

  std::vector<double> pi;
  if (options.use_ph) {
    view.tree = run_persistence(view.graph, density);
    view.raw = extract_components(*view.tree, largest_gap_threshold(view.tree->finite_levels));
    view.mapping_partition = view.raw;
    pi = component_persistence(*view.tree, view.raw, kept_support);
  } else {
    view.raw = connected_component_partition(view.graph);
    view.mapping_partition = singleton_partition(m);
    pi.assign(m, 0.0);
  }
  view.raw_component_count = view.raw.count();
  for (std::size_t i = 0; i < m; ++i) view.component_of[view.input_ids[i]] = view.raw.component_of[i];

  Points z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = view.transform.apply(kept_reps[i]);
  const std::size_t k = view.mapping_partition.count();
  const std::size_t d = view.transform.dim();
  view.summaries.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    auto& s = view.summaries[a];
    s.members = view.mapping_partition.components[a];
    s.centroid.assign(d, 0.0);
    for (std::size_t i : s.members) {
      const auto w = static_cast<double>(kept_support[i]);
      s.support += w;
      for (std::size_t j = 0; j < d; ++j) s.centroid[j] += w * z[i][j];
    }
    for (double& c : s.centroid) c /= s.support;
    s.persistence = pi[a];
  }
  const auto masses = ph_stable_masses(view.summaries, &view.mass_fallback);
  for (std::size_t a = 0; a < k; ++a) view.summaries[a].merge_weight = masses[a];
  view.c_ent = entropy_effective_count(masses);
  const std::size_t c_min = min_retained_count(view.c_ent, k);

  NeighborGraph component_graph;
  if (k >= 2) {
    Points centroids;
    for (const auto& s : view.summaries) centroids.push_back(s.centroid);
    component_graph = build_mutual_graph(centroids, {}, TransformState::identity(d));
  }
  view.hierarchy = agglomerate(view.summaries, component_graph, c_min);
  view.mapping = expand_mapping(view.hierarchy, view.mapping_partition);
  view.assignment = build_assignment_view(view.input_ids, kept_reps, kept_support, view.mapping, view.transform);
  return view;
}

}  // namespace phida
