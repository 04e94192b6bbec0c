#include "phida/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phida {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

RawComponentPartition partition_from_labels(const std::vector<std::size_t>& label_of_node,
                                            double epsilon) {
  RawComponentPartition part;
  part.epsilon = epsilon;
  const std::size_t n = label_of_node.size();
  part.component_of.assign(n, 0);
  std::vector<std::size_t> id_of_label(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lab = label_of_node[i];
    if (id_of_label[lab] == n) {
      id_of_label[lab] = part.components.size();
      part.components.emplace_back();
      part.label_mode.push_back(lab);
    }
    part.component_of[i] = id_of_label[lab];
    part.components[id_of_label[lab]].push_back(i);
  }
  return part;
}
}  // namespace

PersistenceTree run_persistence(const NeighborGraph& graph, std::span<const double> densities) {
  const std::size_t n = graph.size();
  if (n == 0) throw std::invalid_argument("run_persistence: empty graph");
  if (densities.size() != n) throw std::invalid_argument("run_persistence: density count mismatch");
  for (double r : densities) {
    if (!std::isfinite(r)) throw std::invalid_argument("run_persistence: nonfinite density");
  }

  PersistenceTree t;
  t.mode_of.assign(n, n);
  t.parent.assign(n, n);
  t.density.assign(densities.begin(), densities.end());
  t.persistence.assign(n, kInf);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return densities[a] > densities[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

  // Union-find over nodes; the root of a set is always its surviving mode.
  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (uf[x] != x) {
      uf[x] = uf[uf[x]];
      x = uf[x];
    }
    return x;
  };
  const auto adj = graph.adjacency();
  std::vector<bool> active(n, false);

  for (std::size_t i : order) {
    const double level = densities[i];
    std::size_t best = n;
    for (std::size_t j : adj[i]) {
      if (!active[j]) continue;
      if (best == n || densities[j] > densities[best] || (densities[j] == densities[best] && j < best)) {
        best = j;
      }
    }
    active[i] = true;
    if (best == n) {
      t.mode_of[i] = i;
      t.parent[i] = i;
      t.modes.push_back(i);
      continue;
    }
    const std::size_t root = find(best);
    t.mode_of[i] = root;
    uf[i] = root;
    for (std::size_t j : adj[i]) {
      if (!active[j] || j == i) continue;
      const std::size_t a = find(i);
      const std::size_t b = find(j);
      if (a == b) continue;
      // Elder rule: the mode born at lower density (later on ties) dies.
      const bool a_elder = densities[a] > densities[b] || (densities[a] == densities[b] && rank[a] < rank[b]);
      const std::size_t survivor = a_elder ? a : b;
      const std::size_t victim = a_elder ? b : a;
      t.persistence[victim] = densities[victim] - level;
      t.parent[victim] = survivor;
      uf[victim] = survivor;
    }
  }

  for (std::size_t m : t.modes) {
    const double p = t.persistence[m];
    if (std::isfinite(p) && p > 0.0) t.finite_levels.push_back(p);
  }
  std::sort(t.finite_levels.begin(), t.finite_levels.end());
  t.finite_levels.erase(std::unique(t.finite_levels.begin(), t.finite_levels.end()), t.finite_levels.end());
  return t;
}

double largest_gap_threshold(std::span<const double> finite_levels) {
  const std::size_t r_count = finite_levels.size();
  if (r_count <= 1) return 0.0;
  double best_gap = -kInf;
  std::size_t best_r = 1;
  double prev = 0.0;
  for (std::size_t r = 1; r <= r_count; ++r) {
    const double gap = finite_levels[r - 1] - prev;
    if (gap >= best_gap) {
      best_gap = gap;
      best_r = r;
    }
    prev = finite_levels[r - 1];
  }
  return best_r == 1 ? 0.0 : finite_levels[best_r - 2];
}

RawComponentPartition extract_components(const PersistenceTree& tree, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("extract_components: negative epsilon");
  const std::size_t n = tree.size();
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = tree.mode_of[i];
    while (!(tree.persistence[m] > epsilon)) m = tree.parent[m];
    label[i] = m;
  }
  return partition_from_labels(label, epsilon);
}

RawComponentPartition singleton_partition(std::size_t n) {
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  return partition_from_labels(label, 0.0);
}

RawComponentPartition connected_component_partition(const NeighborGraph& graph) {
  const auto cc = connected_components(graph.size(), graph.edges);
  // Relabel with the first node of each component so label_mode is a node.
  std::vector<std::size_t> first(graph.size(), graph.size());
  std::vector<std::size_t> label(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (first[cc[i]] == graph.size()) first[cc[i]] = i;
    label[i] = first[cc[i]];
  }
  return partition_from_labels(label, 0.0);
}

}  // namespace phida
