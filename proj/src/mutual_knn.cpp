#include "phida/mutual_knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phida/robust_stats.hpp"

namespace phida {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFenceWidth = 1.5;

double fence(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double q25 = hazen_quantile_sorted(v, 0.25);
  const double q50 = hazen_quantile_sorted(v, 0.5);
  const double q75 = hazen_quantile_sorted(v, 0.75);
  return q50 + kFenceWidth * std::max(0.0, q75 - q25);
}
}  // namespace

bool NeighborGraph::has_edge(std::size_t p, std::size_t q) const {
  const Edge e = p < q ? Edge{p, q} : Edge{q, p};
  return std::binary_search(edges.begin(), edges.end(), e);
}

std::vector<std::vector<std::size_t>> NeighborGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(size());
  for (const auto& [p, q] : edges) {
    adj[p].push_back(q);
    adj[q].push_back(p);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<std::size_t> NeighborGraph::degrees() const {
  std::vector<std::size_t> deg(size(), 0);
  for (const auto& [p, q] : edges) {
    ++deg[p];
    ++deg[q];
  }
  return deg;
}

std::size_t neighborhood_size(std::size_t n) {
  if (n <= 1) throw std::invalid_argument("neighborhood_size: need n > 1");
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(std::log(static_cast<double>(n)))));
  return std::max<std::size_t>(1, std::min(k, n - 1));
}

std::vector<double> candidate_distances(std::span<const Vector> transformed,
                                        std::span<const Vector> weights, double gamma,
                                        kernels::Exec exec) {
  const std::size_t n = transformed.size();
  if (n < 2) throw std::invalid_argument("degenerate graph input");
  const std::size_t d = transformed.front().size();
  if (!weights.empty() && weights.size() != n) {
    throw std::invalid_argument("candidate_distances: weight count mismatch");
  }
  for (const auto& w : weights) {
    if (w.size() != d) throw std::invalid_argument("candidate_distances: weight dimension mismatch");
  }
  std::vector<double> delta = kernels::pairwise_distances(transformed, exec);
  if (!weights.empty()) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double sum_sq = 0.0;
        double local = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double w = 0.5 * (weights[p][j] + weights[q][j]);
          const double t = transformed[p][j] - transformed[q][j];
          sum_sq += w * w;
          local += w * t * t;
        }
        const double kappa = std::clamp(sum_sq > 0.0 ? 1.0 / sum_sq : kInf, 1.0, static_cast<double>(d));
        const double ell = std::sqrt(kappa * local);
        const double g = delta[p * n + q];
        const double v = g + gamma * std::max(ell - g, 0.0);
        delta[p * n + q] = v;
        delta[q * n + p] = v;
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) delta[p * n + p] = kInf;
  return delta;
}

NeighborGraph mutual_graph_from_candidates(std::span<const double> delta, std::size_t n) {
  if (n < 2) throw std::invalid_argument("degenerate graph input");
  if (delta.size() != n * n) throw std::invalid_argument("mutual graph: candidate matrix size mismatch");
  const std::size_t k = neighborhood_size(n);

  NeighborGraph g;
  g.node_ids.resize(n);
  std::iota(g.node_ids.begin(), g.node_ids.end(), std::size_t{0});
  g.candidate_distances.resize(n);
  g.retained.resize(n);

  // C_p: k smallest finite entries, ties to the smaller index.
  std::vector<std::vector<std::size_t>> cand(n);
  std::vector<double> pooled;
  pooled.reserve(n * k);
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < n; ++p) {
    order.clear();
    for (std::size_t q = 0; q < n; ++q) {
      if (std::isfinite(delta[p * n + q])) order.push_back(q);
    }
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = delta[p * n + a];
                        const double db = delta[p * n + b];
                        return da < db || (da == db && a < b);
                      });
    cand[p].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    for (std::size_t q : cand[p]) {
      g.candidate_distances[p].push_back(delta[p * n + q]);
      pooled.push_back(delta[p * n + q]);
    }
  }
  g.global_threshold = pooled.empty() ? kInf : fence(pooled);

  for (std::size_t p = 0; p < n; ++p) {
    if (cand[p].empty()) continue;
    const double limit = std::min(fence(g.candidate_distances[p]), g.global_threshold);
    for (std::size_t q : cand[p]) {
      if (delta[p * n + q] <= limit) g.retained[p].push_back(q);
    }
    if (g.retained[p].empty()) g.retained[p].push_back(cand[p].front());
    std::sort(g.retained[p].begin(), g.retained[p].end());
  }

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q : g.retained[p]) {
      if (q > p && std::binary_search(g.retained[q].begin(), g.retained[q].end(), p)) {
        g.edges.emplace_back(p, q);
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

NeighborGraph build_mutual_graph(std::span<const Vector> points, std::span<const Vector> weights,
                                 const TransformState& transform, kernels::Exec exec) {
  if (points.size() < 2) throw std::invalid_argument("degenerate graph input");
  Points z;
  z.reserve(points.size());
  for (const auto& p : points) z.push_back(transform.apply(p));
  const auto delta = candidate_distances(z, weights, transform.gamma, exec);
  return mutual_graph_from_candidates(delta, points.size());
}

std::vector<std::size_t> connected_components(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [p, q] : edges) {
    const std::size_t a = find(p);
    const std::size_t b = find(q);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> label(n);
  std::vector<std::size_t> root_label(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == n) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

std::size_t count_components(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return 0;
  const auto labels = connected_components(n, edges);
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace phida
