#include "phida/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace phida {

AssignmentView build_assignment_view(std::span<const NodeId> node_ids, std::span<const Vector> raw_reps,
                                     std::span<const std::uint64_t> supports,
                                     std::span<const std::size_t> mapping, const TransformState& transform) {
  const std::size_t n = node_ids.size();
  if (n == 0 || mapping.empty()) throw std::invalid_argument("build_assignment_view: empty mapping");
  if (raw_reps.size() != n || supports.size() != n || mapping.size() != n) {
    throw std::invalid_argument("build_assignment_view: size mismatch");
  }
  const std::size_t c = *std::max_element(mapping.begin(), mapping.end());
  AssignmentView v;
  v.clusters.resize(c);
  v.cluster_supports.assign(c, 0);
  v.node_ids.assign(node_ids.begin(), node_ids.end());
  v.node_supports.assign(supports.begin(), supports.end());
  v.transform = transform;
  v.transformed_reps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mapping[i] < 1) throw std::invalid_argument("build_assignment_view: cluster ids start at 1");
    if (supports[i] == 0) throw std::invalid_argument("build_assignment_view: supports must be positive");
    v.clusters[mapping[i] - 1].push_back(i);
    v.cluster_supports[mapping[i] - 1] += supports[i];
    v.transformed_reps.push_back(transform.apply(raw_reps[i]));
  }
  for (const auto& members : v.clusters) {
    if (members.empty()) throw std::invalid_argument("build_assignment_view: cluster ids must be consecutive");
  }
  const double total = static_cast<double>(std::accumulate(v.cluster_supports.begin(), v.cluster_supports.end(),
                                                           std::uint64_t{0}));
  v.concentration = 0.0;
  for (auto s : v.cluster_supports) {
    const double p = static_cast<double>(s) / total;
    v.concentration += p * p;
  }
  return v;
}

namespace {

std::vector<double> scores_transformed(const AssignmentView& view, std::span<const double> z,
                                       std::vector<double>& dist) {
  const std::size_t n = view.node_count();
  dist.resize(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = kernels::euclidean(z, view.transformed_reps[i]);

  std::vector<double> h(view.cluster_count());
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < view.cluster_count(); ++c) {
    const auto& members = view.clusters[c];
    if (members.size() == 1) {
      const double d = dist[members.front()];
      h[c] = d * d;
      continue;
    }
    order = members;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    const double target = view.concentration * static_cast<double>(view.cluster_supports[c]);
    std::size_t j = order.back();
    double cumulative = 0.0;
    for (std::size_t i : order) {
      cumulative += static_cast<double>(view.node_supports[i]);
      if (cumulative >= target) {
        j = i;
        break;
      }
    }
    h[c] = dist[order.front()] + dist[j];
  }
  return h;
}

}  // namespace

std::vector<double> cluster_scores(const AssignmentView& view, std::span<const double> x) {
  if (view.empty()) throw std::invalid_argument("assign: empty view");
  const Vector z = view.transform.apply(x);
  std::vector<double> dist;
  return scores_transformed(view, z, dist);
}

std::size_t argmin_first(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmin_first: empty scores");
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] < scores[best]) best = c;
  }
  return best;
}

std::size_t assign(const AssignmentView& view, std::span<const double> x) {
  return argmin_first(cluster_scores(view, x));
}

std::vector<std::size_t> assign_batch(const AssignmentView& view, std::span<const Vector> queries,
                                      kernels::Exec exec) {
  if (view.empty()) throw std::invalid_argument("assign: empty view");
  for (const auto& q : queries) {
    if (q.size() != view.transform.dim()) throw std::invalid_argument("assign: dimension mismatch");
  }
  std::vector<std::size_t> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  const bool go_parallel = exec == kernels::Exec::parallel && kernels::openmp_enabled() &&
                           queries.size() * view.node_count() * view.transform.dim() >= kernels::kParallelGrain;
  if (go_parallel) {
#pragma omp parallel
    {
      std::vector<double> dist;
      Vector z(view.transform.dim());
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& q = queries[static_cast<std::size_t>(i)];
        view.transform.apply_into(q, z);
        out[static_cast<std::size_t>(i)] = argmin_first(scores_transformed(view, z, dist));
      }
    }
    return out;
  }
  std::vector<double> dist;
  Vector z(view.transform.dim());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    view.transform.apply_into(queries[i], z);
    out[i] = argmin_first(scores_transformed(view, z, dist));
  }
  return out;
}

}  // namespace phida
