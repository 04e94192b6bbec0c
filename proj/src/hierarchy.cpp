#include "phida/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "phida/kernels.hpp"
#include "phida/robust_stats.hpp"

namespace phida {

std::vector<double> ph_stable_masses(std::span<const ComponentSummary> summaries, bool* used_fallback) {
  std::vector<double> supports;
  std::vector<double> positive;
  for (const auto& s : summaries) {
    supports.push_back(s.support);
    if (std::isfinite(s.persistence) && s.persistence > 0.0) positive.push_back(s.persistence);
  }
  bool fallback = positive.empty();
  std::vector<double> masses(summaries.size(), 0.0);
  if (!fallback) {
    const double ref = hazen_median(positive);
    for (std::size_t a = 0; a < summaries.size(); ++a) {
      const double pi = summaries[a].persistence;
      masses[a] = summaries[a].support * (pi / (pi + ref));
      if (!std::isfinite(masses[a]) || !(masses[a] > 0.0)) fallback = true;
    }
  }
  if (used_fallback) *used_fallback = fallback;
  return fallback ? supports : masses;
}

double entropy_effective_count(std::span<const double> masses) {
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("entropy_effective_count: masses must have a positive finite sum");
  }
  double h = 0.0;
  for (double m : masses) {
    if (m <= 0.0) continue;
    const double p = m / total;
    h -= p * std::log(p);
  }
  return std::exp(h);
}

std::size_t min_retained_count(double c_ent, std::size_t k_ph) {
  const double c = std::ceil(c_ent - 1e-12);
  const auto ceil_count = c < 1.0 ? std::size_t{1} : static_cast<std::size_t>(c);
  return std::max<std::size_t>(1, std::min(ceil_count, k_ph));
}

double merge_height(double weight_a, double weight_b, std::span<const double> centroid_a,
                    std::span<const double> centroid_b) {
  return weight_a * weight_b / (weight_a + weight_b) * kernels::squared_euclidean(centroid_a, centroid_b);
}

std::size_t ComponentHierarchy::group_count(std::size_t level) const {
  const auto& lv = levels.at(level);
  std::vector<std::size_t> labels(lv.begin(), lv.end());
  std::sort(labels.begin(), labels.end());
  return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
}

ComponentHierarchy agglomerate(std::span<const ComponentSummary> summaries,
                               const NeighborGraph& component_graph, std::size_t c_min) {
  const std::size_t k = summaries.size();
  if (k == 0) throw std::invalid_argument("agglomerate: empty summaries");
  if (k > 1 && component_graph.size() != k) {
    throw std::invalid_argument("agglomerate: component graph size mismatch");
  }

  struct Group {
    bool alive = true;
    double weight = 0.0;
    Vector centroid;
    std::set<std::size_t> neighbours;
  };
  std::vector<Group> groups(k);
  for (std::size_t a = 0; a < k; ++a) {
    groups[a].weight = summaries[a].merge_weight;
    groups[a].centroid = summaries[a].centroid;
  }
  if (k > 1) {
    for (const auto& [p, q] : component_graph.edges) {
      groups[p].neighbours.insert(q);
      groups[q].neighbours.insert(p);
    }
  }

  ComponentHierarchy h;
  h.c_min = c_min;
  std::vector<std::size_t> current(k);
  std::iota(current.begin(), current.end(), std::size_t{0});
  h.levels.push_back(current);

  std::size_t alive = k;
  while (alive > c_min) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = k;
    std::size_t best_b = k;
    for (std::size_t a = 0; a < k; ++a) {
      if (!groups[a].alive) continue;
      for (std::size_t b : groups[a].neighbours) {
        if (b <= a) continue;
        const double q = merge_height(groups[a].weight, groups[b].weight, groups[a].centroid, groups[b].centroid);
        // Scan order is lexicographic in (a, b), so strict < keeps the
        // smallest pair on ties.
        if (q < best) {
          best = q;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a == k) break;

    Group& ga = groups[best_a];
    Group& gb = groups[best_b];
    const double w = ga.weight + gb.weight;
    for (std::size_t j = 0; j < ga.centroid.size(); ++j) {
      ga.centroid[j] = (ga.weight * ga.centroid[j] + gb.weight * gb.centroid[j]) / w;
    }
    ga.weight = w;
    for (std::size_t nb : gb.neighbours) {
      if (nb == best_a) continue;
      ga.neighbours.insert(nb);
      groups[nb].neighbours.erase(best_b);
      groups[nb].neighbours.insert(best_a);
    }
    ga.neighbours.erase(best_b);
    gb.alive = false;
    gb.neighbours.clear();
    --alive;

    for (auto& lab : current) {
      if (lab == best_b) lab = best_a;
    }
    h.levels.push_back(current);
    h.merge_heights.push_back(best);
    h.merges.emplace_back(best_a, best_b);
  }
  h.selected_level = select_cut(h, c_min);
  return h;
}

std::size_t select_cut(const ComponentHierarchy& hierarchy, std::size_t c_min) {
  if (hierarchy.levels.empty()) throw std::invalid_argument("select_cut: empty hierarchy");
  const std::size_t merges = hierarchy.merge_heights.size();
  if (merges == 0) return 0;
  std::size_t best_level = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  double best_upper = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t l = 0; l < merges; ++l) {
    if (hierarchy.group_count(l) < c_min) continue;
    const double lower = l == 0 ? 0.0 : hierarchy.merge_heights[l - 1];
    const double upper = hierarchy.merge_heights[l];
    const double gap = upper - lower;
    if (!found || gap > best_gap || (gap == best_gap && upper >= best_upper)) {
      found = true;
      best_gap = gap;
      best_upper = upper;
      best_level = l;
    }
  }
  return found ? best_level : 0;
}

std::vector<std::size_t> expand_mapping(const ComponentHierarchy& hierarchy, const RawComponentPartition& raw) {
  const auto& level = hierarchy.levels.at(hierarchy.selected_level);
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cluster_of_group(level.size(), none);
  std::vector<std::size_t> g(raw.component_of.size());
  std::size_t next = 1;
  for (std::size_t i = 0; i < raw.component_of.size(); ++i) {
    const std::size_t comp = raw.component_of[i];
    if (comp >= level.size()) throw std::invalid_argument("expand_mapping: node outside raw partition");
    const std::size_t grp = level[comp];
    if (cluster_of_group[grp] == none) cluster_of_group[grp] = next++;
    g[i] = cluster_of_group[grp];
  }
  return g;
}

}  // namespace phida
