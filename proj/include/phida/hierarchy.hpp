#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "phida/mutual_knn.hpp"
#include "phida/persistence.hpp"
#include "phida/types.hpp"

namespace phida {

struct ComponentSummary {
  std::vector<std::size_t> members;  // node positions B_a
  double support = 0.0;              // S_a = sum of member supports
  Vector centroid;                   // support-weighted, transformed space
  double persistence = 0.0;          // pi_a
  double merge_weight = 0.0;         // S*_a, or S_a after fallback
};

// S*_a = S_a * pi_a / (pi_a + pi_ref) with pi_ref the Hazen median of the
// positive pi_a. Falls back to S_a for every component when any mass is
// nonfinite or nonpositive. `used_fallback`, when given, reports which path
// was taken.
std::vector<double> ph_stable_masses(std::span<const ComponentSummary> summaries,
                                     bool* used_fallback = nullptr);

// exp(Shannon entropy) of the normalised masses. Throws when the masses do
// not sum to a positive finite value.
double entropy_effective_count(std::span<const double> masses);

// min(ceil(c_ent), k_ph), at least 1.
std::size_t min_retained_count(double c_ent, std::size_t k_ph);

// Ward-form cost W_a W_b / (W_a + W_b) * ||mu_a - mu_b||^2.
double merge_height(double weight_a, double weight_b, std::span<const double> centroid_a,
                    std::span<const double> centroid_b);

// Nested partitions over raw components. levels[l][a] is the group label of
// raw component a at level l; a group is labelled by its smallest component.
struct ComponentHierarchy {
  std::vector<std::vector<std::size_t>> levels;
  std::vector<double> merge_heights;                        // q_1..q_L
  std::vector<std::pair<std::size_t, std::size_t>> merges;  // group labels joined at each step
  std::size_t selected_level = 0;
  std::size_t c_min = 1;

  std::size_t merge_count() const { return merge_heights.size(); }
  std::size_t group_count(std::size_t level) const;
};

// Greedy merges along component-graph edges only, smallest merge height
// first (ties: lexicographically smallest label pair). Stops at c_min groups
// or when no adjacent pair remains. Group weights are the summaries'
// merge_weight values.
ComponentHierarchy agglomerate(std::span<const ComponentSummary> summaries,
                               const NeighborGraph& component_graph, std::size_t c_min);

// Level before the largest forward gap q_{l+1} - q_l (q_0 = 0) among levels
// with at least c_min groups; ties go to the larger upper height. Level 0
// when nothing was merged or no level is eligible.
std::size_t select_cut(const ComponentHierarchy& hierarchy, std::size_t c_min);

// Output cluster (1-based, numbered by first appearance over nodes) for
// every node of the raw partition at the hierarchy's selected level.
std::vector<std::size_t> expand_mapping(const ComponentHierarchy& hierarchy,
                                        const RawComponentPartition& raw);

}  // namespace phida
