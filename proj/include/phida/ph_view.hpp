#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "phida/assignment.hpp"
#include "phida/hierarchy.hpp"
#include "phida/mutual_knn.hpp"
#include "phida/persistence.hpp"
#include "phida/transform.hpp"
#include "phida/types.hpp"

namespace phida {

struct PhBuildOptions {
  // Drop isolated graph nodes from the PH input (keeping at least two).
  bool prune_isolated = true;
  // false: raw components become graph connected components and the
  // hierarchy runs over single nodes without the persistence constraint.
  bool use_ph = true;
};

// Node-to-cluster mapping built from a snapshot of learned nodes, plus the
// intermediate structures it was derived from.
//
// Snapshots restored from disk only carry the cache part (ids, component
// map, counts and the assignment view); graph, tree, summaries and hierarchy
// are then empty.
struct PhView {
  // Cache part.
  std::vector<NodeId> input_ids;   // PH input after isolated-node pruning
  std::vector<NodeId> pruned_ids;  // isolated nodes removed from the input
  std::map<NodeId, std::size_t> component_of;
  std::size_t raw_component_count = 0;
  std::size_t graph_component_count = 0;
  AssignmentView assignment;

  // Build details.
  TransformState transform;
  NeighborGraph graph;  // over input_ids
  std::optional<PersistenceTree> tree;
  RawComponentPartition raw;      // raw components over input_ids
  RawComponentPartition mapping_partition;  // partition the hierarchy starts from
  std::vector<ComponentSummary> summaries;
  bool mass_fallback = false;
  double c_ent = 1.0;
  ComponentHierarchy hierarchy;
  std::vector<std::size_t> mapping;  // 1-based cluster per input node

  std::size_t cluster_count() const { return assignment.cluster_count(); }
};

// Builds the PH view over the given nodes (already restricted to the PH
// input selection). Needs at least one node.
PhView build_ph_view(std::span<const NodeId> ids, std::span<const Vector> reps,
                     std::span<const std::uint64_t> supports, std::span<const Vector> feature_weights,
                     const PhBuildOptions& options);

// pi_a: support-weighted mean over members of their owning mode's
// persistence, with +inf replaced by birth density minus the minimum density.
std::vector<double> component_persistence(const PersistenceTree& tree, const RawComponentPartition& raw,
                                          std::span<const std::uint64_t> supports);

}  // namespace phida
