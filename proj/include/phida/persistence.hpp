#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phida/mutual_knn.hpp"

namespace phida {

// Result of the density-guided 0-dimensional sweep over a node graph.
//
// Modes are identified by the index of the node that gave birth to them.
// Per-node arrays are indexed by local graph position.
struct PersistenceTree {
  // Mode each node joined when it was activated (its own index for a mode).
  std::vector<std::size_t> mode_of;
  // For a mode: the mode it died into, or itself while it survives.
  std::vector<std::size_t> parent;
  std::vector<double> density;
  // For a mode: birth density minus the activation level at its death, or
  // +inf for survivors. Meaningless for non-mode nodes.
  std::vector<double> persistence;
  std::vector<std::size_t> modes;
  // Distinct positive finite persistence values, ascending.
  std::vector<double> finite_levels;

  std::size_t size() const { return mode_of.size(); }
  bool is_mode(std::size_t i) const { return mode_of[i] == i; }
};

// Nodes are activated by descending density (ties: ascending index). A node
// with no active neighbour is born as a mode; otherwise it joins the mode of
// its highest-density active neighbour, and every further active neighbour
// in another component triggers a merge where the younger mode (lower birth
// density, later activation on ties) dies.
PersistenceTree run_persistence(const NeighborGraph& graph, std::span<const double> densities);

// Largest-gap rule over a_0 = 0 < a_1 < ... < a_R; returns a_{r*-1}, or 0
// when R <= 1. Gap ties go to the larger upper level.
double largest_gap_threshold(std::span<const double> finite_levels);

struct RawComponentPartition {
  std::vector<std::size_t> component_of;
  std::vector<std::vector<std::size_t>> components;
  // Labelling mode of each component.
  std::vector<std::size_t> label_mode;
  double epsilon = 0.0;

  std::size_t count() const { return components.size(); }
};

// Follows mode parents until persistence strictly exceeds epsilon.
// Components are numbered in order of their first member node.
RawComponentPartition extract_components(const PersistenceTree& tree, double epsilon);

// Every node its own component; used when the PH constraint is switched off.
RawComponentPartition singleton_partition(std::size_t n);

// One component per connected component of the graph.
RawComponentPartition connected_component_partition(const NeighborGraph& graph);

}  // namespace phida
