#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phida/kernels.hpp"
#include "phida/transform.hpp"
#include "phida/types.hpp"

namespace phida {

// Frozen output clustering used for out-of-sample assignment.
//
// Cluster c (0-based here) holds positions into the per-node arrays.
struct AssignmentView {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<NodeId> node_ids;
  Points transformed_reps;
  std::vector<std::uint64_t> node_supports;
  TransformState transform;
  std::vector<std::uint64_t> cluster_supports;
  double concentration = 1.0;  // q = sum_c p_c^2

  std::size_t cluster_count() const { return clusters.size(); }
  std::size_t node_count() const { return node_ids.size(); }
  bool empty() const { return clusters.empty(); }

  bool operator==(const AssignmentView&) const = default;
};

// `mapping` gives a 1-based output cluster per node (consecutive ids).
// `raw_reps` are in data units and are transformed once here.
AssignmentView build_assignment_view(std::span<const NodeId> node_ids, std::span<const Vector> raw_reps,
                                     std::span<const std::uint64_t> supports,
                                     std::span<const std::size_t> mapping, const TransformState& transform);

// Per-cluster scores h_c for a query in data units. Multi-node clusters use
// nearest-member distance plus the distance to the member at which the
// cumulative support (members by increasing distance) reaches q * S_c;
// singletons use the squared distance.
std::vector<double> cluster_scores(const AssignmentView& view, std::span<const double> x);

// Smallest index among the minimisers.
std::size_t argmin_first(std::span<const double> scores);

// 0-based output cluster for a query in data units.
std::size_t assign(const AssignmentView& view, std::span<const double> x);

// assign() over many queries; the parallel path splits queries over threads.
std::vector<std::size_t> assign_batch(const AssignmentView& view, std::span<const Vector> queries,
                                      kernels::Exec exec = kernels::default_exec());

}  // namespace phida
