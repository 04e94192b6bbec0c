#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phida/assignment.hpp"
#include "phida/ph_view.hpp"
#include "phida/robust_stats.hpp"
#include "phida/transform.hpp"
#include "phida/types.hpp"

namespace phida {

// Ablation switches. Defaults give the full model.
struct AblationFlags {
  bool refresh = true;         // periodic mid-stream PH rebuilds
  bool remove = true;          // physical deletion of low-support nodes
  bool prune_ph_input = true;  // drop isolated nodes from the PH input
  bool use_ph = true;          // persistence partition in learning and mapping

  // "full", "noPH", "noRefresh", "noDelete", "noPrune". Throws on others.
  static AblationFlags from_variant(std::string_view name);
  std::string variant_name() const;

  bool operator==(const AblationFlags&) const = default;
};

struct NodeState {
  NodeId id = 0;
  Vector representative;
  std::uint64_t support = 1;
  double scale = 1e-6;
  bool active_for_prediction = false;
  std::uint64_t created_epoch = 0;
  Vector feature_weights;  // empty unless node-wise weights are supplied

  bool operator==(const NodeState&) const = default;
};

struct VigilanceState {
  std::size_t lambda = 2;
  double tau = 0.0;
  double smoothed_ratio = 0.0;
  bool ratio_initialized = false;
  std::size_t recalc_counter = 0;
  // 0 until the first recalculation: the cold-start buffer is not trimmed.
  std::size_t retention = 0;
  std::deque<Vector> buffer;  // oldest first

  bool operator==(const VigilanceState&) const = default;
};

// Counters used by the ablation checks and reports.
struct Instrumentation {
  std::uint64_t node_creations = 0;
  std::uint64_t winner_updates = 0;
  std::uint64_t runner_up_updates = 0;
  std::uint64_t recalculations = 0;
  std::uint64_t midstream_rebuilds = 0;
  std::uint64_t final_builds = 0;
  std::uint64_t deleted_low_support = 0;
  std::uint64_t deleted_isolated = 0;
  std::uint64_t pruned_from_ph_input = 0;
  std::uint64_t zeta_component_lookups = 0;

  bool operator==(const Instrumentation&) const = default;
};

struct ModelState {
  std::size_t dim = 0;
  std::vector<NodeState> nodes;
  VigilanceState vigilance;
  WelfordState raw_welford;
  std::optional<PhView> ph_view;
  AblationFlags flags;
  std::uint64_t samples_seen = 0;
  std::uint64_t maintenance_epoch = 0;
  NodeId next_id = 0;
  Instrumentation stats;

  ModelState() = default;
  ModelState(std::size_t dim, AblationFlags flags);

  std::size_t node_count() const { return nodes.size(); }
  const NodeState* find_node(NodeId id) const;
};

inline constexpr double kScaleFloor = 1e-6;
inline constexpr double kAlphaGuard = 1e-12;
inline constexpr double kDeterminantThreshold = 1e-6;
inline constexpr std::size_t kColdStartNodes = 3;

// 1 / (1 + alpha * distance), alpha = 1 / max(scale, 1e-12) for a finite
// positive scale and 1 otherwise.
double inverse_distance_similarity(double distance, double scale);

// One online step: match, vigilance test, create/update, runner-up update,
// interval-driven vigilance recalculation and refresh.
void process_sample(ModelState& model, std::span<const double> x);

// Secondary update gate for the runner-up.
bool runner_up_gate(ModelState& model, std::size_t winner, std::size_t runner, double a_runner);

struct StabilityResult {
  bool stable = false;
  double determinant = 0.0;  // (prod diag L)^2; 0 when factorisation failed
};

// Cholesky stability of the buffer similarity matrix over a window of raw
// samples. Throws for windows shorter than two samples.
StabilityResult stability_test(std::span<const Vector> window, const TransformState& transform,
                               double max_node_scale);

// Same test on already transformed samples with an explicit alpha.
StabilityResult stability_test_transformed(std::span<const Vector> window, double alpha);

// Recomputes lambda, tau and the buffer retention from the current buffer.
void vigilance_recalculate(ModelState& model);

// Deletion, PH input selection, pruning and view rebuild. Mid-stream calls
// are no-ops when the refresh switch is off; `final_build` always runs.
void maintenance_cycle(ModelState& model, bool final_build = false);

// Final build after learning ends. Throws for a model without nodes.
void finalize(ModelState& model);

// Cluster count used for the cluster-to-node ratio: cached output clusters,
// then raw PH components, then graph components, then exp-entropy of the
// normalised node supports.
double current_cluster_count(const ModelState& model);

// Train on a sequence of samples.
void fit(ModelState& model, std::span<const Vector> samples);

// Cached assignment view; throws when no view has been built yet.
const AssignmentView& prediction_view(const ModelState& model);

}  // namespace phida
