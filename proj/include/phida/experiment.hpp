#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phida/dataset.hpp"
#include "phida/learner.hpp"
#include "phida/metrics.hpp"

namespace phida {

struct StagedStream {
  std::vector<std::vector<std::size_t>> stages;  // sample indices per stage
  std::vector<long> class_order;
  std::uint64_t seed = 0;
};

// One class per stage in a seeded random class order; samples within a
// stage are shuffled with the same generator. Throws for fewer than two
// classes.
StagedStream build_stages(const Dataset& data, std::uint64_t seed);

// Seeded permutation of 0..n-1.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

enum class Mode { stationary, nonstationary };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct SeedRun {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // set when !ok

  double final_ari = 0.0;
  double final_ami = 0.0;
  // Nonstationary only.
  std::optional<double> avg_inc_ari, avg_inc_ami, bwt_ari, bwt_ami;
  std::vector<double> q_ari, q_ami;  // Q_j over all data seen after stage j
  StageScoreMatrix r_ari, r_ami;     // r[i][j], j >= i
  std::vector<long> class_order;

  std::size_t node_count = 0;
  std::size_t cluster_count = 0;
  Instrumentation stats;
  double wall_seconds = 0.0;  // training + final build, not scoring
};

struct Aggregate {
  std::size_t count = 0;  // runs contributing
  double mean = 0.0;
  double std = 0.0;  // sample std (n - 1); 0 for a single run
};

struct RunReport {
  std::string dataset;
  Mode mode = Mode::stationary;
  std::string variant = "full";
  std::vector<std::uint64_t> seeds;
  std::vector<SeedRun> runs;  // same order as seeds

  std::size_t failed_runs() const;
  // nullopt when no run contributes (all failed, or metric not defined in
  // this mode).
  std::optional<Aggregate> aggregate(const std::string& metric) const;
};

// Metric names usable with RunReport::aggregate and SeedRun lookup.
const std::vector<std::string>& report_metrics();
std::optional<double> metric_value(const SeedRun& run, const std::string& metric);

// Single seed. Failures are caught and reported in the result.
// `final_model`, when given, receives the finalized model of the run.
SeedRun run_seed(const Dataset& data, Mode mode, std::uint64_t seed, const AblationFlags& flags,
                 ModelState* final_model = nullptr);

// All seeds (in parallel when OpenMP is available).
RunReport run_experiment(const Dataset& data, Mode mode, const std::vector<std::uint64_t>& seeds,
                         const AblationFlags& flags, std::vector<ModelState>* final_models = nullptr);

// Labels predicted by the finalized model for the given samples.
std::vector<long> predict_labels(const ModelState& model, const Points& samples);

}  // namespace phida
