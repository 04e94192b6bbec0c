#include "phida/experiment.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "phida/assignment.hpp"
#include "phida/synthetic.hpp"

namespace phida {

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(idx);
  return idx;
}

StagedStream build_stages(const Dataset& data, std::uint64_t seed) {
  const std::size_t c = data.class_count();
  if (c < 2) throw std::invalid_argument("build_stages: need at least two classes");
  SplitMix64 rng(seed);
  StagedStream s;
  s.seed = seed;
  s.class_order.resize(c);
  std::iota(s.class_order.begin(), s.class_order.end(), 0L);
  rng.shuffle(s.class_order);
  std::vector<std::vector<std::size_t>> by_class(c);
  for (std::size_t i = 0; i < data.size(); ++i) by_class.at(static_cast<std::size_t>(data.labels[i])).push_back(i);
  for (long cls : s.class_order) {
    auto stage = by_class[static_cast<std::size_t>(cls)];
    rng.shuffle(stage);
    s.stages.push_back(std::move(stage));
  }
  return s;
}

std::string mode_name(Mode m) { return m == Mode::stationary ? "stationary" : "nonstationary"; }

Mode parse_mode(const std::string& s) {
  if (s == "stationary") return Mode::stationary;
  if (s == "nonstationary") return Mode::nonstationary;
  throw std::invalid_argument("unknown mode: " + s);
}

std::size_t RunReport::failed_runs() const {
  std::size_t f = 0;
  for (const auto& r : runs) f += r.ok ? 0 : 1;
  return f;
}

const std::vector<std::string>& report_metrics() {
  static const std::vector<std::string> names = {"final_ari",   "final_ami", "avg_inc_ari",   "avg_inc_ami",
                                                 "bwt_ari",     "bwt_ami",   "node_count",    "cluster_count",
                                                 "wall_seconds"};
  return names;
}

std::optional<double> metric_value(const SeedRun& r, const std::string& metric) {
  if (!r.ok) return std::nullopt;
  if (metric == "final_ari") return r.final_ari;
  if (metric == "final_ami") return r.final_ami;
  if (metric == "avg_inc_ari") return r.avg_inc_ari;
  if (metric == "avg_inc_ami") return r.avg_inc_ami;
  if (metric == "bwt_ari") return r.bwt_ari;
  if (metric == "bwt_ami") return r.bwt_ami;
  if (metric == "node_count") return static_cast<double>(r.node_count);
  if (metric == "cluster_count") return static_cast<double>(r.cluster_count);
  if (metric == "wall_seconds") return r.wall_seconds;
  throw std::invalid_argument("unknown metric: " + metric);
}

std::optional<Aggregate> RunReport::aggregate(const std::string& metric) const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (auto x = metric_value(r, metric)) v.push_back(*x);
  }
  if (v.empty()) return std::nullopt;
  Aggregate a;
  a.count = v.size();
  a.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return a;
}

std::vector<long> predict_labels(const ModelState& model, const Points& samples) {
  const auto assigned = assign_batch(prediction_view(model), samples);
  return {assigned.begin(), assigned.end()};
}

namespace {

using Clock = std::chrono::steady_clock;

struct Scores {
  double ari;
  double ami;
};

Scores score(const Dataset& data, const ModelState& model, const std::vector<std::size_t>& idx) {
  Points xs;
  std::vector<long> truth;
  xs.reserve(idx.size());
  for (std::size_t i : idx) {
    xs.push_back(data.features[i]);
    truth.push_back(data.labels[i]);
  }
  const auto pred = predict_labels(model, xs);
  return {adjusted_rand_index(truth, pred), adjusted_mutual_information(truth, pred)};
}

Points gather(const Dataset& data, const std::vector<std::size_t>& idx) {
  Points xs;
  xs.reserve(idx.size());
  for (std::size_t i : idx) xs.push_back(data.features[i]);
  return xs;
}

void run_stationary(const Dataset& data, SeedRun& out, ModelState& model) {
  const auto order = shuffled_order(data.size(), out.seed);
  const auto xs = gather(data, order);
  const auto t0 = Clock::now();
  fit(model, xs);
  finalize(model);
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto s = score(data, model, all);
  out.final_ari = s.ari;
  out.final_ami = s.ami;
}

void run_nonstationary(const Dataset& data, SeedRun& out, ModelState& model, ModelState& last_view) {
  const auto stream = build_stages(data, out.seed);
  out.class_order = stream.class_order;
  const std::size_t j_count = stream.stages.size();
  out.r_ari.assign(j_count, std::vector<std::optional<double>>(j_count));
  out.r_ami = out.r_ari;
  std::vector<std::size_t> seen;
  double train_seconds = 0.0;
  for (std::size_t j = 0; j < j_count; ++j) {
    const auto xs = gather(data, stream.stages[j]);
    auto t0 = Clock::now();
    fit(model, xs);
    ModelState snapshot = model;  // evaluation builds must not disturb learning
    finalize(snapshot);
    train_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    for (std::size_t i = 0; i <= j; ++i) {
      const auto s = score(data, snapshot, stream.stages[i]);
      out.r_ari[i][j] = s.ari;
      out.r_ami[i][j] = s.ami;
    }
    seen.insert(seen.end(), stream.stages[j].begin(), stream.stages[j].end());
    const auto q = score(data, snapshot, seen);
    out.q_ari.push_back(q.ari);
    out.q_ami.push_back(q.ami);
    if (j + 1 == j_count) last_view = std::move(snapshot);
  }
  out.wall_seconds = train_seconds;
  out.final_ari = out.q_ari.back();
  out.final_ami = out.q_ami.back();
  out.avg_inc_ari = avg_inc(out.q_ari);
  out.avg_inc_ami = avg_inc(out.q_ami);
  out.bwt_ari = backward_transfer(out.r_ari);
  out.bwt_ami = backward_transfer(out.r_ami);
}

}  // namespace

SeedRun run_seed(const Dataset& data, Mode mode, std::uint64_t seed, const AblationFlags& flags,
                 ModelState* final_model) {
  SeedRun out;
  out.seed = seed;
  try {
    if (data.size() == 0) throw std::invalid_argument("empty dataset");
    ModelState model(data.dim(), flags);
    ModelState finished;
    if (mode == Mode::stationary) {
      run_stationary(data, out, model);
      finished = std::move(model);
    } else {
      run_nonstationary(data, out, model, finished);
    }
    out.node_count = finished.nodes.size();
    out.cluster_count = prediction_view(finished).cluster_count();
    out.stats = finished.stats;
    out.ok = true;
    if (final_model) *final_model = std::move(finished);
  } catch (const std::exception& e) {
    out = SeedRun{};
    out.seed = seed;
    out.error = e.what();
  }
  return out;
}

RunReport run_experiment(const Dataset& data, Mode mode, const std::vector<std::uint64_t>& seeds,
                         const AblationFlags& flags, std::vector<ModelState>* final_models) {
  if (seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
  RunReport rep;
  rep.dataset = data.name;
  rep.mode = mode;
  rep.variant = flags.variant_name();
  rep.seeds = seeds;
  rep.runs.resize(seeds.size());
  if (final_models) final_models->assign(seeds.size(), ModelState{});
  const auto n = static_cast<long>(seeds.size());
#ifdef PHIDA_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    rep.runs[i] = run_seed(data, mode, seeds[i], flags, final_models ? &(*final_models)[i] : nullptr);
  }
  return rep;
}

}  // namespace phida
