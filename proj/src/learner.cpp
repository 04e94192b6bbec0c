#include "phida/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phida/kernels.hpp"

namespace phida {

AblationFlags AblationFlags::from_variant(std::string_view name) {
  AblationFlags f;
  if (name == "full" || name == "PHIDA") return f;
  if (name == "noPH") {
    f.use_ph = false;
  } else if (name == "noRefresh") {
    f.refresh = false;
  } else if (name == "noDelete") {
    f.remove = false;
  } else if (name == "noPrune") {
    f.prune_ph_input = false;
  } else {
    throw std::invalid_argument("unknown variant: " + std::string(name));
  }
  return f;
}

std::string AblationFlags::variant_name() const {
  const int off = !refresh + !remove + !prune_ph_input + !use_ph;
  if (off == 0) return "full";
  if (off == 1) {
    if (!use_ph) return "noPH";
    if (!refresh) return "noRefresh";
    if (!remove) return "noDelete";
    return "noPrune";
  }
  std::string s;
  if (!use_ph) s += "noPH+";
  if (!refresh) s += "noRefresh+";
  if (!remove) s += "noDelete+";
  if (!prune_ph_input) s += "noPrune+";
  s.pop_back();
  return s;
}

ModelState::ModelState(std::size_t d, AblationFlags f) : dim(d), raw_welford(d), flags(f) {
  if (d == 0) throw std::invalid_argument("model dimension must be positive");
}

const NodeState* ModelState::find_node(NodeId id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

double inverse_distance_similarity(double distance, double scale) {
  const double alpha = (std::isfinite(scale) && scale > 0.0) ? 1.0 / std::max(scale, kAlphaGuard) : 1.0;
  return 1.0 / (1.0 + alpha * distance);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Points representatives(const ModelState& m) {
  Points reps;
  reps.reserve(m.nodes.size());
  for (const auto& n : m.nodes) reps.push_back(n.representative);
  return reps;
}

double max_node_scale(const ModelState& m) {
  double s = -kInf;
  for (const auto& n : m.nodes) {
    if (std::isfinite(n.scale) && n.scale > 0.0) s = std::max(s, n.scale);
  }
  return std::isfinite(s) ? s : 1.0;
}

void create_node(ModelState& m, std::span<const double> x, double scale) {
  NodeState n;
  n.id = m.next_id++;
  n.representative.assign(x.begin(), x.end());
  n.support = 1;
  n.scale = scale;
  n.created_epoch = m.maintenance_epoch;
  m.nodes.push_back(std::move(n));
  ++m.stats.node_creations;
}

void trim_buffer(VigilanceState& v) {
  if (v.retention == 0) return;
  while (v.buffer.size() > v.retention) v.buffer.pop_front();
}

// Growing Cholesky factor over windows of the newest samples. Samples are
// ordered newest first, so the window of the m newest samples is the
// leading m x m block and each larger window only appends one row.
class WindowScanner {
 public:
  WindowScanner(const std::vector<double>& dist, std::size_t n, double alpha)
      : dist_(dist), n_(n), alpha_(alpha), l_(n * n, 0.0) {}

  double similarity(std::size_t p, std::size_t q) const {
    return p == q ? 1.0 : 1.0 / (1.0 + alpha_ * dist_[p * n_ + q]);
  }

  StabilityResult test(std::size_t m) {
    extend(m);
    if (failed_at_ <= m) return {false, 0.0};
    const double det = prefix_det_[m - 1];
    return {det >= kDeterminantThreshold, det};
  }

 private:
  void extend(std::size_t m) {
    while (built_ < m && failed_at_ > built_) {
      const std::size_t k = built_;
      for (std::size_t j = 0; j < k; ++j) {
        double s = similarity(k, j);
        for (std::size_t t = 0; t < j; ++t) s -= l_[k * n_ + t] * l_[j * n_ + t];
        l_[k * n_ + j] = s / l_[j * n_ + j];
      }
      double pivot = 1.0;
      for (std::size_t t = 0; t < k; ++t) pivot -= l_[k * n_ + t] * l_[k * n_ + t];
      if (!(pivot > 0.0) || !std::isfinite(pivot)) {
        failed_at_ = k + 1;
        return;
      }
      l_[k * n_ + k] = std::sqrt(pivot);
      prefix_det_.push_back((k == 0 ? 1.0 : prefix_det_.back()) * pivot);
      ++built_;
    }
  }

  const std::vector<double>& dist_;
  std::size_t n_;
  double alpha_;
  std::vector<double> l_;
  std::vector<double> prefix_det_;
  std::size_t built_ = 0;
  std::size_t failed_at_ = std::numeric_limits<std::size_t>::max();
};

}  // namespace

StabilityResult stability_test_transformed(std::span<const Vector> window, double alpha) {
  const std::size_t m = window.size();
  if (m < 2) throw std::invalid_argument("stability_test: window needs at least two samples");
  const auto dist = kernels::pairwise_distances(window, kernels::Exec::serial);
  std::vector<double> l(m * m, 0.0);
  double det = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      double s = (k == j) ? 1.0 : 1.0 / (1.0 + alpha * dist[k * m + j]);
      for (std::size_t t = 0; t < j; ++t) s -= l[k * m + t] * l[j * m + t];
      if (j == k) {
        if (!(s > 0.0) || !std::isfinite(s)) return {false, 0.0};
        l[k * m + k] = std::sqrt(s);
        det *= s;
      } else {
        l[k * m + j] = s / l[j * m + j];
      }
    }
  }
  return {det >= kDeterminantThreshold, det};
}

StabilityResult stability_test(std::span<const Vector> window, const TransformState& transform,
                               double max_node_scale_value) {
  Points z;
  z.reserve(window.size());
  for (const auto& v : window) z.push_back(transform.apply(v));
  const double s = (std::isfinite(max_node_scale_value) && max_node_scale_value > 0.0) ? max_node_scale_value : 1.0;
  return stability_test_transformed(z, 1.0 / std::max(s, kAlphaGuard));
}

double current_cluster_count(const ModelState& m) {
  if (m.ph_view) {
    if (!m.ph_view->assignment.empty()) return static_cast<double>(m.ph_view->cluster_count());
    if (m.ph_view->raw_component_count > 0) return static_cast<double>(m.ph_view->raw_component_count);
    if (m.ph_view->graph_component_count > 0) return static_cast<double>(m.ph_view->graph_component_count);
  }
  double total = 0.0;
  for (const auto& n : m.nodes) total += static_cast<double>(n.support);
  if (!(total > 0.0)) return 1.0;
  double h = 0.0;
  for (const auto& n : m.nodes) {
    const double p = static_cast<double>(n.support) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::exp(h);
}

bool runner_up_gate(ModelState& m, std::size_t winner, std::size_t runner, double a_runner) {
  if (winner == runner) throw std::invalid_argument("runner_up_gate: winner and runner-up coincide");
  if (!(a_runner > m.vigilance.tau)) return false;
  if (!m.flags.use_ph || !m.ph_view) return true;
  if (m.ph_view->raw_component_count < 2) return true;
  const std::size_t k_floor = std::max<std::size_t>(2 * m.vigilance.lambda, 8);
  if (m.nodes.size() < k_floor) return true;
  ++m.stats.zeta_component_lookups;
  const auto& map = m.ph_view->component_of;
  const auto wi = map.find(m.nodes[winner].id);
  const auto ri = map.find(m.nodes[runner].id);
  return wi != map.end() && ri != map.end() && wi->second == ri->second;
}

void vigilance_recalculate(ModelState& m) {
  auto& v = m.vigilance;
  const std::size_t lambda = v.lambda;
  const std::size_t nb = v.buffer.size();
  ++m.stats.recalculations;

  const TransformState transform = fit_transform_state(representatives(m));
  const double alpha = 1.0 / std::max(max_node_scale(m), kAlphaGuard);
  Points z;
  z.reserve(nb);
  for (auto it = v.buffer.rbegin(); it != v.buffer.rend(); ++it) z.push_back(transform.apply(*it));
  const auto dist = kernels::pairwise_distances(z, kernels::default_exec());
  WindowScanner scanner(dist, nb, alpha);

  const double ratio = std::clamp(current_cluster_count(m) / static_cast<double>(m.nodes.size()), 0.0, 1.0);
  struct Threshold {
    double tau;
    double smoothed;
  };
  auto recompute = [&](std::size_t len, std::size_t mix) -> Threshold {
    std::vector<double> u(len);
    for (std::size_t p = 0; p < len; ++p) {
      double best = -kInf;
      for (std::size_t q = 0; q < len; ++q) {
        if (q != p) best = std::max(best, scanner.similarity(p, q));
      }
      u[p] = best;
    }
    const double l_mix = static_cast<double>(mix);
    const double smoothed =
        v.ratio_initialized ? std::clamp(ratio / l_mix + (1.0 - 1.0 / l_mix) * v.smoothed_ratio, 0.0, 1.0) : ratio;
    return {hazen_quantile(u, smoothed), smoothed};
  };

  std::size_t new_lambda = lambda;
  Threshold committed{v.tau, v.smoothed_ratio};
  bool ratio_updated = false;

  // Decremental scan over the newest min(lambda, |B|) samples.
  bool unstable = false;
  {
    const std::size_t m0 = std::min(lambda, nb);
    std::size_t last_lambda = lambda;
    Threshold last{v.tau, v.smoothed_ratio};
    bool last_updated = false;
    for (std::size_t len = 2; len <= m0; ++len) {
      if (!scanner.test(len).stable) {
        unstable = true;
        break;
      }
      last_lambda = len;
      last = recompute(len, lambda);
      last_updated = true;
    }
    if (unstable) {
      new_lambda = last_lambda;
      committed = last;
      ratio_updated = last_updated;
    }
  }

  // Incremental doubling scan.
  if (!unstable && nb > lambda) {
    const std::size_t m_max = std::min(2 * lambda, nb);
    std::size_t lo = lambda;
    std::size_t hi = std::min(lambda + 1, m_max);
    std::size_t stride = 1;
    bool found = false;
    while (hi <= m_max) {
      if (!scanner.test(hi).stable) {
        new_lambda = lo;
        committed = recompute(lo, lo);
        found = true;
        break;
      }
      lo = hi;
      stride = std::min(2 * stride, m_max - lambda);
      hi = std::min(lambda + stride, m_max);
      if (hi <= lo) break;
    }
    if (!found) {
      new_lambda = m_max;
      committed = recompute(m_max, lambda);
    }
    ratio_updated = true;
  }

  v.lambda = std::max<std::size_t>(new_lambda, 2);
  v.tau = std::clamp(committed.tau, 0.0, 1.0);
  if (ratio_updated) {
    v.smoothed_ratio = committed.smoothed;
    v.ratio_initialized = true;
  }
  v.retention = 2 * v.lambda;
  trim_buffer(v);
  v.recalc_counter = 0;
}

void maintenance_cycle(ModelState& m, bool final_build) {
  if (!final_build && !m.flags.refresh) return;
  if (m.nodes.empty()) return;

  if (m.flags.remove) {
    std::vector<std::size_t> doomed;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const auto& n = m.nodes[i];
      if (n.support == 1 && !n.active_for_prediction && n.created_epoch < m.maintenance_epoch) doomed.push_back(i);
    }
    const std::size_t cap = m.nodes.size() > 2 ? m.nodes.size() - 2 : 0;
    if (doomed.size() > cap) doomed.resize(cap);
    for (auto it = doomed.rbegin(); it != doomed.rend(); ++it) {
      m.nodes.erase(m.nodes.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    m.stats.deleted_low_support += doomed.size();
  }

  std::size_t active = 0;
  for (const auto& n : m.nodes) active += n.active_for_prediction ? 1 : 0;
  const bool use_active = active >= 2;

  std::vector<NodeId> ids;
  Points reps;
  std::vector<std::uint64_t> supports;
  Points weights;
  bool all_weighted = true;
  for (const auto& n : m.nodes) {
    if (use_active && !n.active_for_prediction) continue;
    ids.push_back(n.id);
    reps.push_back(n.representative);
    supports.push_back(n.support);
    weights.push_back(n.feature_weights);
    all_weighted = all_weighted && n.feature_weights.size() == m.dim;
  }
  if (!all_weighted) weights.clear();

  PhBuildOptions opts;
  opts.prune_isolated = m.flags.prune_ph_input;
  opts.use_ph = m.flags.use_ph;
  PhView view = build_ph_view(ids, reps, supports, weights, opts);
  m.stats.pruned_from_ph_input += view.pruned_ids.size();

  if (m.flags.remove && !view.pruned_ids.empty()) {
    const auto before = m.nodes.size();
    std::erase_if(m.nodes, [&](const NodeState& n) {
      return n.support == 1 && !n.active_for_prediction &&
             std::find(view.pruned_ids.begin(), view.pruned_ids.end(), n.id) != view.pruned_ids.end();
    });
    m.stats.deleted_isolated += before - m.nodes.size();
  }

  m.ph_view = std::move(view);
  ++m.maintenance_epoch;
  if (final_build) {
    ++m.stats.final_builds;
  } else {
    ++m.stats.midstream_rebuilds;
  }
}

void process_sample(ModelState& m, std::span<const double> x) {
  if (x.size() != m.dim) throw std::invalid_argument("process_sample: dimension mismatch");
  for (double xi : x) {
    if (!std::isfinite(xi)) throw std::invalid_argument("process_sample: nonfinite input");
  }
  ++m.samples_seen;
  auto& v = m.vigilance;
  v.buffer.emplace_back(x.begin(), x.end());
  trim_buffer(v);

  m.raw_welford.update(x);
  const auto sd = m.raw_welford.stddev();
  const double s_star = std::max(*std::max_element(sd.begin(), sd.end()), kScaleFloor);

  if (m.nodes.size() < kColdStartNodes) {
    create_node(m, x, s_star);
    if (m.nodes.size() == 2) m.nodes[0].scale = m.nodes[1].scale;
  } else {
    const std::size_t k = m.nodes.size();
    const TransformState transform = fit_transform_state(representatives(m));
    const Vector zx = transform.apply(x);
    std::vector<double> dist(k);
    Vector zy(m.dim);
    for (std::size_t i = 0; i < k; ++i) {
      transform.apply_into(m.nodes[i].representative, zy);
      dist[i] = kernels::euclidean(zx, zy);
    }
    std::size_t winner = 0;
    for (std::size_t i = 1; i < k; ++i) {
      if (dist[i] < dist[winner]) winner = i;
    }
    const double a_winner = inverse_distance_similarity(dist[winner], m.nodes[winner].scale);

    if (a_winner < v.tau) {
      create_node(m, x, s_star);
    } else {
      std::size_t runner = k;
      for (std::size_t i = 0; i < k; ++i) {
        if (i != winner && (runner == k || dist[i] < dist[runner])) runner = i;
      }
      const double a_runner = inverse_distance_similarity(dist[runner], m.nodes[runner].scale);

      auto& w = m.nodes[winner];
      w.support += 1;
      const double eta = 1.0 / static_cast<double>(w.support);
      for (std::size_t j = 0; j < m.dim; ++j) w.representative[j] += eta * (x[j] - w.representative[j]);
      w.scale = s_star;
      ++m.stats.winner_updates;

      std::vector<double> multi;
      for (const auto& n : m.nodes) {
        if (n.support > 1) multi.push_back(static_cast<double>(n.support));
      }
      if (!multi.empty() && static_cast<double>(w.support) >= hazen_median(multi)) w.active_for_prediction = true;

      if (runner_up_gate(m, winner, runner, a_runner)) {
        auto& b = m.nodes[runner];
        b.support += 1;
        const double chi = std::clamp((a_runner - v.tau) / std::max(1.0 - v.tau, kAlphaGuard), 0.0, 1.0);
        const double eta2 = chi / static_cast<double>(b.support);
        for (std::size_t j = 0; j < m.dim; ++j) b.representative[j] += eta2 * (x[j] - b.representative[j]);
        ++m.stats.runner_up_updates;
      }
    }
  }

  ++v.recalc_counter;
  if (v.recalc_counter >= v.lambda && m.nodes.size() > 2) {
    vigilance_recalculate(m);
    maintenance_cycle(m, false);
  }
}

void finalize(ModelState& m) {
  if (m.nodes.empty()) throw std::invalid_argument("finalize: model has no nodes");
  maintenance_cycle(m, true);
}

void fit(ModelState& m, std::span<const Vector> samples) {
  for (const auto& x : samples) process_sample(m, x);
}

const AssignmentView& prediction_view(const ModelState& m) {
  if (!m.ph_view || m.ph_view->assignment.empty()) throw std::logic_error("model has no assignment view; finalize first");
  return m.ph_view->assignment;
}

}  // namespace phida
