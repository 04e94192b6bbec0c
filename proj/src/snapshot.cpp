#include "phida/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "phida/report.hpp"

namespace phida {

namespace {

class Writer {
 public:
  Writer& key(const char* k) {
    if (!first_) out_ << '\n';
    out_ << k;
    first_ = false;
    return *this;
  }
  Writer& real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %a", v);
    out_ << buf;
    return *this;
  }
  Writer& reals(const Vector& v) {
    for (double x : v) real(x);
    return *this;
  }
  template <class T>
  Writer& integer(T v) {
    out_ << ' ' << v;
    return *this;
  }
  std::string str() { return out_.str() + "\n"; }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  void expect(const std::string& k) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty()) break;
    }
    fields_ = std::istringstream(line);
    std::string got;
    fields_ >> got;
    if (got != k) fail("expected '" + k + "', found '" + got + "'");
  }
  std::string token() {
    std::string t;
    if (!(fields_ >> t)) fail("truncated record");
    return t;
  }
  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0') fail("bad real '" + t + "'");
    return v;
  }
  Vector reals(std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = real();
    return v;
  }
  std::uint64_t integer() {
    const std::string t = token();
    char* end = nullptr;
    const auto v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0') fail("bad integer '" + t + "'");
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("snapshot line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istringstream in_;
  std::istringstream fields_;
  std::size_t line_no_ = 0;
};

std::vector<std::uint64_t Instrumentation::*> stat_members() {
  return {&Instrumentation::node_creations,      &Instrumentation::winner_updates,
          &Instrumentation::runner_up_updates,   &Instrumentation::recalculations,
          &Instrumentation::midstream_rebuilds,  &Instrumentation::final_builds,
          &Instrumentation::deleted_low_support, &Instrumentation::deleted_isolated,
          &Instrumentation::pruned_from_ph_input, &Instrumentation::zeta_component_lookups};
}

void write_transform(Writer& w, const TransformState& t) {
  w.key("transform").real(t.gamma).integer(t.dim()).reals(t.median).reals(t.sigma_hat);
}

TransformState read_transform(Reader& r) {
  r.expect("transform");
  TransformState t;
  t.gamma = r.real();
  const std::size_t d = r.integer();
  t.median = r.reals(d);
  t.sigma_hat = r.reals(d);
  return t;
}

}  // namespace

std::string serialize_model(const ModelState& m) {
  Writer w;
  w.key("phida-snapshot").integer(kSnapshotVersion);
  w.key("dim").integer(m.dim);
  w.key("flags").integer(int{m.flags.refresh}).integer(int{m.flags.remove}).integer(int{m.flags.prune_ph_input}).integer(
      int{m.flags.use_ph});
  w.key("counters").integer(m.samples_seen).integer(m.maintenance_epoch).integer(m.next_id);
  w.key("stats");
  for (auto f : stat_members()) w.integer(m.stats.*f);
  w.key("welford").integer(m.raw_welford.count()).reals(m.raw_welford.mean()).reals(m.raw_welford.m2());
  const auto& v = m.vigilance;
  w.key("vigilance")
      .integer(v.lambda)
      .real(v.tau)
      .real(v.smoothed_ratio)
      .integer(int{v.ratio_initialized})
      .integer(v.recalc_counter)
      .integer(v.retention)
      .integer(v.buffer.size());
  for (const auto& x : v.buffer) w.key("sample").reals(x);
  w.key("nodes").integer(m.nodes.size());
  for (const auto& n : m.nodes) {
    w.key("node")
        .integer(n.id)
        .integer(n.support)
        .real(n.scale)
        .integer(int{n.active_for_prediction})
        .integer(n.created_epoch)
        .integer(n.feature_weights.size())
        .reals(n.representative)
        .reals(n.feature_weights);
  }
  w.key("view").integer(int{m.ph_view.has_value()});
  if (m.ph_view) {
    const auto& pv = *m.ph_view;
    w.key("input_ids").integer(pv.input_ids.size());
    for (auto id : pv.input_ids) w.integer(id);
    w.key("pruned_ids").integer(pv.pruned_ids.size());
    for (auto id : pv.pruned_ids) w.integer(id);
    w.key("components").integer(pv.raw_component_count).integer(pv.graph_component_count).integer(pv.component_of.size());
    for (const auto& [id, c] : pv.component_of) w.integer(id).integer(c);
    const auto& a = pv.assignment;
    write_transform(w, a.transform);
    w.key("assignment").real(a.concentration).integer(a.node_count()).integer(a.cluster_count());
    for (std::size_t i = 0; i < a.node_count(); ++i) {
      w.key("anode").integer(a.node_ids[i]).integer(a.node_supports[i]).reals(a.transformed_reps[i]);
    }
    for (std::size_t c = 0; c < a.cluster_count(); ++c) {
      w.key("cluster").integer(a.cluster_supports[c]).integer(a.clusters[c].size());
      for (auto p : a.clusters[c]) w.integer(p);
    }
  }
  w.key("end");
  return w.str();
}

ModelState deserialize_model(const std::string& text) {
  Reader r(text);
  r.expect("phida-snapshot");
  const auto version = r.integer();
  if (version != kSnapshotVersion) r.fail("unsupported snapshot version " + std::to_string(version));
  r.expect("dim");
  const std::size_t d = r.integer();
  r.expect("flags");
  AblationFlags f;
  f.refresh = r.integer() != 0;
  f.remove = r.integer() != 0;
  f.prune_ph_input = r.integer() != 0;
  f.use_ph = r.integer() != 0;
  ModelState m(d, f);
  r.expect("counters");
  m.samples_seen = r.integer();
  m.maintenance_epoch = r.integer();
  m.next_id = r.integer();
  r.expect("stats");
  for (auto field : stat_members()) m.stats.*field = r.integer();
  r.expect("welford");
  const std::size_t count = r.integer();
  auto mean = r.reals(d);
  auto m2 = r.reals(d);
  m.raw_welford = WelfordState::restore(count, std::move(mean), std::move(m2));
  r.expect("vigilance");
  auto& v = m.vigilance;
  v.lambda = r.integer();
  v.tau = r.real();
  v.smoothed_ratio = r.real();
  v.ratio_initialized = r.integer() != 0;
  v.recalc_counter = r.integer();
  v.retention = r.integer();
  const std::size_t nb = r.integer();
  for (std::size_t i = 0; i < nb; ++i) {
    r.expect("sample");
    v.buffer.push_back(r.reals(d));
  }
  r.expect("nodes");
  const std::size_t k = r.integer();
  for (std::size_t i = 0; i < k; ++i) {
    r.expect("node");
    NodeState n;
    n.id = r.integer();
    n.support = r.integer();
    n.scale = r.real();
    n.active_for_prediction = r.integer() != 0;
    n.created_epoch = r.integer();
    const std::size_t nw = r.integer();
    n.representative = r.reals(d);
    n.feature_weights = r.reals(nw);
    m.nodes.push_back(std::move(n));
  }
  r.expect("view");
  if (r.integer() != 0) {
    PhView pv;
    r.expect("input_ids");
    for (std::size_t i = 0, n = r.integer(); i < n; ++i) pv.input_ids.push_back(r.integer());
    r.expect("pruned_ids");
    for (std::size_t i = 0, n = r.integer(); i < n; ++i) pv.pruned_ids.push_back(r.integer());
    r.expect("components");
    pv.raw_component_count = r.integer();
    pv.graph_component_count = r.integer();
    for (std::size_t i = 0, n = r.integer(); i < n; ++i) {
      const NodeId id = r.integer();
      pv.component_of[id] = r.integer();
    }
    auto& a = pv.assignment;
    a.transform = read_transform(r);
    if (a.transform.dim() != d) r.fail("transform dimension mismatch");
    r.expect("assignment");
    a.concentration = r.real();
    const std::size_t nn = r.integer();
    const std::size_t nc = r.integer();
    for (std::size_t i = 0; i < nn; ++i) {
      r.expect("anode");
      a.node_ids.push_back(r.integer());
      a.node_supports.push_back(r.integer());
      a.transformed_reps.push_back(r.reals(d));
    }
    for (std::size_t c = 0; c < nc; ++c) {
      r.expect("cluster");
      a.cluster_supports.push_back(r.integer());
      std::vector<std::size_t> members(r.integer());
      for (auto& p : members) {
        p = r.integer();
        if (p >= nn) r.fail("cluster member out of range");
      }
      a.clusters.push_back(std::move(members));
    }
    pv.transform = a.transform;
    m.ph_view = std::move(pv);
  }
  r.expect("end");
  return m;
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

ModelState load_model(const std::filesystem::path& path) { return deserialize_model(read_text_file(path)); }

}  // namespace phida
