#include "phida/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phida {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : kNotAvailable; }

std::optional<double> parse_opt(const std::string& s) {
  if (s == kNotAvailable) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::runtime_error("bad numeric field '" + s + "'");
  return v;
}

double parse_num(const std::string& s) {
  const auto v = parse_opt(s);
  if (!v) throw std::runtime_error("unexpected NA");
  return *v;
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, delim)) out.push_back(cell);
  if (s.back() == delim) out.emplace_back();
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += f(v[i]);
  }
  return s;
}

// Stable key order for the instrumentation block.
std::vector<std::pair<const char*, std::uint64_t Instrumentation::*>> stat_fields() {
  return {{"node_creations", &Instrumentation::node_creations},
          {"winner_updates", &Instrumentation::winner_updates},
          {"runner_up_updates", &Instrumentation::runner_up_updates},
          {"recalculations", &Instrumentation::recalculations},
          {"midstream_rebuilds", &Instrumentation::midstream_rebuilds},
          {"final_builds", &Instrumentation::final_builds},
          {"deleted_low_support", &Instrumentation::deleted_low_support},
          {"deleted_isolated", &Instrumentation::deleted_isolated},
          {"pruned_from_ph_input", &Instrumentation::pruned_from_ph_input},
          {"zeta_component_lookups", &Instrumentation::zeta_component_lookups}};
}

std::string clean(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

std::string format_seed_run(const std::string& dataset, Mode mode, const std::string& variant, const SeedRun& r) {
  std::ostringstream o;
  o << "dataset=" << dataset << '\n';
  o << "mode=" << mode_name(mode) << '\n';
  o << "variant=" << variant << '\n';
  o << "seed=" << r.seed << '\n';
  o << "status=" << (r.ok ? "ok" : "failed") << '\n';
  o << "error=" << clean(r.error) << '\n';
  const auto na_unless_ok = [&](double v) { return r.ok ? num(v) : std::string(kNotAvailable); };
  o << "final_ari=" << na_unless_ok(r.final_ari) << '\n';
  o << "final_ami=" << na_unless_ok(r.final_ami) << '\n';
  o << "avg_inc_ari=" << opt(r.avg_inc_ari) << '\n';
  o << "avg_inc_ami=" << opt(r.avg_inc_ami) << '\n';
  o << "bwt_ari=" << opt(r.bwt_ari) << '\n';
  o << "bwt_ami=" << opt(r.bwt_ami) << '\n';
  o << "node_count=" << (r.ok ? std::to_string(r.node_count) : kNotAvailable) << '\n';
  o << "cluster_count=" << (r.ok ? std::to_string(r.cluster_count) : kNotAvailable) << '\n';
  o << "class_order=" << join(r.class_order, [](long c) { return std::to_string(c); }) << '\n';
  o << "q_ari=" << join(r.q_ari, num) << '\n';
  o << "q_ami=" << join(r.q_ami, num) << '\n';
  o << "stages=" << r.r_ari.size() << '\n';
  for (std::size_t i = 0; i < r.r_ari.size(); ++i) o << "r_ari." << i << '=' << join(r.r_ari[i], opt) << '\n';
  for (std::size_t i = 0; i < r.r_ami.size(); ++i) o << "r_ami." << i << '=' << join(r.r_ami[i], opt) << '\n';
  for (const auto& [name, field] : stat_fields()) o << "stats." << name << '=' << r.stats.*field << '\n';
  return o.str();
}

SeedRun parse_seed_run(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed record line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto get = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("missing key " + k);
    return it->second;
  };
  SeedRun r;
  r.seed = std::stoull(get("seed"));
  r.ok = get("status") == "ok";
  r.error = get("error");
  if (r.ok) {
    r.final_ari = parse_num(get("final_ari"));
    r.final_ami = parse_num(get("final_ami"));
    r.node_count = std::stoull(get("node_count"));
    r.cluster_count = std::stoull(get("cluster_count"));
  }
  r.avg_inc_ari = parse_opt(get("avg_inc_ari"));
  r.avg_inc_ami = parse_opt(get("avg_inc_ami"));
  r.bwt_ari = parse_opt(get("bwt_ari"));
  r.bwt_ami = parse_opt(get("bwt_ami"));
  for (const auto& c : split(get("class_order"), ',')) r.class_order.push_back(std::stol(c));
  for (const auto& c : split(get("q_ari"), ',')) r.q_ari.push_back(parse_num(c));
  for (const auto& c : split(get("q_ami"), ',')) r.q_ami.push_back(parse_num(c));
  const std::size_t stages = std::stoull(get("stages"));
  for (std::size_t i = 0; i < stages; ++i) {
    for (auto* target : {&r.r_ari, &r.r_ami}) {
      const std::string key = (target == &r.r_ari ? "r_ari." : "r_ami.") + std::to_string(i);
      std::vector<std::optional<double>> row;
      for (const auto& c : split(get(key), ',')) row.push_back(parse_opt(c));
      target->push_back(std::move(row));
    }
  }
  for (const auto& [name, field] : stat_fields()) r.stats.*field = std::stoull(get(std::string("stats.") + name));
  return r;
}

SummaryRow summarize(const RunReport& rep) {
  SummaryRow row;
  row.dataset = rep.dataset;
  row.mode = mode_name(rep.mode);
  row.variant = rep.variant;
  row.runs = rep.runs.size();
  row.failed = rep.failed_runs();
  for (const auto& m : report_metrics()) row.metrics[m] = rep.aggregate(m);
  return row;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream o;
  o << "dataset\tmode\tvariant\truns\tfailed";
  for (const auto& m : report_metrics()) o << '\t' << m << "_mean\t" << m << "_std\t" << m << "_n";
  o << '\n';
  for (const auto& row : rows) {
    o << row.dataset << '\t' << row.mode << '\t' << row.variant << '\t' << row.runs << '\t' << row.failed;
    for (const auto& m : report_metrics()) {
      const auto it = row.metrics.find(m);
      if (it == row.metrics.end() || !it->second) {
        o << '\t' << kNotAvailable << '\t' << kNotAvailable << "\t0";
      } else {
        o << '\t' << num(it->second->mean) << '\t' << num(it->second->std) << '\t' << it->second->count;
      }
    }
    o << '\n';
  }
  return o.str();
}

std::vector<SummaryRow> parse_summary(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty summary");
  const auto& metrics = report_metrics();
  const std::size_t width = 5 + 3 * metrics.size();
  if (split(line, '\t').size() != width) throw std::runtime_error("summary header has unexpected width");
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != width) throw std::runtime_error("summary row has unexpected width");
    SummaryRow row;
    row.dataset = f[0];
    row.mode = f[1];
    row.variant = f[2];
    row.runs = std::stoull(f[3]);
    row.failed = std::stoull(f[4]);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const auto mean = parse_opt(f[5 + 3 * m]);
      if (!mean) {
        row.metrics[metrics[m]] = std::nullopt;
        continue;
      }
      Aggregate a;
      a.mean = *mean;
      a.std = parse_num(f[6 + 3 * m]);
      a.count = std::stoull(f[7 + 3 * m]);
      row.metrics[metrics[m]] = a;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string run_file_name(const std::string& dataset, Mode mode, const std::string& variant, std::uint64_t seed) {
  return dataset + "_" + mode_name(mode) + "_" + variant + "_seed" + std::to_string(seed) + ".txt";
}

std::string summary_file_name(const std::string& dataset, Mode mode, const std::string& variant) {
  return dataset + "_" + mode_name(mode) + "_" + variant + "_summary.tsv";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::vector<std::filesystem::path> emit_report(const RunReport& rep, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& r : rep.runs) {
    const auto p = dir / run_file_name(rep.dataset, rep.mode, rep.variant, r.seed);
    write_text_file(p, format_seed_run(rep.dataset, rep.mode, rep.variant, r));
    written.push_back(p);
  }
  const auto p = dir / summary_file_name(rep.dataset, rep.mode, rep.variant);
  write_text_file(p, format_summary({summarize(rep)}));
  written.push_back(p);
  return written;
}

}  // namespace phida
