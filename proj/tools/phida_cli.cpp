#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phida/dataset.hpp"
#include "phida/experiment.hpp"
#include "phida/report.hpp"
#include "phida/snapshot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunFailures = 2;

// "30" means seeds 0..29; "1,4,9" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (s.find(',') == std::string::npos) {
    const auto n = std::stoull(s);
    if (n == 0) throw std::invalid_argument("--seeds: need at least one seed");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    out.push_back(std::stoull(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

struct RunArgs {
  std::string dataset;
  std::string label_col = "-1";
  std::string mode = "stationary";
  std::string seeds = "30";
  std::string variant = "full";
  std::string out = "results";
  std::string scale = "none";
  bool no_models = false;
};

int cmd_run(const RunArgs& a) {
  phida::Dataset data = phida::load_dataset(a.dataset, {a.label_col});
  if (a.scale == "minmax") phida::min_max_scale(data);
  const auto mode = phida::parse_mode(a.mode);
  const auto flags = phida::AblationFlags::from_variant(a.variant);
  const auto seeds = parse_seeds(a.seeds);

  std::vector<phida::ModelState> models;
  const auto report = phida::run_experiment(data, mode, seeds, flags, a.no_models ? nullptr : &models);
  const auto written = phida::emit_report(report, a.out);
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!report.runs[i].ok) continue;
    const auto name = "model_" + data.name + "_" + phida::mode_name(mode) + "_" + report.variant + "_seed" +
                      std::to_string(report.runs[i].seed) + ".snap";
    phida::save_model(models[i], std::filesystem::path(a.out) / name);
  }

  std::cout << "dataset " << data.name << " n=" << data.size() << " d=" << data.dim() << " classes=" << data.class_count()
            << "\n";
  const auto row = phida::summarize(report);
  for (const auto& m : phida::report_metrics()) {
    const auto& agg = row.metrics.at(m);
    if (agg) {
      std::printf("  %-14s %.4f (%.4f)  n=%zu\n", m.c_str(), agg->mean, agg->std, agg->count);
    } else {
      std::printf("  %-14s %s\n", m.c_str(), phida::kNotAvailable);
    }
  }
  for (const auto& r : report.runs) {
    if (!r.ok) std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(r.seed), r.error.c_str());
  }
  std::cout << "summary: " << written.back().string() << "\n";
  return report.failed_runs() > 0 ? kExitRunFailures : kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input) {
  const auto model = phida::load_model(model_path);
  const auto xs = phida::load_features(input);
  for (const auto& x : xs) {
    if (x.size() != model.dim) throw std::runtime_error("input has " + std::to_string(x.size()) + " columns, model expects " + std::to_string(model.dim));
  }
  for (long c : phida::predict_labels(model, xs)) std::cout << c << "\n";
  return kExitOk;
}

int cmd_inspect(const std::string& model_path) {
  const auto m = phida::load_model(model_path);
  std::size_t active = 0;
  std::uint64_t total = 0;
  for (const auto& n : m.nodes) {
    active += n.active_for_prediction ? 1 : 0;
    total += n.support;
  }
  std::cout << "variant " << m.flags.variant_name() << "\n";
  std::cout << "dim " << m.dim << "\n";
  std::cout << "samples_seen " << m.samples_seen << "\n";
  std::cout << "nodes " << m.nodes.size() << " (active " << active << ", total support " << total << ")\n";
  std::printf("vigilance lambda=%zu tau=%.6g\n", m.vigilance.lambda, m.vigilance.tau);
  if (!m.ph_view) {
    std::cout << "no cluster view\n";
    return kExitOk;
  }
  const auto& v = *m.ph_view;
  std::cout << "raw_components " << v.raw_component_count << "\n";
  std::cout << "graph_components " << v.graph_component_count << "\n";
  std::cout << "pruned_isolated " << v.pruned_ids.size() << "\n";
  const auto& a = v.assignment;
  std::cout << "clusters " << a.cluster_count() << "\n";
  for (std::size_t c = 0; c < a.cluster_count(); ++c) {
    std::cout << "  cluster " << c << ": nodes " << a.clusters[c].size() << ", support " << a.cluster_supports[c] << "\n";
  }
  return kExitOk;
}

// Config files are flat key=value lists of `run` options; keys outside any
// section are read as belonging to `run`.
class RunConfig : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty()) item.parents.push_back("run");
    }
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PHIDA online clustering harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file of run options; flags on the command line win");
  app.config_formatter(std::make_shared<RunConfig>());

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "train and evaluate over seeds, write reports and model snapshots");
  run_cmd->fallthrough();
  run_cmd->add_option("--dataset", run.dataset, "CSV file with features and a label column")->required();
  run_cmd->add_option("--label-col", run.label_col, "label column name or 0-based index (-1 = last)");
  run_cmd->add_option("--mode", run.mode)->check(CLI::IsMember({"stationary", "nonstationary"}));
  run_cmd->add_option("--seeds", run.seeds, "seed count n (seeds 0..n-1) or comma list");
  run_cmd->add_option("--variant", run.variant)
      ->check(CLI::IsMember({"full", "PHIDA", "noPH", "noRefresh", "noDelete", "noPrune"}));
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--scale", run.scale)->check(CLI::IsMember({"none", "minmax"}));
  run_cmd->add_flag("--no-models", run.no_models, "skip writing model snapshots");

  std::string model_path;
  std::string input;
  auto* predict_cmd = app.add_subcommand("predict", "assign samples with a saved model");
  predict_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--input", input, "CSV of feature rows")->required()->check(CLI::ExistingFile);

  auto* inspect_cmd = app.add_subcommand("inspect", "print a node and cluster summary of a saved model");
  inspect_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*predict_cmd) return cmd_predict(model_path, input);
    if (*inspect_cmd) return cmd_inspect(model_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
