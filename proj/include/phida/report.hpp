#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phida/experiment.hpp"

namespace phida {

// Marker for values that are unavailable (failed run, or a metric the mode
// does not define). Never written as 0.
inline constexpr const char* kNotAvailable = "NA";

// Flat key=value text, one record per line, fixed key order, %.17g reals.
// Wall time is left out so the file is a pure function of
// dataset + seed + flags; it goes to the summary table instead.
std::string format_seed_run(const std::string& dataset, Mode mode, const std::string& variant, const SeedRun& run);
SeedRun parse_seed_run(const std::string& text);

struct SummaryRow {
  std::string dataset;
  std::string mode;
  std::string variant;
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::map<std::string, std::optional<Aggregate>> metrics;  // keyed by report_metrics()
};

SummaryRow summarize(const RunReport& report);
// Tab-separated header plus one row; columns <metric>_mean, <metric>_std,
// <metric>_n for every metric.
std::string format_summary(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary(const std::string& text);

std::string run_file_name(const std::string& dataset, Mode mode, const std::string& variant, std::uint64_t seed);
std::string summary_file_name(const std::string& dataset, Mode mode, const std::string& variant);

// Writes every per-run file and the summary into `dir` (created if needed).
// Returns the written paths, summary last. Throws when a file cannot be
// written.
std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace phida
