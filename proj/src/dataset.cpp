#include "phida/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace phida {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

char detect_delimiter(const std::string& line) {
  for (char c : {',', '\t', ';'}) {
    if (line.find(c) != std::string::npos) return c;
  }
  return ',';
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

struct Table {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_no;  // 1-based source line per row
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Table t;
  std::string line;
  char delim = 0;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    if (!delim) delim = detect_delimiter(line);
    t.rows.push_back(split(line, delim));
    t.line_no.push_back(no);
  }
  if (t.rows.empty()) throw std::runtime_error(path + ": empty file");
  return t;
}

bool is_index(const std::string& s) {
  if (s.empty()) return false;
  const std::size_t start = s[0] == '-' ? 1 : 0;
  if (start == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(start), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Dataset load_dataset(const std::string& path, const LabelColumn& label_column) {
  const Table t = read_table(path);
  const std::size_t width = t.rows.front().size();
  if (width < 2) throw std::runtime_error(path + ": need at least one feature and a label column");

  bool header = false;
  std::size_t label = width;
  if (is_index(label_column.spec)) {
    const long idx = std::stol(label_column.spec);
    const long w = static_cast<long>(width);
    if (idx >= w || idx < -w) throw std::runtime_error(path + ": label column " + label_column.spec + " out of range");
    label = static_cast<std::size_t>(idx < 0 ? w + idx : idx);
    double v = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label && !parse_number(t.rows.front()[c], v)) header = true;
    }
  } else {
    header = true;
    const auto& names = t.rows.front();
    const auto it = std::find(names.begin(), names.end(), label_column.spec);
    if (it == names.end()) throw std::runtime_error(path + ": no label column named '" + label_column.spec + "'");
    label = static_cast<std::size_t>(it - names.begin());
  }

  Dataset data;
  data.name = std::filesystem::path(path).stem().string();
  std::vector<std::string> raw_labels;
  for (std::size_t r = header ? 1 : 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = path + ": line " + std::to_string(t.line_no[r]);
    if (row.size() != width) {
      throw std::runtime_error(where + ": expected " + std::to_string(width) + " columns, got " +
                               std::to_string(row.size()));
    }
    Vector x;
    x.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label) continue;
      double v = 0.0;
      if (!parse_number(row[c], v)) {
        throw std::runtime_error(where + ", column " + std::to_string(c + 1) + ": non-numeric feature '" + row[c] +
                                 "'");
      }
      x.push_back(v);
    }
    if (row[label].empty()) throw std::runtime_error(where + ", column " + std::to_string(label + 1) + ": missing label");
    data.features.push_back(std::move(x));
    raw_labels.push_back(row[label]);
  }
  if (data.features.empty()) throw std::runtime_error(path + ": no data rows");

  bool numeric = true;
  std::vector<double> as_num(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size() && numeric; ++i) numeric = parse_number(raw_labels[i], as_num[i]);
  std::vector<std::size_t> order(raw_labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return numeric ? as_num[a] < as_num[b] : raw_labels[a] < raw_labels[b];
  });
  std::map<std::string, long> code;
  for (std::size_t i : order) {
    if (code.emplace(raw_labels[i], static_cast<long>(data.class_names.size())).second) {
      data.class_names.push_back(raw_labels[i]);
    }
  }
  data.labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) data.labels.push_back(code.at(l));
  return data;
}

Points load_features(const std::string& path) {
  const Table t = read_table(path);
  const std::size_t width = t.rows.front().size();
  Points out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    Vector x(row.size());
    bool ok = row.size() == width;
    std::size_t bad = 0;
    for (std::size_t c = 0; c < row.size() && ok; ++c) {
      ok = parse_number(row[c], x[c]);
      bad = c;
    }
    if (!ok) {
      if (r == 0) continue;  // header
      throw std::runtime_error(path + ": line " + std::to_string(t.line_no[r]) + ", column " + std::to_string(bad + 1) +
                               ": non-numeric value");
    }
    out.push_back(std::move(x));
  }
  if (out.empty()) throw std::runtime_error(path + ": no data rows");
  return out;
}

void min_max_scale(Dataset& data) {
  const std::size_t d = data.dim();
  for (std::size_t j = 0; j < d; ++j) {
    double lo = data.features.front()[j];
    double hi = lo;
    for (const auto& x : data.features) {
      lo = std::min(lo, x[j]);
      hi = std::max(hi, x[j]);
    }
    const double span = hi - lo;
    for (auto& x : data.features) x[j] = span > 0.0 ? (x[j] - lo) / span : 0.0;
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  for (std::size_t j = 0; j < data.dim(); ++j) std::fprintf(f, "x%zu,", j);
  std::fprintf(f, "label\n");
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features[i]) std::fprintf(f, "%.17g,", v);
    std::fprintf(f, "%ld\n", data.labels[i]);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("error writing " + path);
}

}  // namespace phida
